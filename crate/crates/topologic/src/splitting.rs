//! Splittings of a space's opens, remainder partitions, stability of
//! classes under formulas, basis reduction, and the two quotient
//! constructions that shrink a model while preserving satisfaction.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::semantics::Checker;
use crate::space::{Model, SubsetSpace, World};
use serde::Serialize;
use std::collections::BTreeMap;

/// An intersection-closed family of opens of a host space. Intersection
/// closure is what makes the remainders below a partition.
#[derive(Debug, Clone)]
pub struct Splitting {
    host: SubsetSpace,
    family: Vec<u64>,
}

impl Splitting {
    pub fn new(host: SubsetSpace, mut family: Vec<u64>) -> Result<Splitting> {
        family.sort_unstable();
        family.dedup();
        for &u in &family {
            if host.open_index(u).is_none() {
                return Err(Error::InvalidSplitting(format!(
                    "family member {u:#b} is not an open of the host"
                )));
            }
        }
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                let meet = family[i] & family[j];
                if !family.contains(&meet) {
                    return Err(Error::InvalidSplitting(
                        "family is not closed under pairwise intersection".into(),
                    ));
                }
            }
        }
        Ok(Splitting { host, family })
    }

    pub fn host(&self) -> &SubsetSpace {
        &self.host
    }

    pub fn family(&self) -> &[u64] {
        &self.family
    }

    /// ↓F: every open of the host below some family member.
    pub fn down_set(&self) -> Vec<u64> {
        self.host
            .opens()
            .iter()
            .copied()
            .filter(|&v| self.family.iter().any(|&u| v & !u == 0))
            .collect()
    }

    /// The remainder of U: ↓U minus every ↓Uᵢ with U ⊄ Uᵢ.
    pub fn remainder(&self, u: u64) -> Result<Vec<u64>> {
        if !self.family.contains(&u) {
            return Err(Error::InvalidSplitting(format!(
                "open {u:#b} is not a member of the family"
            )));
        }
        let rem: Vec<u64> = self
            .host
            .opens()
            .iter()
            .copied()
            .filter(|&v| {
                v & !u == 0
                    && !self
                        .family
                        .iter()
                        .any(|&ui| u & !ui != 0 && v & !ui == 0)
            })
            .collect();
        // ∩-closure makes the subtrahend reducible to strict subsets of U
        debug_assert_eq!(rem, {
            let simpler: Vec<u64> = self
                .host
                .opens()
                .iter()
                .copied()
                .filter(|&v| {
                    v & !u == 0
                        && !self
                            .family
                            .iter()
                            .any(|&uj| uj != u && uj & !u == 0 && v & !uj == 0)
                })
                .collect();
            simpler
        });
        Ok(rem)
    }

    /// The partition of ↓F, computed both from remainders and from the
    /// relation V₁ ∼ V₂ ⇔ (∀U ∈ F: V₁ ⊆ U ⇔ V₂ ⊆ U); the two must agree.
    pub fn equiv_classes(&self) -> Vec<Vec<u64>> {
        let mut by_remainder: Vec<Vec<u64>> = self
            .family
            .iter()
            .map(|&u| self.remainder(u).expect("member of own family"))
            .filter(|c| !c.is_empty())
            .collect();
        by_remainder.sort();
        by_remainder.dedup();

        let mut by_signature: BTreeMap<Vec<bool>, Vec<u64>> = BTreeMap::new();
        for v in self.down_set() {
            let sig = self.family.iter().map(|&u| v & !u == 0).collect();
            by_signature.entry(sig).or_default().push(v);
        }
        let mut classes: Vec<Vec<u64>> = by_signature.into_values().collect();
        classes.sort();
        assert_eq!(by_remainder, classes, "remainder/relation partition mismatch");
        classes
    }

    /// ⊆-maximum of the class containing V: the meet of all members above V.
    pub fn representative(&self, v: u64) -> Option<u64> {
        let above: Vec<u64> = self.family.iter().copied().filter(|&u| v & !u == 0).collect();
        if above.is_empty() {
            return None;
        }
        Some(above.into_iter().fold(self.host.full_set(), |a, b| a & b))
    }
}

/// True iff for every point x, the truth of `f` is constant across the
/// worlds (x, V) with V in `class`. Members that are not opens of the
/// model are ignored.
pub fn is_stable_for(model: &Model, class: &[u64], f: &Formula) -> bool {
    let mut checker = Checker::new(model);
    let ts = checker.truth_set(f);
    for x in 0..model.space.point_count() {
        let mut seen: Option<bool> = None;
        for &v in class {
            if v >> x & 1 != 1 {
                continue;
            }
            let Some(open) = model.space.open_index(v) else {
                continue;
            };
            let i = checker
                .world_index(World { point: x, open })
                .expect("open containing x is a world");
            let val = ts.contains(i);
            match seen {
                None => seen = Some(val),
                Some(prev) if prev != val => return false,
                _ => {}
            }
        }
    }
    true
}

/// Per-subformula stable splittings, monotone in the subformula order.
#[derive(Debug, Clone)]
pub struct StableSplittingSet {
    entries: Vec<(Formula, Splitting)>,
}

impl StableSplittingSet {
    /// Entries in subformula post-order; the last is the full formula's.
    pub fn entries(&self) -> &[(Formula, Splitting)] {
        &self.entries
    }

    pub fn splitting_for(&self, f: &Formula) -> Option<&Splitting> {
        let d = f.desugar();
        self.entries.iter().find(|(g, _)| *g == d).map(|(_, s)| s)
    }

    pub fn top(&self) -> &(Formula, Splitting) {
        self.entries.last().expect("at least the formula itself")
    }
}

/// Builds, for every subformula ψ of `f`, an intersection-closed family
/// containing X whose remainder classes are all stable for every subformula
/// of ψ. Works by iterative refinement: while some class has a point seeing
/// two truth values, adjoin the largest deviating open and re-close under
/// intersection. The result is re-verified against `is_stable_for`.
pub fn build_stable_splittings(model: &Model, f: &Formula) -> Result<StableSplittingSet> {
    if !model.space.is_topology() {
        return Err(Error::NotATopology(
            "stable splittings are built over topological models".into(),
        ));
    }
    let subs = f.subformulas();
    let mut checker = Checker::new(model);
    let truth: Vec<_> = subs.iter().map(|s| checker.truth_set(s)).collect();
    let worlds = checker.worlds().to_vec();
    let world_of = |point: usize, open: usize| -> usize {
        worlds
            .iter()
            .position(|w| w.point == point && w.open == open)
            .expect("world exists")
    };

    let space = &model.space;
    let opens = space.opens();
    let full = space.full_set();
    let mut family: Vec<u64> = vec![full];
    let mut entries = Vec::new();

    for (si, sub) in subs.iter().enumerate() {
        loop {
            // classes of nonempty opens, by membership signature
            let mut classes: BTreeMap<Vec<bool>, Vec<u64>> = BTreeMap::new();
            for &v in opens {
                if v == 0 {
                    continue;
                }
                let sig = family.iter().map(|&u| v & !u == 0).collect();
                classes.entry(sig).or_default().push(v);
            }
            let mut witness: Option<u64> = None;
            'scan: for class in classes.values() {
                // the class max is its representative, a class member itself
                let max = class.iter().copied().fold(0u64, |a, b| a | b);
                debug_assert!(class.contains(&max));
                for x in 0..space.point_count() {
                    if max >> x & 1 != 1 {
                        continue;
                    }
                    let ref_val = truth[si].contains(world_of(
                        x,
                        space.open_index(max).expect("class max is an open"),
                    ));
                    let deviants: Vec<u64> = class
                        .iter()
                        .copied()
                        .filter(|&v| {
                            v >> x & 1 == 1
                                && truth[si].contains(world_of(
                                    x,
                                    space.open_index(v).expect("class member is an open"),
                                )) != ref_val
                        })
                        .collect();
                    if let Some(&v) = deviants
                        .iter()
                        .max_by_key(|&&v| (v.count_ones(), v))
                    {
                        witness = Some(v);
                        break 'scan;
                    }
                }
            }
            match witness {
                None => break,
                Some(v) => {
                    assert!(!family.contains(&v), "refinement must add a new open");
                    family.push(v);
                    // re-close under intersection
                    loop {
                        let mut added = false;
                        for i in 0..family.len() {
                            for j in i + 1..family.len() {
                                let meet = family[i] & family[j];
                                if !family.contains(&meet) {
                                    family.push(meet);
                                    added = true;
                                }
                            }
                        }
                        if !added {
                            break;
                        }
                    }
                }
            }
        }
        entries.push((sub.clone(), Splitting::new(space.clone(), family.clone())?));
    }

    let set = StableSplittingSet { entries };
    // post-hoc verification: stability of every class for every subformula,
    // plus monotonicity of the families along the subformula order
    for (i, (sub, split)) in set.entries.iter().enumerate() {
        assert!(split.family().contains(&full));
        for class in split.equiv_classes() {
            for dep in sub.subformulas() {
                assert!(
                    is_stable_for(model, &class, &dep),
                    "class {class:?} unstable for {dep}"
                );
            }
        }
        if i > 0 {
            let prev = set.entries[i - 1].1.family();
            if subs[i].subformulas().contains(&subs[i - 1]) {
                assert!(prev.iter().all(|u| split.family().contains(u)));
            }
        }
    }
    Ok(set)
}

/// Per-class stability report for the full formula's splitting.
#[derive(Debug, Serialize)]
pub struct SplittingReport {
    pub family: Vec<Vec<String>>,
    pub classes: Vec<ClassReport>,
}

#[derive(Debug, Serialize)]
pub struct ClassReport {
    pub members: Vec<Vec<String>>,
    pub representative: Vec<String>,
    pub stability: BTreeMap<String, bool>,
}

pub fn splitting_report(model: &Model, f: &Formula) -> Result<SplittingReport> {
    let set = build_stable_splittings(model, f)?;
    let (top, split) = set.top();
    let names = |mask: u64| model.space.point_names(mask);
    let classes = split
        .equiv_classes()
        .into_iter()
        .map(|class| {
            let rep = split
                .representative(class[0])
                .expect("class members lie below the family");
            let stability = top
                .subformulas()
                .iter()
                .map(|s| (s.to_string(), is_stable_for(model, &class, s)))
                .collect();
            ClassReport {
                members: class.iter().map(|&v| names(v)).collect(),
                representative: names(rep),
                stability,
            }
        })
        .collect();
    Ok(SplittingReport {
        family: split.family().iter().map(|&u| names(u)).collect(),
        classes,
    })
}

// ---------------------------------------------------------------------------
// basis reduction
// ---------------------------------------------------------------------------

/// Per-formula agreement between a model and its basis restriction.
#[derive(Debug, Serialize)]
pub struct BasisReport {
    pub entries: Vec<BasisEntry>,
}

#[derive(Debug, Serialize)]
pub struct BasisEntry {
    pub formula: String,
    pub eval_agrees: bool,
    pub valid_in_full: bool,
    pub valid_in_basis: bool,
}

impl BasisReport {
    pub fn all_agree(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.eval_agrees && e.valid_in_full == e.valid_in_basis)
    }
}

/// Restricts the model's opens to a union-closed basis and reports, per
/// test formula, satisfaction agreement on the shared worlds and validity
/// agreement between the two models.
pub fn restrict_to_basis(
    model: &Model,
    basis: &[u64],
    tests: &[Formula],
) -> Result<(Model, BasisReport)> {
    let mut basis: Vec<u64> = basis.to_vec();
    basis.sort_unstable();
    basis.dedup();
    for &b in &basis {
        if model.space.open_index(b).is_none() {
            return Err(Error::InvalidBasis(format!(
                "basis member {b:#b} is not an open"
            )));
        }
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let join = basis[i] | basis[j];
            if !basis.contains(&join) {
                return Err(Error::InvalidBasis(
                    "basis is not closed under pairwise union".into(),
                ));
            }
        }
    }
    for &u in model.space.opens() {
        let covered = basis
            .iter()
            .copied()
            .filter(|&b| b & !u == 0)
            .fold(0u64, |a, b| a | b);
        if covered != u {
            return Err(Error::InvalidBasis(format!(
                "open {u:#b} is not a union of basis members"
            )));
        }
    }
    let restricted = Model::new(
        SubsetSpace::new(model.space.points().to_vec(), basis.clone())?,
        model.valuation().clone(),
    )?;
    let mut entries = Vec::new();
    for f in tests {
        let mut eval_agrees = true;
        for w in restricted.worlds() {
            let mask = restricted.space.opens()[w.open];
            let full_open = model.space.open_index(mask).expect("basis ⊆ opens");
            let a = crate::semantics::eval(model, World { point: w.point, open: full_open }, f)?;
            let b = crate::semantics::eval(&restricted, w, f)?;
            if a != b {
                eval_agrees = false;
            }
        }
        entries.push(BasisEntry {
            formula: f.to_string(),
            eval_agrees,
            valid_in_full: crate::semantics::valid_in_model(model, f).is_none(),
            valid_in_basis: crate::semantics::valid_in_model(&restricted, f).is_none(),
        });
    }
    Ok((restricted, BasisReport { entries }))
}

// ---------------------------------------------------------------------------
// quotients
// ---------------------------------------------------------------------------

pub type WorldMap = BTreeMap<World, World>;

/// Identifies points that agree on membership in every open and on every
/// atom. Returns the quotient model and the induced map on worlds.
pub fn quotient_points(model: &Model) -> (Model, WorldMap) {
    let space = &model.space;
    let n = space.point_count();
    // class signature: per-open membership plus per-atom membership
    let sig = |x: usize| -> (Vec<bool>, Vec<bool>) {
        (
            space.opens().iter().map(|&u| u >> x & 1 == 1).collect(),
            model.valuation().values().map(|&a| a >> x & 1 == 1).collect(),
        )
    };
    let mut class_of = vec![usize::MAX; n];
    let mut reps: Vec<usize> = Vec::new();
    for x in 0..n {
        match reps.iter().position(|&r| sig(r) == sig(x)) {
            Some(c) => class_of[x] = c,
            None => {
                class_of[x] = reps.len();
                reps.push(x);
            }
        }
    }
    let rep_names: Vec<String> = reps.iter().map(|&r| space.points()[r].clone()).collect();
    let image = |mask: u64| -> u64 {
        let mut out = 0u64;
        for x in 0..n {
            if mask >> x & 1 == 1 {
                out |= 1 << class_of[x];
            }
        }
        out
    };
    let mut new_opens: Vec<u64> = space.opens().iter().map(|&u| image(u)).collect();
    new_opens.sort_unstable();
    new_opens.dedup();
    // the quotient space sorts point names; re-index masks accordingly
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| rep_names[a].cmp(&rep_names[b]));
    let mut new_pos = vec![0usize; reps.len()];
    for (pos, &c) in order.iter().enumerate() {
        new_pos[c] = pos;
    }
    let reindex = |mask: u64| -> u64 {
        let mut out = 0u64;
        for c in 0..reps.len() {
            if mask >> c & 1 == 1 {
                out |= 1 << new_pos[c];
            }
        }
        out
    };
    let q_space = SubsetSpace::new(
        rep_names.clone(),
        new_opens.iter().map(|&u| reindex(u)).collect(),
    )
    .expect("quotient space is well formed");
    let q_val = model
        .valuation()
        .iter()
        .map(|(a, &mask)| (a.clone(), reindex(image(mask))))
        .collect();
    let quotient = Model::new(q_space, q_val).expect("quotient model is well formed");

    let mut map = WorldMap::new();
    for w in model.worlds() {
        let mask = reindex(image(space.opens()[w.open]));
        map.insert(
            w,
            World {
                point: new_pos[class_of[w.point]],
                open: quotient.space.open_index(mask).expect("image of an open"),
            },
        );
    }
    (quotient, map)
}

/// Shrinks a topological model to a model of bounded size that agrees with
/// it on every subformula of `f` at mapped worlds: replaces the opens by
/// the stable-splitting family for `f` (each open goes to its class
/// representative), restricts the valuation to the atoms of `f`, and then
/// quotients the points.
pub fn finitize(model: &Model, f: &Formula) -> Result<(Model, WorldMap)> {
    let set = build_stable_splittings(model, f)?;
    let (_, split) = set.top();
    let family = split.family().to_vec();

    let atoms = f.atoms();
    let reduced_val: BTreeMap<String, u64> = model
        .valuation()
        .iter()
        .filter(|(a, _)| atoms.contains(*a))
        .map(|(a, &m)| (a.clone(), m))
        .collect();
    let mut reduced_opens = family.clone();
    if !reduced_opens.contains(&0) {
        reduced_opens.push(0);
    }
    let reduced = Model::new(
        SubsetSpace::new(model.space.points().to_vec(), reduced_opens)?,
        reduced_val,
    )?;
    let (quotient, qmap) = quotient_points(&reduced);

    let mut map = WorldMap::new();
    for w in model.worlds() {
        let rep = split
            .representative(model.space.opens()[w.open])
            .expect("X is in every family");
        let mid = World {
            point: w.point,
            open: reduced.space.open_index(rep).expect("family member"),
        };
        map.insert(w, qmap[&mid]);
    }

    assert!(quotient.space.opens().len() <= family.len() + 1);
    assert!(quotient.space.point_count() <= 1usize << (atoms.len() + family.len()).min(63));
    #[cfg(debug_assertions)]
    for sub in f.subformulas() {
        for (&w, &w2) in &map {
            debug_assert_eq!(
                crate::semantics::eval(model, w, &sub)?,
                crate::semantics::eval(&quotient, w2, &sub)?,
                "finitize changed {sub} at {w:?}"
            );
        }
    }
    Ok((quotient, map))
}
