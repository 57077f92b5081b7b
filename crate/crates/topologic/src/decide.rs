//! Bounded satisfiability and validity by exhaustive enumeration of finite
//! spaces. Finite topologies are enumerated through their specialization
//! preorders (every finite topology is Alexandrov); verdicts are always
//! bound-qualified.

use crate::error::{Error, Result};
use crate::formula::{not, Formula};
use crate::semantics::Checker;
use crate::space::{full_mask, Model, SubsetSpace, World};
use crate::splitting::finitize;
use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceClass {
    /// Opens closed under union and intersection, containing ∅ and X.
    Topology,
    /// Opens closed under union and intersection, containing X.
    Lattice,
    /// Any family of opens containing X.
    AnySubsetSpace,
}

impl SpaceClass {
    pub fn point_cap(self) -> usize {
        match self {
            SpaceClass::Topology => 6,
            SpaceClass::Lattice => 4,
            SpaceClass::AnySubsetSpace => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub max_points: usize,
    pub class: SpaceClass,
    pub max_seconds: Option<u64>,
    /// Skip spaces isomorphic (under point permutation) to an earlier one.
    pub iso_prune: bool,
    /// Shrink countermodels through `finitize` before reporting.
    pub minimize_countermodels: bool,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_points: 4,
            class: SpaceClass::Topology,
            max_seconds: None,
            iso_prune: false,
            minimize_countermodels: true,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Satisfiable {
        model: Model,
        world: World,
        models_examined: u64,
    },
    UnsatUpToBound {
        models_examined: u64,
    },
    ValidUpToBound {
        models_examined: u64,
    },
    Countermodel {
        model: Model,
        world: World,
        models_examined: u64,
    },
}

impl Verdict {
    pub fn models_examined(&self) -> u64 {
        match self {
            Verdict::Satisfiable { models_examined, .. }
            | Verdict::UnsatUpToBound { models_examined }
            | Verdict::ValidUpToBound { models_examined }
            | Verdict::Countermodel { models_examined, .. } => *models_examined,
        }
    }
}

/// All labeled spaces of the class on `n` points, in canonical order:
/// topologies by the lexicographic order of their preorders' up-set
/// vectors, the other classes by the bitmask of the open family.
pub fn enumerate_spaces(n: usize, class: SpaceClass) -> Result<Vec<SubsetSpace>> {
    if n == 0 || n > class.point_cap() {
        return Err(Error::CapExceeded(format!(
            "{n} points exceeds the cap for {class:?} ({})",
            class.point_cap()
        )));
    }
    let points: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
    let full = full_mask(n);
    let mut out = Vec::new();
    match class {
        SpaceClass::Topology => {
            // DFS over per-point up-sets; transitivity checked incrementally
            let mut up = vec![0u64; n];
            fn assign(
                x: usize,
                n: usize,
                up: &mut Vec<u64>,
                points: &[String],
                out: &mut Vec<SubsetSpace>,
            ) {
                if x == n {
                    let full = full_mask(n);
                    let opens: Vec<u64> = (0..=full)
                        .filter(|&s| {
                            (0..n).all(|y| s >> y & 1 == 0 || up[y] & !s == 0)
                        })
                        .collect();
                    out.push(
                        SubsetSpace::new(points.to_vec(), opens)
                            .expect("up-set family is a space"),
                    );
                    return;
                }
                'cand: for m in 0..=full_mask(n) {
                    if m >> x & 1 != 1 {
                        continue;
                    }
                    for y in 0..x {
                        if m >> y & 1 == 1 && up[y] & !m != 0 {
                            continue 'cand;
                        }
                        if up[y] >> x & 1 == 1 && m & !up[y] != 0 {
                            continue 'cand;
                        }
                    }
                    up[x] = m;
                    assign(x + 1, n, up, points, out);
                }
            }
            assign(0, n, &mut up, &points, &mut out);
        }
        SpaceClass::Lattice | SpaceClass::AnySubsetSpace => {
            let n_subsets = 1usize << (full + 1);
            for fam_bits in 0..n_subsets as u64 {
                if fam_bits >> full & 1 != 1 {
                    continue; // X must be present
                }
                let members: Vec<u64> = (0..=full).filter(|&s| fam_bits >> s & 1 == 1).collect();
                if class == SpaceClass::Lattice {
                    let closed = members.iter().all(|&a| {
                        members
                            .iter()
                            .all(|&b| fam_bits >> (a | b) & 1 == 1 && fam_bits >> (a & b) & 1 == 1)
                    });
                    if !closed {
                        continue;
                    }
                }
                out.push(
                    SubsetSpace::new(points.clone(), members).expect("family is a space"),
                );
            }
        }
    }
    Ok(out)
}

/// Canonical key of a space under point permutation, for pruning.
fn iso_key(space: &SubsetSpace) -> Vec<u64> {
    let n = space.point_count();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<u64>> = None;
    permute(&mut perm, 0, &mut |p| {
        let mut opens: Vec<u64> = space
            .opens()
            .iter()
            .map(|&u| {
                let mut m = 0u64;
                for (i, &pi) in p.iter().enumerate() {
                    if u >> i & 1 == 1 {
                        m |= 1 << pi;
                    }
                }
                m
            })
            .collect();
        opens.sort_unstable();
        if best.as_ref().map_or(true, |b| opens < *b) {
            best = Some(opens);
        }
    });
    best.expect("at least the identity permutation")
}

fn permute(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        f(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, f);
        perm.swap(k, i);
    }
}

/// Searches spaces of 1..=max_points points and all valuations of the
/// formula's atoms for a world satisfying `f`, in canonical order.
pub fn decide_sat(f: &Formula, budget: &SearchBudget) -> Result<Verdict> {
    if budget.max_points == 0 || budget.max_points > budget.class.point_cap() {
        return Err(Error::CapExceeded(format!(
            "max_points {} outside 1..={}",
            budget.max_points,
            budget.class.point_cap()
        )));
    }
    let atoms = f.atoms();
    let start = Instant::now();
    let mut examined: u64 = 0;
    for n in 1..=budget.max_points {
        let spaces = enumerate_spaces(n, budget.class)?;
        let mut seen_keys: HashSet<Vec<u64>> = HashSet::new();
        for space in spaces {
            if budget.iso_prune && !seen_keys.insert(iso_key(&space)) {
                continue;
            }
            let n_vals = 1u64 << n;
            let mut masks = vec![0u64; atoms.len()];
            loop {
                if let Some(limit) = budget.max_seconds {
                    if start.elapsed().as_secs() >= limit {
                        return Err(Error::BudgetExhausted {
                            models_examined: examined,
                        });
                    }
                }
                let valuation: BTreeMap<String, u64> = atoms
                    .iter()
                    .cloned()
                    .zip(masks.iter().copied())
                    .collect();
                let model =
                    Model::new(space.clone(), valuation).expect("enumerated model is valid");
                examined += 1;
                let mut checker = Checker::new(&model);
                let ts = checker.truth_set(f);
                if let Some(i) = (0..checker.worlds().len()).find(|&i| ts.contains(i)) {
                    let world = checker.worlds()[i];
                    return Ok(Verdict::Satisfiable {
                        model,
                        world,
                        models_examined: examined,
                    });
                }
                // next valuation vector, first atom most significant
                let mut carry = true;
                for d in (0..masks.len()).rev() {
                    masks[d] += 1;
                    if masks[d] < n_vals {
                        carry = false;
                        break;
                    }
                    masks[d] = 0;
                }
                if carry || masks.is_empty() {
                    break;
                }
            }
        }
    }
    Ok(Verdict::UnsatUpToBound {
        models_examined: examined,
    })
}

/// Dual of `decide_sat` on the negation. Countermodels are shrunk through
/// `finitize` when the shrunk model stays in the searched class and still
/// refutes the formula; otherwise the original witness is reported.
pub fn decide_valid(f: &Formula, budget: &SearchBudget) -> Result<Verdict> {
    let neg = not(f.clone());
    match decide_sat(&neg, budget)? {
        Verdict::Satisfiable {
            model,
            world,
            models_examined,
        } => {
            if budget.minimize_countermodels && model.space.is_topology() {
                if let Ok((small, map)) = finitize(&model, &neg) {
                    let w = map[&world];
                    let replays = crate::semantics::eval(&small, w, &neg).unwrap_or(false);
                    let in_class = match budget.class {
                        SpaceClass::Topology => small.space.is_topology(),
                        SpaceClass::Lattice => {
                            small.space.is_closed_under_union()
                                && small.space.is_closed_under_intersection()
                        }
                        SpaceClass::AnySubsetSpace => true,
                    };
                    if replays && in_class {
                        return Ok(Verdict::Countermodel {
                            model: small,
                            world: w,
                            models_examined,
                        });
                    }
                }
            }
            Ok(Verdict::Countermodel {
                model,
                world,
                models_examined,
            })
        }
        Verdict::UnsatUpToBound { models_examined } => Ok(Verdict::ValidUpToBound {
            models_examined,
        }),
        other => Ok(other),
    }
}
