//! The satisfaction relation over the pointed product, model validity,
//! scheme validity, and topological characterization of atoms.
//!
//! `K f` holds at (x, U) when f holds at (y, U) for every y in U; `[] f`
//! holds at (x, U) when f holds at (x, V) for every open V inside U that
//! contains x. Derived connectives are evaluated by their duals, which
//! agrees with evaluation of the desugared form.

use crate::error::{Error, Result};
use crate::formula::{self, Formula};
use crate::space::{Model, World};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

// ---------------------------------------------------------------------------
// world sets
// ---------------------------------------------------------------------------

/// A set of worlds of one fixed model, as a bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorldSet {
    words: Vec<u64>,
    len: usize,
}

impl WorldSet {
    pub fn empty(len: usize) -> WorldSet {
        WorldSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> WorldSet {
        let mut s = WorldSet::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty_set(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn complement(&self) -> WorldSet {
        let mut out = WorldSet {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.trim();
        out
    }

    pub fn is_superset(&self, other: &WorldSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| b & !a == 0)
    }

    pub fn intersects(&self, other: &WorldSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    fn trim(&mut self) {
        let spare = self.words.len() * 64 - self.len;
        if spare > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> spare;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// checker
// ---------------------------------------------------------------------------

/// Truth-set evaluator for one model, memoizing per subformula. Evaluating a
/// formula once per model and reading off truth values per world keeps the
/// exhaustive suites tractable.
pub struct Checker<'m> {
    model: &'m Model,
    worlds: Vec<World>,
    /// world index by (point, open), or usize::MAX when x is outside U
    index: Vec<usize>,
    /// per open index: the set of worlds on that open
    open_worlds: Vec<WorldSet>,
    /// per world: worlds (same point, sub-open containing the point)
    effort_succ: Vec<Vec<usize>>,
    memo: HashMap<Formula, WorldSet>,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m Model) -> Checker<'m> {
        let worlds = model.worlds();
        let n_opens = model.space.opens().len();
        let n_points = model.space.point_count();
        let mut index = vec![usize::MAX; n_points * n_opens];
        for (i, w) in worlds.iter().enumerate() {
            index[w.point * n_opens + w.open] = i;
        }
        let mut open_worlds = vec![WorldSet::empty(worlds.len()); n_opens];
        for (i, w) in worlds.iter().enumerate() {
            open_worlds[w.open].insert(i);
        }
        let opens = model.space.opens();
        let effort_succ = worlds
            .iter()
            .map(|w| {
                let u = opens[w.open];
                (0..n_opens)
                    .filter(|&v| opens[v] & !u == 0 && opens[v] >> w.point & 1 == 1)
                    .map(|v| index[w.point * n_opens + v])
                    .collect()
            })
            .collect();
        Checker {
            model,
            worlds,
            index,
            open_worlds,
            effort_succ,
            memo: HashMap::new(),
        }
    }

    pub fn worlds(&self) -> &[World] {
        &self.worlds
    }

    pub fn world_index(&self, w: World) -> Option<usize> {
        if !self.model.is_world(w) {
            return None;
        }
        let i = self.index[w.point * self.model.space.opens().len() + w.open];
        (i != usize::MAX).then_some(i)
    }

    pub fn truth_set(&mut self, f: &Formula) -> WorldSet {
        if let Some(ts) = self.memo.get(f) {
            return ts.clone();
        }
        use Formula::*;
        let n = self.worlds.len();
        let ts = match f {
            Top => WorldSet::full(n),
            Bot => WorldSet::empty(n),
            Atom(a) => {
                let set = self.model.atom_set(a);
                let mut out = WorldSet::empty(n);
                for (i, w) in self.worlds.iter().enumerate() {
                    if set >> w.point & 1 == 1 {
                        out.insert(i);
                    }
                }
                out
            }
            Not(g) => self.truth_set(g).complement(),
            And(g, h) => {
                let mut out = self.truth_set(g);
                out.intersect_with(&self.truth_set(h));
                out
            }
            Or(g, h) => {
                let mut out = self.truth_set(g);
                out.union_with(&self.truth_set(h));
                out
            }
            Implies(g, h) => {
                let mut out = self.truth_set(g).complement();
                out.union_with(&self.truth_set(h));
                out
            }
            Iff(g, h) => {
                let tg = self.truth_set(g);
                let th = self.truth_set(h);
                let mut out = WorldSet::empty(n);
                for i in 0..n {
                    if tg.contains(i) == th.contains(i) {
                        out.insert(i);
                    }
                }
                out
            }
            K(g) => {
                let tg = self.truth_set(g);
                let mut out = WorldSet::empty(n);
                for ow in &self.open_worlds {
                    if tg.is_superset(ow) {
                        out.union_with(ow);
                    }
                }
                out
            }
            L(g) => {
                let tg = self.truth_set(g);
                let mut out = WorldSet::empty(n);
                for ow in &self.open_worlds {
                    if tg.intersects(ow) {
                        out.union_with(ow);
                    }
                }
                out
            }
            Box(g) => {
                let tg = self.truth_set(g);
                let mut out = WorldSet::empty(n);
                for (i, succ) in self.effort_succ.iter().enumerate() {
                    if succ.iter().all(|&j| tg.contains(j)) {
                        out.insert(i);
                    }
                }
                out
            }
            Dia(g) => {
                let tg = self.truth_set(g);
                let mut out = WorldSet::empty(n);
                for (i, succ) in self.effort_succ.iter().enumerate() {
                    if succ.iter().any(|&j| tg.contains(j)) {
                        out.insert(i);
                    }
                }
                out
            }
        };
        self.memo.insert(f.clone(), ts.clone());
        ts
    }

    /// Index of the least world where `f` fails, in (point, open) order.
    pub fn first_failure(&mut self, f: &Formula) -> Option<usize> {
        let ts = self.truth_set(f);
        (0..self.worlds.len()).find(|&i| !ts.contains(i))
    }
}

/// Truth of `f` at one world. Unknown atoms denote the empty set; a pair
/// that is not a world of the model is an error.
pub fn eval(model: &Model, w: World, f: &Formula) -> Result<bool> {
    let mut checker = Checker::new(model);
    let i = checker.world_index(w).ok_or_else(|| Error::InvalidWorld {
        point: model
            .space
            .points()
            .get(w.point)
            .cloned()
            .unwrap_or_else(|| format!("#{}", w.point)),
        open: w.open,
    })?;
    Ok(checker.truth_set(f).contains(i))
}

/// `None` when valid; otherwise the lexicographically least failing world.
pub fn valid_in_model(model: &Model, f: &Formula) -> Option<World> {
    let mut checker = Checker::new(model);
    checker.first_failure(f).map(|i| checker.worlds()[i])
}

// ---------------------------------------------------------------------------
// schemes
// ---------------------------------------------------------------------------

/// Named formula schemes: the twelve axioms, the two lemmas used by the DNF
/// pipeline, the box/diamond commutation, and the four topological
/// characterizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Axiom(u8),
    LemmaDamand,
    LemmaMain(usize),
    PropBoxdam,
    OpenChar,
    ClosedChar,
    DenseChar,
    NowhereDenseChar,
}

#[derive(Debug, Clone)]
pub struct SchemeInstance {
    pub scheme: Scheme,
    pub substitution: BTreeMap<String, Formula>,
}

impl Scheme {
    pub fn metavariables(&self) -> Vec<String> {
        match self {
            Scheme::Axiom(1) | Scheme::Axiom(12) => {
                vec!["phi".into(), "psi".into(), "chi".into()]
            }
            Scheme::Axiom(3) | Scheme::Axiom(6) | Scheme::LemmaDamand => {
                vec!["phi".into(), "psi".into()]
            }
            Scheme::Axiom(_)
            | Scheme::PropBoxdam
            | Scheme::OpenChar
            | Scheme::ClosedChar
            | Scheme::DenseChar
            | Scheme::NowhereDenseChar => vec!["phi".into()],
            Scheme::LemmaMain(n) => {
                let mut v = vec!["phi".into()];
                v.extend((1..=*n).map(|i| format!("psi{i}")));
                v
            }
        }
    }

    /// Closure under union and/or intersection the scheme's soundness needs:
    /// (needs_union, needs_intersection).
    pub fn closure_requirements(&self) -> (bool, bool) {
        match self {
            Scheme::Axiom(11) => (false, true),
            Scheme::Axiom(12) | Scheme::LemmaMain(_) => (true, true),
            _ => (false, false),
        }
    }

    pub fn instantiate(&self, subst: &BTreeMap<String, Formula>) -> Result<Formula> {
        use formula::{and, bx, dia, iff, implies, k, l, not};
        let get = |name: &str| -> Result<Formula> {
            subst.get(name).cloned().ok_or_else(|| {
                Error::SchemeInstantiation(format!("missing metavariable {name:?}"))
            })
        };
        Ok(match self {
            // representative propositional tautologies (the Hilbert base)
            Scheme::Axiom(1) => {
                let (p, q, r) = (get("phi")?, get("psi")?, get("chi")?);
                and(
                    and(
                        implies(p.clone(), implies(q.clone(), p.clone())),
                        implies(
                            implies(p.clone(), implies(q.clone(), r.clone())),
                            implies(implies(p.clone(), q.clone()), implies(p.clone(), r)),
                        ),
                    ),
                    implies(implies(not(p.clone()), not(q.clone())), implies(q, p)),
                )
            }
            Scheme::Axiom(2) => {
                let p = get("phi")?;
                and(
                    implies(p.clone(), bx(p.clone())),
                    implies(not(p.clone()), bx(not(p))),
                )
            }
            Scheme::Axiom(3) => {
                let (p, q) = (get("phi")?, get("psi")?);
                implies(bx(implies(p.clone(), q.clone())), implies(bx(p), bx(q)))
            }
            Scheme::Axiom(4) => {
                let p = get("phi")?;
                implies(bx(p.clone()), p)
            }
            Scheme::Axiom(5) => {
                let p = get("phi")?;
                implies(bx(p.clone()), bx(bx(p)))
            }
            Scheme::Axiom(6) => {
                let (p, q) = (get("phi")?, get("psi")?);
                implies(k(implies(p.clone(), q.clone())), implies(k(p), k(q)))
            }
            Scheme::Axiom(7) => {
                let p = get("phi")?;
                implies(k(p.clone()), p)
            }
            Scheme::Axiom(8) => {
                let p = get("phi")?;
                implies(k(p.clone()), k(k(p)))
            }
            Scheme::Axiom(9) => {
                let p = get("phi")?;
                implies(p.clone(), k(l(p)))
            }
            Scheme::Axiom(10) => {
                let p = get("phi")?;
                implies(k(bx(p.clone())), bx(k(p)))
            }
            Scheme::Axiom(11) => {
                let p = get("phi")?;
                implies(dia(bx(p.clone())), bx(dia(p)))
            }
            Scheme::Axiom(12) => {
                let (p, q, r) = (get("phi")?, get("psi")?, get("chi")?);
                implies(
                    and(
                        dia(and(k(p.clone()), q.clone())),
                        l(dia(and(k(p.clone()), r.clone()))),
                    ),
                    dia(and(and(k(dia(p)), dia(q)), l(dia(r)))),
                )
            }
            Scheme::Axiom(n) => {
                return Err(Error::SchemeInstantiation(format!(
                    "no axiom numbered {n}"
                )))
            }
            Scheme::LemmaDamand => {
                let (p, q) = (get("phi")?, get("psi")?);
                iff(
                    dia(and(p.clone(), q.clone())),
                    and(dia(p), dia(q)),
                )
            }
            Scheme::LemmaMain(n) => {
                let p = get("phi")?;
                let mut hyp = dia(k(p.clone()));
                let mut concl_ls = Vec::new();
                for i in 1..=*n {
                    let psi = get(&format!("psi{i}"))?;
                    hyp = and(hyp, l(and(dia(k(p.clone())), psi.clone())));
                    concl_ls.push(l(psi));
                }
                let concl = dia(concl_ls.into_iter().fold(k(p), and));
                implies(hyp, concl)
            }
            Scheme::PropBoxdam => {
                let p = get("phi")?;
                implies(bx(dia(p.clone())), dia(bx(p)))
            }
            Scheme::OpenChar => {
                let p = get("phi")?;
                implies(p.clone(), dia(k(p)))
            }
            Scheme::ClosedChar => {
                let p = get("phi")?;
                implies(bx(l(p.clone())), p)
            }
            Scheme::DenseChar => {
                let p = get("phi")?;
                bx(l(p))
            }
            Scheme::NowhereDenseChar => {
                let p = get("phi")?;
                l(dia(k(not(p))))
            }
        })
    }
}

/// Outcome of a scheme check: a closure-precondition violation is reported
/// as its own status, never as a validity verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeOutcome {
    Valid,
    Invalid(World),
    PreconditionViolated(String),
}

pub fn check_scheme(model: &Model, inst: &SchemeInstance) -> Result<SchemeOutcome> {
    let (needs_union, needs_intersection) = inst.scheme.closure_requirements();
    if needs_union && !model.space.is_closed_under_union() {
        return Ok(SchemeOutcome::PreconditionViolated(
            "scheme requires opens closed under union".into(),
        ));
    }
    if needs_intersection && !model.space.is_closed_under_intersection() {
        return Ok(SchemeOutcome::PreconditionViolated(
            "scheme requires opens closed under intersection".into(),
        ));
    }
    let f = inst.scheme.instantiate(&inst.substitution)?;
    Ok(match valid_in_model(model, &f) {
        None => SchemeOutcome::Valid,
        Some(w) => SchemeOutcome::Invalid(w),
    })
}

// ---------------------------------------------------------------------------
// topological characterization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CharFlags {
    pub open: bool,
    pub closed: bool,
    pub dense: bool,
    pub nowhere_dense: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Characterization {
    pub set_based: CharFlags,
    pub formula_based: CharFlags,
}

/// Classifies `i(atom)` set-theoretically and by validity of the
/// corresponding formulas, asserting that the two routes agree.
pub fn characterize(model: &Model, atom: &str) -> Result<Characterization> {
    if !model.space.is_topology() {
        return Err(Error::NotATopology(
            "characterization requires a topological model".into(),
        ));
    }
    let set = model.atom_set(atom);
    let space = &model.space;
    let full = space.full_set();
    let set_based = CharFlags {
        open: space.opens().contains(&set),
        closed: space.opens().contains(&(full & !set)),
        dense: space.closure(set)? == full,
        nowhere_dense: space.interior(space.closure(set)?)? == 0,
    };
    let subst: BTreeMap<String, Formula> =
        [("phi".to_string(), formula::atom(atom))].into_iter().collect();
    let valid = |scheme: Scheme| -> Result<bool> {
        let f = scheme.instantiate(&subst)?;
        Ok(valid_in_model(model, &f).is_none())
    };
    let formula_based = CharFlags {
        open: valid(Scheme::OpenChar)?,
        closed: valid(Scheme::ClosedChar)?,
        dense: valid(Scheme::DenseChar)?,
        nowhere_dense: valid(Scheme::NowhereDenseChar)?,
    };
    if set_based != formula_based {
        return Err(Error::CharacterizationMismatch {
            atom: atom.to_string(),
            set_based: format!("{set_based:?}"),
            formula_based: format!("{formula_based:?}"),
        });
    }
    Ok(Characterization {
        set_based,
        formula_based,
    })
}
