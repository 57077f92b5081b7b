//! Finite powerset Boolean algebras with an interior operator and a
//! universal quantifier, the FMA/GMA laws, algebraic valuations, and the
//! complex algebra of a model. Every finite Boolean algebra is a powerset
//! algebra, so the carrier is always the subsets of `atom_count` atoms,
//! encoded as bitmasks.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::frames::subset_frame;
use crate::space::{Model, World};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Carrier is 2^atoms; table validation is quadratic in the carrier.
pub const MAX_ALGEBRA_ATOMS: usize = 12;
/// Fallback cap for the cubic GMA law loop.
const GMA_FULL_LOOP_CARRIER_CAP: usize = 1 << 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadicAlgebra {
    atom_count: usize,
    interior: Vec<u64>,
    forall: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    atoms: usize,
    interior: Vec<u64>,
    forall: Vec<u64>,
}

impl MonadicAlgebra {
    /// Validates the interior laws (I(a∧b)=Ia∧Ib, Ia≤a, IIa=Ia, I1=1) and
    /// the quantifier laws (∀(a∨∀b)=∀a∨∀b, ∀a≤a, ∀1=1).
    pub fn new(atom_count: usize, interior: Vec<u64>, forall: Vec<u64>) -> Result<MonadicAlgebra> {
        if atom_count == 0 || atom_count > MAX_ALGEBRA_ATOMS {
            return Err(Error::InvalidAlgebra(format!(
                "atom count must be 1..={MAX_ALGEBRA_ATOMS}, got {atom_count}"
            )));
        }
        let carrier = 1usize << atom_count;
        let one = (carrier - 1) as u64;
        if interior.len() != carrier || forall.len() != carrier {
            return Err(Error::InvalidAlgebra(format!(
                "operator tables must have {carrier} entries"
            )));
        }
        if interior.iter().chain(&forall).any(|&v| v > one) {
            return Err(Error::InvalidAlgebra("table value outside the carrier".into()));
        }
        if interior[one as usize] != one {
            return Err(Error::InvalidAlgebra("I1 ≠ 1".into()));
        }
        if forall[one as usize] != one {
            return Err(Error::InvalidAlgebra("∀1 ≠ 1".into()));
        }
        for a in 0..carrier as u64 {
            let ia = interior[a as usize];
            if ia & !a != 0 {
                return Err(Error::InvalidAlgebra(format!("I{a:#b} ≰ {a:#b}")));
            }
            if interior[ia as usize] != ia {
                return Err(Error::InvalidAlgebra(format!("II{a:#b} ≠ I{a:#b}")));
            }
            let fa = forall[a as usize];
            if fa & !a != 0 {
                return Err(Error::InvalidAlgebra(format!("∀{a:#b} ≰ {a:#b}")));
            }
        }
        for a in 0..carrier as u64 {
            for b in 0..carrier as u64 {
                if interior[(a & b) as usize] != interior[a as usize] & interior[b as usize] {
                    return Err(Error::InvalidAlgebra(format!(
                        "I({a:#b}∧{b:#b}) ≠ I{a:#b}∧I{b:#b}"
                    )));
                }
                let fb = forall[b as usize];
                if forall[(a | fb) as usize] != forall[a as usize] | fb {
                    return Err(Error::InvalidAlgebra(format!(
                        "∀({a:#b}∨∀{b:#b}) ≠ ∀{a:#b}∨∀{b:#b}"
                    )));
                }
            }
        }
        Ok(MonadicAlgebra {
            atom_count,
            interior,
            forall,
        })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn carrier_size(&self) -> usize {
        1 << self.atom_count
    }

    pub fn one(&self) -> u64 {
        (self.carrier_size() - 1) as u64
    }

    pub fn complement(&self, a: u64) -> u64 {
        !a & self.one()
    }

    pub fn interior(&self, a: u64) -> u64 {
        self.interior[a as usize]
    }

    /// C = −I−.
    pub fn closure(&self, a: u64) -> u64 {
        self.complement(self.interior(self.complement(a)))
    }

    pub fn forall(&self, a: u64) -> u64 {
        self.forall[a as usize]
    }

    /// ∃ = −∀−.
    pub fn exists(&self, a: u64) -> u64 {
        self.complement(self.forall(self.complement(a)))
    }

    /// Fixed points of both I and C.
    pub fn is_biopen(&self, a: u64) -> bool {
        self.interior(a) == a && self.closure(a) == a
    }

    pub fn from_json(text: &str) -> Result<MonadicAlgebra> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        MonadicAlgebra::new(file.atoms, file.interior, file.forall)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&AlgebraFile {
            atoms: self.atom_count,
            interior: self.interior.clone(),
            forall: self.forall.clone(),
        })
        .expect("algebra serializes")
    }
}

/// ∀Ia ≤ I∀a for every element — the algebraic reading of the
/// knowledge/effort commutation K□φ→□Kφ. (The opposite inequality fails
/// already in the complex algebra of a two-point chain.)
pub fn check_fma(alg: &MonadicAlgebra) -> bool {
    (0..alg.carrier_size() as u64)
        .all(|a| alg.forall(alg.interior(a)) & !alg.interior(alg.forall(a)) == 0)
}

fn is_additive(alg: &MonadicAlgebra, op: impl Fn(u64) -> u64) -> bool {
    if op(0) != 0 {
        return false;
    }
    (0..alg.carrier_size() as u64).all(|a| {
        let by_atoms = (0..alg.atom_count)
            .filter(|&i| a >> i & 1 == 1)
            .fold(0u64, |acc, i| acc | op(1 << i));
        op(a) == by_atoms
    })
}

fn gma_triple_holds(alg: &MonadicAlgebra, a: u64, b: u64, c: u64) -> bool {
    let fa = alg.forall(a);
    let lhs = alg.closure(fa & b) & alg.exists(alg.closure(fa & c));
    let rhs = alg.closure(alg.forall(alg.closure(a)) & alg.closure(b) & alg.exists(alg.closure(c)));
    lhs & !rhs == 0
}

/// FMA plus CIa = ICa and C(∀a∧b) ∧ ∃C(∀a∧c) ≤ C(∀Ca ∧ Cb ∧ ∃Cc).
///
/// When C and ∃ are completely additive (always the case for complex
/// algebras), the left side is additive in b and c and the right side is
/// monotone, so b and c only need to range over the atoms; otherwise the
/// full cubic loop runs, capped by carrier size.
pub fn check_gma(alg: &MonadicAlgebra) -> Result<bool> {
    if !check_fma(alg) {
        return Ok(false);
    }
    let carrier = alg.carrier_size() as u64;
    for a in 0..carrier {
        if alg.closure(alg.interior(a)) != alg.interior(alg.closure(a)) {
            return Ok(false);
        }
    }
    if is_additive(alg, |x| alg.closure(x)) && is_additive(alg, |x| alg.exists(x)) {
        for a in 0..carrier {
            for bi in 0..alg.atom_count {
                for ci in 0..alg.atom_count {
                    if !gma_triple_holds(alg, a, 1 << bi, 1 << ci) {
                        return Ok(false);
                    }
                }
            }
        }
        return Ok(true);
    }
    if alg.carrier_size() > GMA_FULL_LOOP_CARRIER_CAP {
        return Err(Error::CapExceeded(format!(
            "GMA triple loop needs carrier ≤ {GMA_FULL_LOOP_CARRIER_CAP} when closure or \
             existential is not additive"
        )));
    }
    for a in 0..carrier {
        for b in 0..carrier {
            for c in 0..carrier {
                if !gma_triple_holds(alg, a, b, c) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The powerset algebra over the model's worlds, with I reading the effort
/// relation and ∀ the knowledge relation of the subset frame. Also returns
/// the world behind each algebra atom, in atom order.
pub fn complex_algebra(model: &Model) -> Result<(MonadicAlgebra, Vec<World>)> {
    let (frame, worlds) = subset_frame(&model.space)?;
    let n = frame.world_count();
    if n > MAX_ALGEBRA_ATOMS {
        return Err(Error::CapExceeded(format!(
            "complex algebra needs ≤ {MAX_ALGEBRA_ATOMS} worlds, model has {n}"
        )));
    }
    let carrier = 1usize << n;
    let mut interior = vec![0u64; carrier];
    let mut forall = vec![0u64; carrier];
    for a in 0..carrier as u64 {
        for w in 0..n {
            if frame.effort_succ(w) & !a == 0 {
                interior[a as usize] |= 1 << w;
            }
            if frame.knowledge_succ(w) & !a == 0 {
                forall[a as usize] |= 1 << w;
            }
        }
    }
    Ok((MonadicAlgebra::new(n, interior, forall)?, worlds))
}

/// Atom values must be fixed points of both I and C.
pub type AlgValuation = BTreeMap<String, u64>;

/// Structural evaluation: ∧ is meet, ¬ complement, □ interior, K the
/// quantifier; the duals go through −·−. A formula is algebra-valid when
/// the result is 1 (the full element).
pub fn alg_eval(alg: &MonadicAlgebra, v: &AlgValuation, f: &Formula) -> Result<u64> {
    for (name, &val) in v {
        if val > alg.one() {
            return Err(Error::InvalidAlgebra(format!(
                "valuation of {name} outside the carrier"
            )));
        }
        if !alg.is_biopen(val) {
            return Err(Error::ValuationNotClopen(name.clone()));
        }
    }
    fn go(alg: &MonadicAlgebra, v: &AlgValuation, f: &Formula) -> u64 {
        use Formula::*;
        match f {
            Top => alg.one(),
            Bot => 0,
            Atom(a) => v.get(a).copied().unwrap_or(0),
            Not(g) => alg.complement(go(alg, v, g)),
            And(a, b) => go(alg, v, a) & go(alg, v, b),
            Or(a, b) => go(alg, v, a) | go(alg, v, b),
            Implies(a, b) => alg.complement(go(alg, v, a)) | go(alg, v, b),
            Iff(a, b) => {
                let x = go(alg, v, a);
                let y = go(alg, v, b);
                alg.complement(x ^ y)
            }
            K(g) => alg.forall(go(alg, v, g)),
            L(g) => alg.exists(go(alg, v, g)),
            Box(g) => alg.interior(go(alg, v, g)),
            Dia(g) => alg.closure(go(alg, v, g)),
        }
    }
    Ok(go(alg, v, f))
}

/// Lifts a model valuation to world sets of the complex algebra.
pub fn lift_valuation(model: &Model, worlds: &[World]) -> AlgValuation {
    model
        .valuation()
        .iter()
        .map(|(a, &mask)| {
            let wmask = worlds
                .iter()
                .enumerate()
                .filter(|(_, w)| mask >> w.point & 1 == 1)
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            (a.clone(), wmask)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, parse};
    use crate::semantics::{eval, Scheme};
    use crate::space::SubsetSpace;

    fn identity_algebra(n: usize) -> MonadicAlgebra {
        let carrier = 1u64 << n;
        let table: Vec<u64> = (0..carrier).collect();
        MonadicAlgebra::new(n, table.clone(), table).unwrap()
    }

    fn chain_model() -> Model {
        let space = SubsetSpace::new(vec!["a".into(), "b".into()], vec![0b00, 0b01, 0b11]).unwrap();
        Model::new(space, [("A".to_string(), 0b01u64)].into_iter().collect()).unwrap()
    }

    #[test]
    fn identity_algebras_are_gma() {
        for n in [1, 2] {
            let alg = identity_algebra(n);
            assert!(check_fma(&alg));
            assert!(check_gma(&alg).unwrap());
        }
    }

    #[test]
    fn table_validation() {
        // Ia ≰ a
        assert!(MonadicAlgebra::new(1, vec![1, 1], vec![0, 1]).is_err());
        // I1 ≠ 1
        assert!(MonadicAlgebra::new(1, vec![0, 0], vec![0, 1]).is_err());
        // wrong length
        assert!(MonadicAlgebra::new(2, vec![0, 1], vec![0, 1]).is_err());
    }

    #[test]
    fn single_world_complex_algebra() {
        let space = SubsetSpace::new(vec!["p".into()], vec![0b1]).unwrap();
        let m = Model::new(space, BTreeMap::new()).unwrap();
        let (alg, _) = complex_algebra(&m).unwrap();
        assert_eq!(alg.carrier_size(), 2);
        assert_eq!(alg.interior(0), 0);
        assert_eq!(alg.interior(1), 1);
        assert_eq!(alg.forall(0), 0);
        assert_eq!(alg.forall(1), 1);
    }

    #[test]
    fn chain_complex_algebra_goldens() {
        // worlds in (point, open) order: (a,{a}), (a,{a,b}), (b,{a,b})
        let (alg, worlds) = complex_algebra(&chain_model()).unwrap();
        assert_eq!(alg.carrier_size(), 8);
        assert_eq!(
            worlds,
            vec![
                World { point: 0, open: 1 },
                World { point: 0, open: 2 },
                World { point: 1, open: 2 }
            ]
        );
        let i_table: Vec<u64> = (0..8).map(|a| alg.interior(a)).collect();
        let f_table: Vec<u64> = (0..8).map(|a| alg.forall(a)).collect();
        assert_eq!(i_table, vec![0, 1, 0, 3, 4, 5, 4, 7]);
        assert_eq!(f_table, vec![0, 1, 0, 1, 0, 1, 6, 7]);
        assert!(check_gma(&alg).unwrap());
    }

    #[test]
    fn shared_class_forall_collapses() {
        // two worlds, knowledge total, effort identity
        let space = SubsetSpace::new(vec!["x1".into(), "x2".into()], vec![0b00, 0b11]).unwrap();
        let m = Model::new(space, BTreeMap::new()).unwrap();
        let (alg, _) = complex_algebra(&m).unwrap();
        assert_eq!(alg.forall(0b11), 0b11);
        assert_eq!(alg.forall(0b01), 0);
        assert_eq!(alg.forall(0b10), 0);
    }

    #[test]
    fn atoms_are_biopen() {
        let m = chain_model();
        let (alg, worlds) = complex_algebra(&m).unwrap();
        for (_, &wmask) in &lift_valuation(&m, &worlds) {
            assert!(alg.is_biopen(wmask));
        }
    }

    #[test]
    fn alg_eval_matches_semantic_eval() {
        let m = chain_model();
        let (alg, worlds) = complex_algebra(&m).unwrap();
        let v = lift_valuation(&m, &worlds);
        for s in [
            "top", "A", "~A", "K A", "[] A", "<> K A", "L ~A", "A & K A",
            "[] L A -> A", "K [] A -> [] K A",
        ] {
            let f = parse(s).unwrap();
            let result = alg_eval(&alg, &v, &f).unwrap();
            for (i, w) in worlds.iter().enumerate() {
                assert_eq!(
                    result >> i & 1 == 1,
                    eval(&m, *w, &f).unwrap(),
                    "{s} at {w:?}"
                );
            }
        }
    }

    #[test]
    fn axioms_evaluate_to_one() {
        let m = chain_model();
        let (alg, worlds) = complex_algebra(&m).unwrap();
        let v = lift_valuation(&m, &worlds);
        for i in 1..=12u8 {
            let subst: BTreeMap<String, Formula> = [
                ("phi".to_string(), atom("A")),
                ("psi".to_string(), atom("A")),
                ("chi".to_string(), atom("A")),
            ]
            .into_iter()
            .collect();
            let f = Scheme::Axiom(i).instantiate(&subst).unwrap();
            assert_eq!(alg_eval(&alg, &v, &f).unwrap(), alg.one(), "axiom {i}");
        }
    }

    #[test]
    fn valuation_must_be_biopen() {
        let m = chain_model();
        let (alg, _) = complex_algebra(&m).unwrap();
        // {w0} is open but not closed in the chain algebra
        let v: AlgValuation = [("A".to_string(), 0b001u64)].into_iter().collect();
        assert!(matches!(
            alg_eval(&alg, &v, &atom("A")),
            Err(Error::ValuationNotClopen(_))
        ));
    }

    #[test]
    fn algebra_json_roundtrip() {
        let alg = identity_algebra(2);
        let back = MonadicAlgebra::from_json(&alg.to_json()).unwrap();
        assert_eq!(alg, back);
    }
}
