//! Prime and disjunctive normal forms. A prime block is ψ ∧ Kψ′ ∧ ⋀ᵢ Lψᵢ
//! with every component in the K/□-free fragment (closed under ∧, ¬ and
//! ◇K); a DNF is a disjunction of prime blocks. The rewriting below relies
//! on that fragment being bi-persistent, which lets the open-global parts
//! Kψ′ and Lψᵢ be pulled through the modalities; every output is re-checked
//! for semantic equivalence with the input by bounded search, and an
//! unverified form is never returned.

use crate::decide::{decide_valid, SearchBudget, Verdict};
use crate::error::{Error, Result};
use crate::formula::{self, Formula};
use serde::Serialize;

/// Subset cap for expanding K over a disjunction (2^cap candidate blocks).
const K_EXPANSION_CAP: usize = 12;
/// Cap on the number of blocks at any intermediate step.
const BLOCK_CAP: usize = 4096;
/// Cap on total blocks produced over the whole rewrite.
const STEP_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnfBlock {
    pub base: Formula,
    pub known: Formula,
    pub possibles: Vec<Formula>,
}

impl PnfBlock {
    pub fn render(&self) -> Formula {
        let mut f = formula::and(self.base.clone(), formula::k(self.known.clone()));
        for p in &self.possibles {
            f = formula::and(f, formula::l(p.clone()));
        }
        f
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dnf {
    pub blocks: Vec<PnfBlock>,
}

impl Dnf {
    pub fn render(&self) -> Formula {
        assert!(!self.blocks.is_empty(), "a DNF has at least one block");
        formula::or_all(self.blocks.iter().map(PnfBlock::render))
    }
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PersistenceClass {
    BiPersistent,
    Persistent,
    AntiPersistent,
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct PersistenceReport {
    pub class: PersistenceClass,
    /// Syntactic sufficient condition for bi-persistence.
    pub syntactically_l_prime: bool,
    pub max_points: usize,
}

/// Classifies `f` by bounded validity of f→□f and ◇f→f.
pub fn persistence_class(f: &Formula, budget: &SearchBudget) -> Result<PersistenceReport> {
    let persistent = matches!(
        decide_valid(
            &formula::implies(f.clone(), formula::bx(f.clone())),
            budget
        )?,
        Verdict::ValidUpToBound { .. }
    );
    let anti = matches!(
        decide_valid(
            &formula::implies(formula::dia(f.clone()), f.clone()),
            budget
        )?,
        Verdict::ValidUpToBound { .. }
    );
    let class = match (persistent, anti) {
        (true, true) => PersistenceClass::BiPersistent,
        (true, false) => PersistenceClass::Persistent,
        (false, true) => PersistenceClass::AntiPersistent,
        (false, false) => PersistenceClass::None,
    };
    Ok(PersistenceReport {
        class,
        syntactically_l_prime: f.in_l_prime(),
        max_points: budget.max_points,
    })
}

// ---------------------------------------------------------------------------
// rewriting
// ---------------------------------------------------------------------------

struct Rewriter {
    trace: Vec<String>,
    produced: usize,
}

/// Constant folding within the prime fragment.
fn simp(f: Formula) -> Formula {
    use Formula::*;
    match f {
        Not(g) => match simp(*g) {
            Top => Bot,
            Bot => Top,
            Not(h) => *h,
            h => formula::not(h),
        },
        And(a, b) => match (simp(*a), simp(*b)) {
            (Top, h) | (h, Top) => h,
            (Bot, _) | (_, Bot) => Bot,
            (g, h) if g == h => g,
            (g, Not(h)) if g == *h => Bot,
            (Not(g), h) if *g == h => Bot,
            (g, h) => formula::and(g, h),
        },
        Dia(g) => match simp(*g) {
            K(h) => match *h {
                Top => Top,
                Bot => Bot,
                h => formula::dia(formula::k(h)),
            },
            h => formula::dia(h),
        },
        K(g) => formula::k(simp(*g)),
        other => other,
    }
}

/// Disjunction within the prime fragment (Or is not in it).
fn lor(a: Formula, b: Formula) -> Formula {
    simp(formula::not(formula::and(formula::not(a), formula::not(b))))
}

impl Rewriter {
    fn fail(&self, message: &str) -> Error {
        Error::RewriteLimit {
            message: message.into(),
            trace: self.trace.join("\n"),
        }
    }

    fn charge(&mut self, n: usize, what: &str) -> Result<()> {
        self.produced += n;
        if self.produced > STEP_CAP {
            return Err(self.fail(&format!("step cap exceeded at {what}")));
        }
        Ok(())
    }

    /// Drops refuted blocks (⊥ base, K⊥, or an L⊥ conjunct), folds away
    /// L⊤ conjuncts, and dedups.
    fn normalize(&self, mut blocks: Vec<PnfBlock>) -> Result<Vec<PnfBlock>> {
        let mut out: Vec<PnfBlock> = Vec::new();
        for mut b in blocks.drain(..) {
            b.base = simp(b.base);
            b.known = simp(b.known);
            if b.base == Formula::Bot || b.known == Formula::Bot {
                continue;
            }
            let mut ps: Vec<Formula> = b
                .possibles
                .into_iter()
                .map(simp)
                .filter(|p| *p != Formula::Top)
                .collect();
            if ps.contains(&Formula::Bot) {
                continue;
            }
            ps.sort();
            ps.dedup();
            b.possibles = ps;
            debug_assert!(
                b.base.in_l_prime()
                    && b.known.in_l_prime()
                    && b.possibles.iter().all(Formula::in_l_prime)
            );
            if !out.contains(&b) {
                out.push(b);
            }
        }
        if out.len() > BLOCK_CAP {
            return Err(self.fail("block cap exceeded"));
        }
        Ok(out)
    }

    fn conj_block(a: &PnfBlock, b: &PnfBlock) -> PnfBlock {
        PnfBlock {
            base: formula::and(a.base.clone(), b.base.clone()),
            known: formula::and(a.known.clone(), b.known.clone()),
            possibles: a
                .possibles
                .iter()
                .chain(&b.possibles)
                .cloned()
                .collect(),
        }
    }

    fn conj(&mut self, xs: &[PnfBlock], ys: &[PnfBlock]) -> Result<Vec<PnfBlock>> {
        self.charge(xs.len() * ys.len(), "conjunction product")?;
        let prod = xs
            .iter()
            .flat_map(|a| ys.iter().map(move |b| Self::conj_block(a, b)))
            .collect();
        self.normalize(prod)
    }

    /// ¬(ψ ∧ Kk ∧ ⋀Lpᵢ) = ¬ψ ∨ L¬k ∨ ⋁ᵢK¬pᵢ.
    fn neg_block(b: &PnfBlock) -> Vec<PnfBlock> {
        let mut out = vec![
            PnfBlock {
                base: formula::not(b.base.clone()),
                known: Formula::Top,
                possibles: vec![],
            },
            PnfBlock {
                base: Formula::Top,
                known: Formula::Top,
                possibles: vec![formula::not(b.known.clone())],
            },
        ];
        for p in &b.possibles {
            out.push(PnfBlock {
                base: Formula::Top,
                known: formula::not(p.clone()),
                possibles: vec![],
            });
        }
        out
    }

    fn neg(&mut self, blocks: &[PnfBlock]) -> Result<Vec<PnfBlock>> {
        self.trace
            .push(format!("negate {} block(s)", blocks.len()));
        let mut acc = vec![PnfBlock {
            base: Formula::Top,
            known: Formula::Top,
            possibles: vec![],
        }];
        for b in blocks {
            let nb = self.normalize(Self::neg_block(b))?;
            acc = self.conj(&acc, &nb)?;
        }
        if acc.is_empty() {
            acc = vec![falsum_block()];
        }
        Ok(acc)
    }

    /// K over a disjunction of blocks: the open-global parts Kkᵢ and Lpᵢⱼ
    /// are constant across the current open, so K(⋁ᵢ bᵢ∧gᵢ) is the
    /// disjunction, over nonempty T, of ⋀_{i∈T}gᵢ ∧ K(⋁_{i∈T}bᵢ).
    fn k_expand(&mut self, blocks: &[PnfBlock]) -> Result<Vec<PnfBlock>> {
        if blocks.len() > K_EXPANSION_CAP {
            return Err(self.fail(&format!(
                "K over {} disjuncts exceeds the expansion cap {K_EXPANSION_CAP}",
                blocks.len()
            )));
        }
        self.trace.push(format!("K-expand {} block(s)", blocks.len()));
        self.charge(1 << blocks.len(), "K expansion")?;
        let mut out = Vec::new();
        for t in 1u32..1 << blocks.len() {
            let mut known = Formula::Top;
            let mut possibles = Vec::new();
            let mut bases: Option<Formula> = None;
            for (i, b) in blocks.iter().enumerate() {
                if t >> i & 1 != 1 {
                    continue;
                }
                known = formula::and(known, b.known.clone());
                possibles.extend(b.possibles.iter().cloned());
                bases = Some(match bases {
                    None => b.base.clone(),
                    Some(acc) => lor(acc, b.base.clone()),
                });
            }
            out.push(PnfBlock {
                base: Formula::Top,
                known: formula::and(known, bases.expect("nonempty subset")),
                possibles,
            });
        }
        self.normalize(out)
    }

    /// L over a disjunction: L(bᵢ∧gᵢ) = gᵢ ∧ Lbᵢ, blockwise.
    fn l_expand(&mut self, blocks: &[PnfBlock]) -> Result<Vec<PnfBlock>> {
        self.charge(blocks.len(), "L expansion")?;
        let out = blocks
            .iter()
            .map(|b| {
                let mut possibles = b.possibles.clone();
                possibles.push(b.base.clone());
                PnfBlock {
                    base: Formula::Top,
                    known: b.known.clone(),
                    possibles,
                }
            })
            .collect();
        self.normalize(out)
    }

    /// ◇(ψ ∧ Kk ∧ ⋀Lpᵢ) = ψ ∧ ◇Kk ∧ ⋀L(◇Kk ∧ pᵢ): the forward direction
    /// uses bi-persistence of the components, the converse is the union
    /// lemma generalizing the union axiom.
    fn dia_expand(&mut self, blocks: &[PnfBlock]) -> Result<Vec<PnfBlock>> {
        self.charge(blocks.len(), "dia expansion")?;
        let out = blocks
            .iter()
            .map(|b| {
                let dk = formula::dia(formula::k(b.known.clone()));
                PnfBlock {
                    base: formula::and(b.base.clone(), dk.clone()),
                    known: Formula::Top,
                    possibles: b
                        .possibles
                        .iter()
                        .map(|p| formula::and(dk.clone(), p.clone()))
                        .collect(),
                }
            })
            .collect();
        self.normalize(out)
    }

    fn rewrite(&mut self, f: &Formula) -> Result<Vec<PnfBlock>> {
        use Formula::*;
        let blocks = match f {
            Atom(_) | Top | Bot => self.normalize(vec![PnfBlock {
                base: f.clone(),
                known: Formula::Top,
                possibles: vec![],
            }])?,
            Not(g) => {
                let inner = self.rewrite(g)?;
                self.neg(&inner)?
            }
            And(a, b) => {
                let xa = self.rewrite(a)?;
                let xb = self.rewrite(b)?;
                self.conj(&xa, &xb)?
            }
            Or(a, b) => {
                let mut xa = self.rewrite(a)?;
                let xb = self.rewrite(b)?;
                xa.extend(xb);
                self.normalize(xa)?
            }
            Implies(a, b) => {
                let g = formula::or(formula::not((**a).clone()), (**b).clone());
                self.rewrite(&g)?
            }
            Iff(a, b) => {
                let g = formula::and(
                    formula::or(formula::not((**a).clone()), (**b).clone()),
                    formula::or(formula::not((**b).clone()), (**a).clone()),
                );
                self.rewrite(&g)?
            }
            K(g) => {
                let inner = self.rewrite(g)?;
                self.k_expand(&inner)?
            }
            L(g) => {
                let inner = self.rewrite(g)?;
                self.l_expand(&inner)?
            }
            Dia(g) => {
                let inner = self.rewrite(g)?;
                self.dia_expand(&inner)?
            }
            Box(g) => {
                let dual = formula::dia(formula::not((**g).clone()));
                let inner = self.rewrite(&dual)?;
                self.neg(&inner)?
            }
        };
        self.trace
            .push(format!("{f}  =>  {} block(s)", blocks.len().max(1)));
        Ok(blocks)
    }
}

fn falsum_block() -> PnfBlock {
    PnfBlock {
        base: Formula::Bot,
        known: Formula::Top,
        possibles: vec![],
    }
}

/// Rewrites `f` into DNF and verifies the equivalence by bounded search
/// over the budget's space class; a form that fails verification is never
/// returned. Also yields the rewrite trace.
pub fn to_dnf_traced(f: &Formula, verify: &SearchBudget) -> Result<(Dnf, Vec<String>)> {
    let mut rw = Rewriter {
        trace: Vec::new(),
        produced: 0,
    };
    let mut blocks = rw.rewrite(f)?;
    if blocks.is_empty() {
        blocks.push(falsum_block());
    }
    let dnf = Dnf { blocks };
    let rendered = dnf.render();
    assert!(rendered.is_dnf(), "rendered form must be syntactic DNF");
    match decide_valid(&formula::iff(f.clone(), rendered.clone()), verify)? {
        Verdict::ValidUpToBound { .. } => Ok((dnf, rw.trace)),
        Verdict::Countermodel { model, world, .. } => Err(Error::DnfVerificationFailed(format!(
            "{f} and {rendered} differ at world {world:?} of model with opens {:?}",
            model.space.opens()
        ))),
        v => Err(Error::DnfVerificationFailed(format!(
            "unexpected verification verdict {v:?}"
        ))),
    }
}

pub fn to_dnf(f: &Formula, verify: &SearchBudget) -> Result<Dnf> {
    to_dnf_traced(f, verify).map(|(d, _)| d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    fn verify_budget() -> SearchBudget {
        SearchBudget {
            max_points: 3,
            ..SearchBudget::default()
        }
    }

    #[test]
    fn persistence_examples() {
        let b = verify_budget();
        let r = persistence_class(&parse("A").unwrap(), &b).unwrap();
        assert_eq!(r.class, PersistenceClass::BiPersistent);
        assert!(r.syntactically_l_prime);

        let r = persistence_class(&parse("K A").unwrap(), &b).unwrap();
        assert_eq!(r.class, PersistenceClass::Persistent);

        let r = persistence_class(&parse("L A").unwrap(), &b).unwrap();
        assert_eq!(r.class, PersistenceClass::AntiPersistent);
    }

    #[test]
    fn l_prime_depth_bounded_bi_persistence() {
        let b = verify_budget();
        for s in ["~A", "A & B", "<> K A", "<> K (A & ~B)", "~<> K ~A"] {
            let f = parse(s).unwrap();
            assert!(f.in_l_prime(), "{s}");
            assert_eq!(
                persistence_class(&f, &b).unwrap().class,
                PersistenceClass::BiPersistent,
                "{s}"
            );
        }
    }

    #[test]
    fn dnf_pnf_passthrough() {
        let (d, _) = to_dnf_traced(&parse("A & K B & L C").unwrap(), &verify_budget()).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].base, parse("A").unwrap());
        assert_eq!(d.blocks[0].known, parse("B").unwrap());
        assert_eq!(d.blocks[0].possibles, vec![parse("C").unwrap()]);
    }

    #[test]
    fn dnf_disjunction_of_knowledge() {
        let d = to_dnf(&parse("K A | K B").unwrap(), &verify_budget()).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert!(d.render().is_dnf());
    }

    #[test]
    fn dnf_box_of_atom_is_atom() {
        let d = to_dnf(&parse("[] A").unwrap(), &verify_budget()).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].base, parse("A").unwrap());
        assert_eq!(d.blocks[0].known, Formula::Top);
        assert!(d.blocks[0].possibles.is_empty());
    }

    #[test]
    fn dnf_verified_on_modal_mixture() {
        let cases = [
            "K (A | B)",
            "<> (A & K B)",
            "[] L A -> A",
            "~K A",
            "L (A & <> K B)",
            "[] <> A",
            "K A & (L B | ~A)",
            "A <-> K A",
        ];
        for s in cases {
            let d = to_dnf(&parse(s).unwrap(), &verify_budget()).unwrap();
            assert!(d.render().is_dnf(), "{s}");
        }
    }

    #[test]
    fn contradiction_renders_as_falsum_block() {
        let d = to_dnf(&parse("A & ~A").unwrap(), &verify_budget()).unwrap();
        assert_eq!(d.blocks, vec![falsum_block()]);
    }
}
