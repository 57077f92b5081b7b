//! Acceptance gate: one test per criterion, each printing a PASS line with
//! the volume of evidence it checked. All bounds and seeds are pinned here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use topologic::algebra::{alg_eval, check_gma, complex_algebra, lift_valuation};
use topologic::decide::{decide_valid, enumerate_spaces, SearchBudget, SpaceClass, Verdict};
use topologic::formula::{self, Formula};
use topologic::frames::{check_conditions, frame_to_space, subset_frame, ConditionStatus};
use topologic::normalform::to_dnf;
use topologic::semantics::{eval, Checker, Scheme};
use topologic::space::{full_mask, Model, SubsetSpace};
use topologic::splitting::{
    build_stable_splittings, finitize, is_stable_for, quotient_points, restrict_to_basis,
    Splitting,
};

const SEED: u64 = 0x5eed_701_0616c; // pinned; all randomness below derives from it

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream)
}

/// All topological spaces with up to `n` points.
fn all_topologies(max_points: usize) -> Vec<SubsetSpace> {
    (1..=max_points)
        .flat_map(|n| enumerate_spaces(n, SpaceClass::Topology).unwrap())
        .collect()
}

/// Every valuation of `atoms` over the space's points.
fn all_models(space: &SubsetSpace, atoms: &[&str]) -> Vec<Model> {
    let n = space.point_count();
    let n_vals = 1u64 << n;
    let mut out = Vec::new();
    let mut masks = vec![0u64; atoms.len()];
    loop {
        let valuation: BTreeMap<String, u64> = atoms
            .iter()
            .map(|a| a.to_string())
            .zip(masks.iter().copied())
            .collect();
        out.push(Model::new(space.clone(), valuation).unwrap());
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
    out
}

fn random_topology(rng: &mut ChaCha8Rng, max_points: usize) -> SubsetSpace {
    let n = rng.gen_range(1..=max_points);
    let full = full_mask(n);
    let mut opens: Vec<u64> = (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(0..=full)).collect();
    opens.push(full);
    opens.sort_unstable();
    opens.dedup();
    let points = (0..n).map(|i| format!("p{i}")).collect();
    SubsetSpace::new(points, opens)
        .unwrap()
        .close_under(true, true, true)
}

fn random_lattice_model(rng: &mut ChaCha8Rng, n: usize, atoms: &[&str]) -> Model {
    let full = full_mask(n);
    let mut opens: Vec<u64> = (0..rng.gen_range(0..=4)).map(|_| rng.gen_range(0..=full)).collect();
    opens.push(full);
    opens.sort_unstable();
    opens.dedup();
    let points = (0..n).map(|i| format!("p{i}")).collect();
    // close under union and intersection, X present; ∅ only if generated
    let space = SubsetSpace::new(points, opens)
        .unwrap()
        .close_under(true, true, false);
    let valuation = atoms
        .iter()
        .map(|a| (a.to_string(), rng.gen_range(0..=full)))
        .collect();
    Model::new(space, valuation).unwrap()
}

fn random_valuation(rng: &mut ChaCha8Rng, space: &SubsetSpace, atoms: &[&str]) -> Model {
    let full = space.full_set();
    let valuation = atoms
        .iter()
        .map(|a| (a.to_string(), rng.gen_range(0..=full)))
        .collect();
    Model::new(space.clone(), valuation).unwrap()
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => formula::atom("A"),
            1 => formula::atom("B"),
            2 => Formula::Top,
            _ => formula::atom("A"),
        };
    }
    match rng.gen_range(0..9) {
        0 => formula::not(random_formula(rng, depth - 1)),
        1 => formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        2 => formula::or(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        3 => formula::implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        4 => formula::k(random_formula(rng, depth - 1)),
        5 => formula::l(random_formula(rng, depth - 1)),
        6 => formula::bx(random_formula(rng, depth - 1)),
        7 => formula::dia(random_formula(rng, depth - 1)),
        _ => random_formula(rng, depth - 1),
    }
}

/// Every axiom instance over the depth-≤1 prime-fragment substitution pool.
fn axiom_instances() -> Vec<(u8, Formula)> {
    let pool: Vec<Formula> = vec![
        Formula::Top,
        Formula::Bot,
        formula::atom("A"),
        formula::atom("B"),
        formula::not(formula::atom("A")),
        formula::not(formula::atom("B")),
        formula::and(formula::atom("A"), formula::atom("B")),
    ];
    let mut out = Vec::new();
    for axiom in 1..=12u8 {
        let scheme = Scheme::Axiom(axiom);
        let vars = scheme.metavariables();
        let mut assignment = vec![0usize; vars.len()];
        loop {
            let subst: BTreeMap<String, Formula> = vars
                .iter()
                .cloned()
                .zip(assignment.iter().map(|&i| pool[i].clone()))
                .collect();
            out.push((axiom, scheme.instantiate(&subst).unwrap()));
            let mut carry = true;
            for d in (0..assignment.len()).rev() {
                assignment[d] += 1;
                if assignment[d] < pool.len() {
                    carry = false;
                    break;
                }
                assignment[d] = 0;
            }
            if carry {
                break;
            }
        }
    }
    out
}

#[test]
fn criterion_1_axiom_soundness_sweep() {
    let instances = axiom_instances();
    let mut models: Vec<Model> = Vec::new();
    for space in all_topologies(3) {
        models.extend(all_models(&space, &["A", "B"]));
    }
    let mut r = rng(1);
    for _ in 0..200 {
        models.push(random_lattice_model(&mut r, 4, &["A", "B"]));
    }
    let mut checked = 0u64;
    for model in &models {
        let mut checker = Checker::new(model);
        for (axiom, instance) in &instances {
            assert!(
                checker.first_failure(instance).is_none(),
                "axiom {axiom} instance {instance} fails on opens {:?} valuation {:?}",
                model.space.opens(),
                model.valuation()
            );
            checked += 1;
        }
    }
    println!(
        "PASS criterion 1: {} axiom instances valid on {} union/intersection-closed models ({checked} checks)",
        instances.len(),
        models.len()
    );
}

#[test]
fn criterion_2_splitting_partition_laws() {
    let mut r = rng(2);
    for trial in 0..500 {
        let host = random_topology(&mut r, 4);
        // random ∩-closed family containing X
        let mut family: Vec<u64> = host
            .opens()
            .iter()
            .copied()
            .filter(|_| r.gen_bool(0.5))
            .collect();
        family.push(host.full_set());
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
        let split = Splitting::new(host.clone(), family).unwrap();
        let down: Vec<u64> = split.down_set();
        // equiv_classes internally asserts remainders == ∼′ classes
        let classes = split.equiv_classes();
        // pairwise disjoint and covering ↓F
        let mut seen: Vec<u64> = Vec::new();
        for class in &classes {
            for &v in class {
                assert!(!seen.contains(&v), "trial {trial}: {v:#b} in two classes");
                seen.push(v);
            }
        }
        seen.sort_unstable();
        let mut expected = down.clone();
        expected.sort_unstable();
        assert_eq!(seen, expected, "trial {trial}: classes must cover ↓F");
        // convexity
        for class in &classes {
            for &v1 in class {
                for &v3 in class {
                    for &v2 in &down {
                        if v1 & !v2 == 0 && v2 & !v3 == 0 {
                            assert!(
                                class.contains(&v2),
                                "trial {trial}: convexity violated at {v2:#b}"
                            );
                        }
                    }
                }
            }
        }
    }
    println!("PASS criterion 2: partition laws hold on 500 random (host, family) pairs");
}

#[test]
fn criterion_3_partition_theorem_construction() {
    let mut r = rng(3);
    for trial in 0..200 {
        let space = random_topology(&mut r, 4);
        let model = random_valuation(&mut r, &space, &["A", "B"]);
        let f = random_formula(&mut r, 3);
        let set = build_stable_splittings(&model, &f).unwrap();
        let full = space.full_set();
        let mut prev_family: Vec<u64> = Vec::new();
        for (sub, split) in set.entries() {
            // conclusion 1: an ∩-closed family of opens containing X
            // (∩-closure is enforced by the Splitting constructor)
            assert!(split.family().contains(&full), "trial {trial}");
            for &u in split.family() {
                assert!(space.open_index(u).is_some(), "trial {trial}");
            }
            // conclusion 2: every class is stable for every subformula
            for class in split.equiv_classes() {
                for dep in sub.subformulas() {
                    assert!(
                        is_stable_for(&model, &class, &dep),
                        "trial {trial}: {dep} unstable on {class:?} (formula {f})"
                    );
                }
            }
            // conclusion 3: monotone along the subformula order
            for u in &prev_family {
                assert!(split.family().contains(u), "trial {trial}: monotonicity");
            }
            prev_family = split.family().to_vec();
        }
    }
    println!("PASS criterion 3: stable-splitting construction verified on 200 random (model, formula) pairs");
}

#[test]
fn criterion_4_quotient_fidelity() {
    let mut r = rng(4);
    for trial in 0..200 {
        let space = random_topology(&mut r, 4);
        let model = random_valuation(&mut r, &space, &["A", "B"]);
        let f = random_formula(&mut r, 3);

        let (q, qmap) = quotient_points(&model);
        for sub in f.subformulas() {
            for w in model.worlds() {
                assert_eq!(
                    eval(&model, w, &sub).unwrap(),
                    eval(&q, qmap[&w], &sub).unwrap(),
                    "trial {trial}: quotient changed {sub}"
                );
            }
        }

        let (small, fmap) = finitize(&model, &f).unwrap();
        for sub in f.subformulas() {
            for w in model.worlds() {
                assert_eq!(
                    eval(&model, w, &sub).unwrap(),
                    eval(&small, fmap[&w], &sub).unwrap(),
                    "trial {trial}: finitize changed {sub}"
                );
            }
        }
    }

    // the interval-collapse replica: three points, trivial opens, one marked
    let space = SubsetSpace::new(
        vec!["x1".into(), "x2".into(), "x3".into()],
        vec![0b000, 0b111],
    )
    .unwrap();
    let model = Model::new(space, [("A".to_string(), 0b001u64)].into_iter().collect()).unwrap();
    let (q, _) = quotient_points(&model);
    assert_eq!(q.space.points(), &["x1".to_string(), "x2".to_string()]);
    assert_eq!(q.space.opens(), &[0b00, 0b11]);
    assert_eq!(q.atom_set("A"), 0b01);

    println!("PASS criterion 4: quotient and finitize preserve satisfaction on 200 random pairs; interval replica collapses to {{x1,x2}}");
}

#[test]
fn criterion_5_basis_reduction() {
    let tests: Vec<Formula> = [
        "A -> <> K A",
        "K A -> A",
        "<> K A",
        "[] L A -> A",
        "K (A | B)",
        "L A & [] A",
    ]
    .iter()
    .map(|s| topologic::parse(s).unwrap())
    .collect();
    let mut r = rng(5);
    for trial in 0..100 {
        let space = random_topology(&mut r, 4);
        let model = random_valuation(&mut r, &space, &["A", "B"]);
        // random ∪-closed basis covering every open
        let mut basis: Vec<u64> = space
            .opens()
            .iter()
            .copied()
            .filter(|_| r.gen_bool(0.5))
            .collect();
        loop {
            let mut changed = false;
            for i in 0..basis.len() {
                for j in i + 1..basis.len() {
                    let join = basis[i] | basis[j];
                    if !basis.contains(&join) {
                        basis.push(join);
                        changed = true;
                    }
                }
            }
            for &u in space.opens() {
                let covered = basis
                    .iter()
                    .copied()
                    .filter(|&b| b & !u == 0)
                    .fold(0u64, |a, b| a | b);
                if covered != u {
                    basis.push(u);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let (_, report) = restrict_to_basis(&model, &basis, &tests).unwrap();
        assert!(report.all_agree(), "trial {trial}: {report:?}");
    }
    println!("PASS criterion 5: basis restriction preserves satisfaction and validity on 100 random pairs");
}

#[test]
fn criterion_6_decidability_smoke() {
    // enumeration counts
    for (n, count) in [(1usize, 1usize), (2, 4), (3, 29)] {
        assert_eq!(
            enumerate_spaces(n, SpaceClass::Topology).unwrap().len(),
            count
        );
    }

    let budget = SearchBudget {
        max_points: 3,
        ..SearchBudget::default()
    };
    let subst: BTreeMap<String, Formula> = [
        ("phi".to_string(), formula::atom("A")),
        ("psi".to_string(), formula::atom("B")),
        ("chi".to_string(), formula::atom("C")),
    ]
    .into_iter()
    .collect();
    for axiom in 1..=12u8 {
        let instance = Scheme::Axiom(axiom).instantiate(&subst).unwrap();
        assert!(
            matches!(
                decide_valid(&instance, &budget).unwrap(),
                Verdict::ValidUpToBound { .. }
            ),
            "axiom {axiom}"
        );
    }

    for s in ["A -> K A", "L A -> A", "<> K A -> K A"] {
        let f = topologic::parse(s).unwrap();
        match decide_valid(&f, &budget).unwrap() {
            Verdict::Countermodel { model, world, .. } => {
                assert!(model.space.is_topology(), "{s}");
                assert!(!eval(&model, world, &f).unwrap(), "{s} countermodel must replay");
            }
            v => panic!("{s}: expected countermodel, got {v:?}"),
        }
    }
    println!("PASS criterion 6: axioms valid up to 3 points, three non-theorems refuted with replayable countermodels, counts 1/4/29");
}

#[test]
fn criterion_7_dnf_corpus() {
    let fixed = [
        "A & K B & L C",
        "K A | K B",
        "[] A",
        "~K A",
        "[] <> A",
        "A <-> K A",
        "<> (A & K B)",
        "[] L A -> A",
        "L (A & <> K B)",
        "K (A | B)",
    ];
    let mut corpus: Vec<Formula> = fixed.iter().map(|s| topologic::parse(s).unwrap()).collect();
    let mut r = rng(7);
    while corpus.len() < 50 {
        corpus.push(random_formula(&mut r, 3));
    }
    let verify = SearchBudget {
        max_points: 3,
        ..SearchBudget::default()
    };
    for f in &corpus {
        // to_dnf verifies equivalence internally and aborts otherwise
        let dnf = to_dnf(f, &verify)
            .unwrap_or_else(|e| panic!("to_dnf failed on {f}: {e}"));
        assert!(dnf.render().is_dnf(), "{f}");
    }
    println!("PASS criterion 7: 50-formula corpus rewritten to verified DNF, zero unverified outputs");
}

#[test]
fn criterion_8_frame_duality() {
    let mut frames_checked = 0usize;
    for space in all_topologies(4) {
        let (frame, worlds) = subset_frame(&space).unwrap();
        let report = check_conditions(&frame);
        for (i, c) in report.conditions.iter().enumerate() {
            assert_eq!(
                *c,
                ConditionStatus::Holds,
                "condition {} on opens {:?}",
                i + 1,
                space.opens()
            );
        }
        // frame_to_space verifies the isomorphism witness internally
        let (rebuilt, witness) = frame_to_space(&frame).unwrap();
        let nonempty: Vec<u64> = space.opens().iter().copied().filter(|&u| u != 0).collect();
        assert_eq!(rebuilt.opens().len(), nonempty.len());
        assert_eq!(witness.len(), worlds.len());
        frames_checked += 1;
    }
    println!("PASS criterion 8: all eight conditions and the round-trip isomorphism hold for {frames_checked} subset frames (all topologies up to 4 points)");
}

#[test]
fn criterion_9_algebra() {
    let spaces = all_topologies(3);
    // GMA is valuation-independent: once per space
    for space in &spaces {
        let model = Model::new(space.clone(), BTreeMap::new()).unwrap();
        let (alg, _) = complex_algebra(&model).unwrap();
        assert!(
            check_gma(&alg).unwrap(),
            "complex algebra of opens {:?} must be a GMA",
            space.opens()
        );
    }

    // agreement with semantic eval, and axioms evaluating to 1
    let mut r = rng(9);
    let corpus: Vec<Formula> = (0..40).map(|_| random_formula(&mut r, 3)).collect();
    let instances = {
        let subst: BTreeMap<String, Formula> = [
            ("phi".to_string(), formula::atom("A")),
            ("psi".to_string(), formula::atom("B")),
            ("chi".to_string(), formula::atom("A")),
        ]
        .into_iter()
        .collect();
        (1..=12u8)
            .map(|i| Scheme::Axiom(i).instantiate(&subst).unwrap())
            .collect::<Vec<_>>()
    };
    let mut models_checked = 0usize;
    for space in &spaces {
        for model in all_models(space, &["A", "B"]) {
            let (alg, worlds) = complex_algebra(&model).unwrap();
            let v = lift_valuation(&model, &worlds);
            for f in &corpus {
                let result = alg_eval(&alg, &v, f).unwrap();
                for (i, w) in worlds.iter().enumerate() {
                    assert_eq!(
                        result >> i & 1 == 1,
                        eval(&model, *w, f).unwrap(),
                        "algebraic/semantic disagreement on {f}"
                    );
                }
            }
            for (i, inst) in instances.iter().enumerate() {
                assert_eq!(
                    alg_eval(&alg, &v, inst).unwrap(),
                    alg.one(),
                    "axiom {} not 1 in complex algebra",
                    i + 1
                );
            }
            models_checked += 1;
        }
    }
    println!(
        "PASS criterion 9: {} complex algebras pass the GMA laws; algebraic and semantic evaluation agree on {models_checked} models",
        spaces.len()
    );
}
