//! Command-line surface. Exit codes: 0 true/valid/success, 1 false or
//! counterexample found, 2 usage or formula parse error, 3 invalid input
//! file or invariant violation, 4 search budget or cap exhausted.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use topologic::decide::{decide_sat, decide_valid, SearchBudget, SpaceClass, Verdict};
use topologic::normalform::{to_dnf_traced};
use topologic::splitting::{finitize, quotient_points, splitting_report, WorldMap};
use topologic::{algebra, frames, semantics, Error, Formula, Model, World};

#[derive(Parser)]
#[command(name = "topologic", version, about = "Knowledge-and-effort logic over subset spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct FormulaArg {
    /// Formula in the surface grammar.
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long, conflicts_with = "formula")]
    formula_file: Option<PathBuf>,
}

impl FormulaArg {
    fn read(&self) -> Result<Formula, Error> {
        let text = match (&self.formula, &self.formula_file) {
            (Some(f), None) => f.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)?.trim().to_string(),
            _ => {
                return Err(Error::Parse {
                    offset: 0,
                    message: "a formula (positional or --formula-file) is required".into(),
                })
            }
        };
        topologic::parse(&text)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Topology,
    Lattice,
    Any,
}

impl From<ClassArg> for SpaceClass {
    fn from(c: ClassArg) -> SpaceClass {
        match c {
            ClassArg::Topology => SpaceClass::Topology,
            ClassArg::Lattice => SpaceClass::Lattice,
            ClassArg::Any => SpaceClass::AnySubsetSpace,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a formula and print its canonical rendering.
    Parse {
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a formula at a world (--point plus --open) of a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        point: String,
        /// Open given as comma-separated point names, e.g. "a,b".
        #[arg(long)]
        open: String,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Check validity of a formula in one model.
    Valid {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
        #[arg(long)]
        json: bool,
    },
    /// Report the syntactic classes of a formula.
    Classify {
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Rewrite a formula to disjunctive normal form (verified).
    Dnf {
        #[command(flatten)]
        formula: FormulaArg,
        /// Verification bound (points).
        #[arg(long, default_value_t = 3)]
        max_points: usize,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Bounded satisfiability/validity search over finite spaces.
    Decide {
        #[command(flatten)]
        formula: FormulaArg,
        /// Decide validity (default: satisfiability).
        #[arg(long)]
        valid: bool,
        #[arg(long, default_value_t = 4)]
        max_points: usize,
        #[arg(long, value_enum, default_value_t = ClassArg::Topology)]
        class: ClassArg,
        #[arg(long)]
        max_seconds: Option<u64>,
        #[arg(long)]
        iso_prune: bool,
    },
    /// Build the stable splittings of a model for a formula.
    Split {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Quotient a model; with --formula, shrink it for that formula.
    Quotient {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: Option<String>,
    },
    /// Shrink a model to a bounded equivalent for a formula.
    Finitize {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArg,
    },
    /// Frame operations.
    #[command(subcommand)]
    Frame(FrameCmd),
    /// Algebra operations.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
}

#[derive(Subcommand)]
enum FrameCmd {
    /// Export the subset frame of a model.
    Export {
        #[arg(long)]
        model: PathBuf,
    },
    /// Check the eight frame conditions.
    Check {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Rebuild a space from a frame satisfying the conditions.
    ToSpace {
        #[arg(long)]
        frame: PathBuf,
    },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Check the FMA and GMA laws of an algebra file.
    Check {
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Build the complex algebra of a model.
    FromModel {
        #[arg(long)]
        model: PathBuf,
    },
    /// Evaluate a formula in an algebra under --value atom=element pairs.
    Eval {
        #[arg(long)]
        algebra: PathBuf,
        /// Repeatable: atom=element (element as an integer bitmask).
        #[arg(long = "value")]
        values: Vec<String>,
        #[command(flatten)]
        formula: FormulaArg,
    },
}

#[derive(Serialize)]
struct WorldRepr {
    point: String,
    open: Vec<String>,
}

fn world_repr(model: &Model, w: World) -> WorldRepr {
    WorldRepr {
        point: model.space.points()[w.point].clone(),
        open: model.space.point_names(model.space.opens()[w.open]),
    }
}

fn world_map_repr(src: &Model, dst: &Model, map: &WorldMap) -> Vec<(WorldRepr, WorldRepr)> {
    map.iter()
        .map(|(a, b)| (world_repr(src, *a), world_repr(dst, *b)))
        .collect()
}

fn load_model(path: &PathBuf) -> Result<Model, Error> {
    Model::from_json(&std::fs::read_to_string(path)?)
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } => 2,
        Error::BudgetExhausted { .. } | Error::CapExceeded(_) => 4,
        _ => 3,
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Parse { formula, json } => {
            let f = formula.read()?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "formula": topologic::print(&f),
                        "desugared": topologic::print(&f.desugar()),
                    })
                );
            } else {
                println!("{f}");
            }
            Ok(0)
        }
        Cmd::Check {
            model,
            point,
            open,
            formula,
        } => {
            let m = load_model(&model)?;
            let f = formula.read()?;
            let pi = m.space.point_index(&point).ok_or_else(|| {
                Error::InvalidModel(format!("unknown point {point:?}"))
            })?;
            let mask = open
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .try_fold(0u64, |acc, name| {
                    m.space
                        .point_index(name)
                        .map(|i| acc | 1 << i)
                        .ok_or_else(|| Error::InvalidModel(format!("unknown point {name:?}")))
                })?;
            let oi = m.space.open_index(mask).ok_or_else(|| {
                Error::InvalidModel(format!("{{{open}}} is not an open of the model"))
            })?;
            let truth = semantics::eval(&m, World { point: pi, open: oi }, &f)?;
            println!("{truth}");
            Ok(if truth { 0 } else { 1 })
        }
        Cmd::Valid {
            model,
            formula,
            json,
        } => {
            let m = load_model(&model)?;
            let f = formula.read()?;
            match semantics::valid_in_model(&m, &f) {
                None => {
                    if json {
                        println!("{}", serde_json::json!({ "valid": true }));
                    } else {
                        println!("valid");
                    }
                    Ok(0)
                }
                Some(w) => {
                    let repr = world_repr(&m, w);
                    if json {
                        println!(
                            "{}",
                            serde_json::json!({ "valid": false, "world": repr })
                        );
                    } else {
                        println!("fails at ({}, {{{}}})", repr.point, repr.open.join(","));
                    }
                    Ok(1)
                }
            }
        }
        Cmd::Classify { formula } => {
            let f = formula.read()?;
            println!("{}", serde_json::to_string_pretty(&f.classify())?);
            Ok(0)
        }
        Cmd::Dnf {
            formula,
            max_points,
            trace,
            json,
        } => {
            let f = formula.read()?;
            let budget = SearchBudget {
                max_points,
                ..SearchBudget::default()
            };
            let (dnf, steps) = to_dnf_traced(&f, &budget)?;
            if trace {
                for s in &steps {
                    eprintln!("{s}");
                }
            }
            if json {
                let blocks: Vec<_> = dnf
                    .blocks
                    .iter()
                    .map(|b| {
                        serde_json::json!({
                            "base": b.base.to_string(),
                            "known": b.known.to_string(),
                            "possibles": b.possibles.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                println!(
                    "{}",
                    serde_json::json!({ "dnf": dnf.render().to_string(), "blocks": blocks })
                );
            } else {
                println!("{}", dnf.render());
            }
            Ok(0)
        }
        Cmd::Decide {
            formula,
            valid,
            max_points,
            class,
            max_seconds,
            iso_prune,
        } => {
            let f = formula.read()?;
            let budget = SearchBudget {
                max_points,
                class: class.into(),
                max_seconds,
                iso_prune,
                minimize_countermodels: true,
            };
            let verdict = if valid {
                decide_valid(&f, &budget)?
            } else {
                decide_sat(&f, &budget)?
            };
            match verdict {
                Verdict::ValidUpToBound { models_examined } => {
                    println!(
                        "valid up to {max_points} points ({models_examined} models examined)"
                    );
                    Ok(0)
                }
                Verdict::UnsatUpToBound { models_examined } => {
                    println!(
                        "unsatisfiable up to {max_points} points ({models_examined} models examined)"
                    );
                    Ok(1)
                }
                Verdict::Satisfiable { model, world, .. } => {
                    let repr = world_repr(&model, world);
                    eprintln!(
                        "satisfiable at ({}, {{{}}})",
                        repr.point,
                        repr.open.join(",")
                    );
                    println!("{}", model.to_json());
                    Ok(0)
                }
                Verdict::Countermodel { model, world, .. } => {
                    let repr = world_repr(&model, world);
                    eprintln!(
                        "countermodel fails at ({}, {{{}}})",
                        repr.point,
                        repr.open.join(",")
                    );
                    println!("{}", model.to_json());
                    Ok(1)
                }
            }
        }
        Cmd::Split { model, formula } => {
            let m = load_model(&model)?;
            let f = formula.read()?;
            println!("{}", serde_json::to_string_pretty(&splitting_report(&m, &f)?)?);
            Ok(0)
        }
        Cmd::Quotient { model, formula } => {
            let m = load_model(&model)?;
            let (result, map) = match formula {
                None => quotient_points(&m),
                Some(text) => finitize(&m, &topologic::parse(&text)?)?,
            };
            print_model_with_map(&m, &result, &map)?;
            Ok(0)
        }
        Cmd::Finitize { model, formula } => {
            let m = load_model(&model)?;
            let f = formula.read()?;
            let (result, map) = finitize(&m, &f)?;
            print_model_with_map(&m, &result, &map)?;
            Ok(0)
        }
        Cmd::Frame(cmd) => run_frame(cmd),
        Cmd::Algebra(cmd) => run_algebra(cmd),
    }
}

fn print_model_with_map(src: &Model, dst: &Model, map: &WorldMap) -> Result<(), Error> {
    let model_json: serde_json::Value = serde_json::from_str(&dst.to_json())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&serde_json::json!({
            "model": model_json,
            "world_map": world_map_repr(src, dst, map),
        }))?
    );
    Ok(())
}

fn run_frame(cmd: FrameCmd) -> Result<u8, Error> {
    match cmd {
        FrameCmd::Export { model } => {
            let m = load_model(&model)?;
            let (frame, _) = frames::subset_frame(&m.space)?;
            println!("{}", frame.to_json());
            Ok(0)
        }
        FrameCmd::Check { frame } => {
            let fr = frames::BimodalFrame::from_json(&std::fs::read_to_string(frame)?)?;
            let report = frames::check_conditions(&fr);
            println!("{}", serde_json::to_string_pretty(&report)?);
            let ok = report.all_refutable_hold_up_to(8);
            Ok(if ok { 0 } else { 1 })
        }
        FrameCmd::ToSpace { frame } => {
            let fr = frames::BimodalFrame::from_json(&std::fs::read_to_string(frame)?)?;
            let (space, witness) = frames::frame_to_space(&fr)?;
            let opens: Vec<Vec<String>> = space
                .opens()
                .iter()
                .map(|&u| space.point_names(u))
                .collect();
            let worlds: Vec<_> = fr
                .worlds()
                .iter()
                .zip(&witness)
                .map(|(name, w)| {
                    serde_json::json!({
                        "world": name,
                        "point": space.points()[w.point],
                        "open": space.point_names(space.opens()[w.open]),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "points": space.points(),
                    "opens": opens,
                    "witness": worlds,
                }))?
            );
            Ok(0)
        }
    }
}

fn run_algebra(cmd: AlgebraCmd) -> Result<u8, Error> {
    match cmd {
        AlgebraCmd::Check { algebra: path } => {
            let alg = algebra::MonadicAlgebra::from_json(&std::fs::read_to_string(path)?)?;
            let fma = algebra::check_fma(&alg);
            let gma = algebra::check_gma(&alg)?;
            println!("{}", serde_json::json!({ "fma": fma, "gma": gma }));
            Ok(if gma { 0 } else { 1 })
        }
        AlgebraCmd::FromModel { model } => {
            let m = load_model(&model)?;
            let (alg, _) = algebra::complex_algebra(&m)?;
            println!("{}", alg.to_json());
            Ok(0)
        }
        AlgebraCmd::Eval {
            algebra: path,
            values,
            formula,
        } => {
            let alg = algebra::MonadicAlgebra::from_json(&std::fs::read_to_string(path)?)?;
            let f = formula.read()?;
            let mut v: BTreeMap<String, u64> = BTreeMap::new();
            for pair in values {
                let (name, elem) = pair.split_once('=').ok_or_else(|| {
                    Error::InvalidAlgebra(format!("--value expects atom=element, got {pair:?}"))
                })?;
                let elem: u64 = elem.parse().map_err(|_| {
                    Error::InvalidAlgebra(format!("element {elem:?} is not an integer"))
                })?;
                v.insert(name.trim().to_string(), elem);
            }
            let result = algebra::alg_eval(&alg, &v, &f)?;
            println!(
                "{}",
                serde_json::json!({ "element": result, "valid": result == alg.one() })
            );
            Ok(if result == alg.one() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}
