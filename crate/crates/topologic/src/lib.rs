//! A bimodal logic of knowledge and effort over subset spaces.
//!
//! The library models spaces (X, O) of points and distinguished subsets,
//! evaluates formulas built from a knowledge modality `K` (quantifying over
//! the points of the current subset) and an effort modality `[]`
//! (quantifying over shrinkings of the current subset), and provides:
//!
//! - parsing, printing and syntactic classification of formulas;
//! - satisfaction, model validity, axiom schemes and topological
//!   characterizations;
//! - splittings, remainder partitions, quotients and finitization;
//! - a bounded decision procedure by exhaustive enumeration of finite
//!   spaces;
//! - prime/disjunctive normal forms with semantic verification;
//! - bimodal Kripke frames and the frame/space correspondence;
//! - finite monadic algebras and complex algebras of models.

pub mod algebra;
pub mod decide;
pub mod error;
pub mod formula;
pub mod frames;
pub mod normalform;
pub mod semantics;
pub mod space;
pub mod splitting;

pub use error::{Error, Result};
pub use formula::{parse, print, Formula};
pub use space::{Model, SubsetSpace, World};
