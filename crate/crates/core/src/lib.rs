//! Exact rational computation of limiting measures for random walks on
//! finite transformation semigroups generated by graph colorings, together
//! with the tensor and zeon hierarchies built from them.

pub mod analysis;
pub mod colorings;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod problem;
pub mod rational;
pub mod semigroup;
pub mod tensor;
pub mod transform;
pub mod walk;
pub mod zeon;

pub use analysis::{analyze, identities, AnalysisReport, AnalyzeOptions};
pub use colorings::{enumerate_colorings, BudgetExceeded, ColoringResult, EnumerationError};
pub use error::{Error, Result};
pub use linalg::RationalMatrix;
pub use problem::{parse_graph, parse_spec, Graph, ProblemSpec, Validation};
pub use rational::Rational;
pub use semigroup::{KernelStructure, Semigroup};
pub use transform::{Partition, RangeSet, Transformation};
pub use walk::{LimitMeasure, Walk};
