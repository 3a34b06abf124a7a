//! Exact integrability and linearizability analysis of three-dimensional
//! Lotka–Volterra systems at resonant singular points.

pub mod algebra;
pub mod catalog;
pub mod darboux;
pub mod expr;
pub mod obstruction;
pub mod series;
pub mod system;

pub use darboux::{find_darboux_combination, CombinationTarget, DarbouxFunction, RelationKind};
pub use system::{Cofactor, LVSystem, LvError, Resonance};
