//! Thermodynamic geometry of black-hole fundamental equations.
//!
//! Given a fundamental equation `M(S, Q[, l])`, the crate builds the Weinhold,
//! Ruppeiner and Legendre-invariant (GTD) metrics on the equilibrium
//! manifold, computes their scalar curvature exactly, and locates where
//! curvature singularities sit relative to the poles of the heat capacity.

pub mod analysis;
pub mod checks;
pub mod geometry;
pub mod models;
pub mod symbolic;

pub use symbolic::{EvalPoint, Exponent, GenPoly, RationalExpr, SymbolicError, VarList};
