//! Exact computations with the Poisson algebras of geodesic functions on
//! orbifold Riemann surfaces: the A_n algebra, its infinite-level extension
//! 𝔇_n, level-p and D_n reductions, braid group actions, central elements and
//! the Stokes-matrix realization.

pub mod braid;
pub mod centers;
pub mod dn_algebra;
pub mod fatgraph;
pub mod frobenius;
pub mod ks_calculus;
pub mod poly_core;
pub mod reductions;
pub mod sampling;

pub use poly_core::{Atom, GenIndex, LambdaMatrix, PolyError, SymExpr};
