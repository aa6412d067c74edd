//! Douglas–Rachford calculus for maximally monotone linear relations on ℝⁿ.
//!
//! The crate builds the full tool chain around the splitting operator
//! `T = ½(I + R_B R_A)`:
//!
//! - [`numerics`]: a small dense matrix kernel (Jacobi eigensolver, pivoted
//!   solves, kernel bases, rank-revealing orthonormalization);
//! - [`linrel`]: linear relations as orthonormal graph bases, with
//!   monotonicity/maximality/symmetry tests, resolvents, and the resolvent
//!   metric;
//! - [`drcalc`]: the splitting operator, recovery of the monotone operator it
//!   is the resolvent of, the proximal-mapping decision (firmly nonexpansive
//!   and symmetric), and commutator segment families;
//! - [`iterate`]: the fixed-point iteration, shadow sequence, and solution
//!   set of `0 ∈ Ax + Bx` with a cross-checking oracle;
//! - [`lab`]: reproducible experiments probing how rarely the splitting
//!   operator of a random symmetric pair is a proximal mapping, plus the
//!   perturbation that pushes any commuting pair off that set.
//!
//! Start with the runnable examples (`cargo run --example two_lines`) or the
//! `drlab` binary, which exposes the same functionality as subcommands.

pub mod cli;
pub mod drcalc;
mod error;
pub mod iterate;
pub mod lab;
pub mod linrel;
pub mod numerics;
pub mod rng;

pub use error::Error;
