//! Numerical workbench for the Nyman-Beurling Hilbert space `L²(0,∞; t⁻²dt)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: exact arithmetical functions (Möbius, Dirichlet convolution,
//!   Mertens-type sums).
//! * [`numerics`]: special functions, structured series kernels, compensated
//!   summation and an independent quadrature oracle.
//! * [`elements`]: symbolic elements of `D` (fractional-part dilates, step
//!   functions, Vasyunin's families) and the inner-product engine.
//! * [`projection`]: Gram least-squares projections of `χ` and the `ν` tables.
//! * [`dseries`]: Dirichlet series and Mellin transform evaluators.
//! * [`cli`]: command-line front end used by the `nyman` binary.

pub mod arith;
pub mod cli;
pub mod dseries;
pub mod elements;
pub mod error;
pub mod numerics;
pub mod projection;

pub use error::{Error, Result};
