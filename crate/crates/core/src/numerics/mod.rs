//! Scalar special functions and summation kernels.
//!
//! Every infinite series used by the inner-product engine is evaluated here in
//! a structured way: periodic sums `Σ c(m)/(m(m+1))` through the digamma
//! function, log-weighted periodic sums by mean/fluctuation splitting with Abel
//! summation. The quadrature oracle in [`quad`] never calls into those kernels.

pub mod periodic;
pub mod quad;
pub mod special;
pub mod summation;
pub mod zeta;

pub use periodic::{
    log_weighted_periodic_sum, periodic_sum, PeriodicCoefficients, PrecisionBudget, SeriesEstimate,
};
pub use quad::{quad_oracle, Integrand, QuadResult, TailModel};
pub use special::{digamma, e1_norm_sq, omega, omega_closed, omega_series, ramp_weight};
pub use summation::{Accumulator, DoubleDouble, NeumaierSum};
pub use num_complex::Complex64;
pub use zeta::{hurwitz_zeta, zeta};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ln 4 − 1`, the supremum of `|⟨e₁, f_n⟩|` and the value `ω(1)`.
pub const LN4_MINUS_1: f64 = 0.386_294_361_119_890_6;

/// `1 − γ = ⟨χ, e₁⟩`.
pub const ONE_MINUS_GAMMA: f64 = 0.422_784_335_098_467_1;
