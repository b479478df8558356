//! `e₁′ = Σ_k ⟨e₁, ε_k⟩ ε_k`, the projection of `e₁` on `D₀`, and
//! `κ′ = (e₁ − e₁′)/‖e₁ − e₁′‖²`.

use serde::Serialize;

use crate::elements::{Atom, Coeff, Element};
use crate::error::{Error, Result};
use crate::numerics::zeta::hurwitz_zeta_real;
use crate::numerics::{e1_norm_sq, ramp_weight, NeumaierSum};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixProjections {
    pub k_max: u64,
    /// `⟨e₁, ε_k⟩ = √(k(k+1))(ln(1+1/k) − 1/(k+1))`, `k = 1..=K`.
    pub coefficients: Vec<f64>,
    /// Value of `e₁′` on `[k, k+1)`, i.e. `k(k+1)(ln(1+1/k) − 1/(k+1))`.
    pub step_values: Vec<f64>,
    /// `Σ_{k≤K} ⟨e₁, ε_k⟩²`.
    pub partial_norm_sq: f64,
    /// Estimate of `Σ_{k>K} ⟨e₁, ε_k⟩²` from its expansion in Hurwitz zeta values.
    pub tail_estimate: f64,
    pub tail_estimate_err: f64,
    /// Elementary bound `Σ_{k>K} ⟨e₁, ε_k⟩² ≤ 1/(4K) + 1/(8K²)`.
    pub tail_bound: f64,
    pub e1_norm_sq: f64,
    /// `‖e₁ − e₁′‖² = ‖e₁‖² − ‖e₁′‖²`.
    pub residual_norm_sq: f64,
    pub residual_norm_sq_err: f64,
    /// `1/‖e₁ − e₁′‖²`.
    pub kappa_prime_scalar: f64,
    /// `e₁ − Σ_{k≤K} ⟨e₁, ε_k⟩ ε_k`.
    #[serde(skip)]
    pub kappa_prime_direction: Element,
}

impl AppendixProjections {
    /// `κ′` truncated at `K`.
    pub fn kappa_prime(&self) -> Element {
        self.kappa_prime_direction.scale_real(self.kappa_prime_scalar)
    }
}

/// Coefficients `γ_q` of `k(k+1)a(k)² = Σ_{q≥2} γ_q k^{−q}` where
/// `a(k) = Σ_{n≥2} (−1)ⁿ(n−1)/n · k^{−n}`.
fn tail_coefficients(q_max: usize) -> Vec<f64> {
    let alpha = |n: usize| -> f64 {
        if n < 2 {
            0.0
        } else {
            let v = (n - 1) as f64 / n as f64;
            if n % 2 == 0 {
                v
            } else {
                -v
            }
        }
    };
    let beta = |p: usize| -> f64 { (2..=p.saturating_sub(2)).map(|n| alpha(n) * alpha(p - n)).sum() };
    (0..=q_max)
        .map(|q| if q < 2 { 0.0 } else { beta(q + 2) + beta(q + 1) })
        .collect()
}

pub fn appendix_projections(k_max: u64) -> Result<AppendixProjections> {
    if k_max == 0 {
        return Err(Error::domain("K must be >= 1"));
    }
    let mut coefficients = Vec::with_capacity(k_max as usize);
    let mut step_values = Vec::with_capacity(k_max as usize);
    let mut norm = NeumaierSum::new();
    for k in 1..=k_max {
        let kf = k as f64;
        let a = ramp_weight(kf);
        let c = (kf * (kf + 1.0)).sqrt() * a;
        coefficients.push(c);
        step_values.push(kf * (kf + 1.0) * a);
        norm.add(c * c);
    }
    let partial_norm_sq = norm.sum();

    const Q: usize = 80;
    let gamma = tail_coefficients(Q + 1);
    let a0 = (k_max + 1) as f64;
    let mut tail = NeumaierSum::new();
    for (q, &g) in gamma.iter().enumerate().take(Q + 1).skip(2) {
        tail.add(g * hurwitz_zeta_real(q as f64, a0));
    }
    let tail_estimate = tail.sum();
    let tail_estimate_err = 4.0 * gamma[Q + 1].abs() * hurwitz_zeta_real((Q + 1) as f64, a0)
        + 8.0 * f64::EPSILON * tail_estimate.abs();
    let kf = k_max as f64;
    let tail_bound = 1.0 / (4.0 * kf) + 1.0 / (8.0 * kf * kf);

    let (e1, e1_err) = e1_norm_sq();
    let residual_norm_sq = e1 - partial_norm_sq - tail_estimate;
    let residual_norm_sq_err =
        e1_err + tail_estimate_err + 8.0 * f64::EPSILON * (e1 + partial_norm_sq) * (k_max as f64).sqrt();

    let mut terms = vec![(Atom::E(1), Coeff::rational(num_rational::BigRational::from_integer(1.into())))];
    for (k, &c) in (1..=k_max).zip(&coefficients) {
        terms.push((Atom::Eps(k), Coeff::real(-c)));
    }
    let kappa_prime_direction = Element::from_terms(terms)?;

    Ok(AppendixProjections {
        k_max,
        coefficients,
        step_values,
        partial_norm_sq,
        tail_estimate,
        tail_estimate_err,
        tail_bound,
        e1_norm_sq: e1,
        residual_norm_sq,
        residual_norm_sq_err,
        kappa_prime_scalar: 1.0 / residual_norm_sq,
        kappa_prime_direction,
    })
}
