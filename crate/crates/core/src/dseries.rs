//! Dirichlet series `F(s) = Σ u(n; f) n^{−s}`, `F(s)/ζ(s) = Σ w(n; f) n^{−s}`,
//! the Mellin form `F(s) = s ∫ f(t) t^{−s−1} dt` for `f ∈ D₀`, and partial
//! sums of `Σ ν̂(n) n^{−s}`.

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::ratio_to_f64;
use crate::elements::{decompose, u_sequence, w_sequence, Atom, Element, InnerProductEngine};
use crate::error::{Error, Result};
use crate::numerics::{digamma, hurwitz_zeta, zeta};
use crate::projection::{nu_table, GramCache, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMethod {
    DirichletPartial,
    MellinQuadrature,
    EulerCombination,
}

impl SeriesMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesMethod::DirichletPartial => "dirichlet_partial",
            SeriesMethod::MellinQuadrature => "mellin_quadrature",
            SeriesMethod::EulerCombination => "euler_combination",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub terms_used: u64,
    pub last_term_abs: f64,
    pub method: SeriesMethod,
    /// Error bound: truncation tail for partial sums of `u` and `w`, the
    /// propagated coefficient error for `ν̂` sums, rounding and special
    /// function error otherwise. `None` when no bound is available
    /// (partial sums outside the half-plane of absolute convergence).
    pub tail_bound: Option<f64>,
    /// Set when the partial sums carry no convergence guarantee at this `s`.
    pub exploratory: bool,
}

#[inline]
fn pow_neg(n: f64, s: Complex64) -> Complex64 {
    (-s * n.ln()).exp()
}

/// Largest `|u(n; f)|` for `n` beyond every `Eps` index: `Σ |a_k|` over the
/// `E(k)` coefficients.
fn dilate_mass(f: &Element) -> f64 {
    f.terms()
        .filter(|(a, _)| matches!(a, Atom::E(_)))
        .map(|(a, c)| c.to_f64(a).abs())
        .sum()
}

fn eps_reach(f: &Element) -> u64 {
    f.terms()
        .filter_map(|(a, _)| match a {
            Atom::Eps(m) => Some(*m + 1),
            _ => None,
        })
        .max()
        .unwrap_or(1)
}

fn require_terms(n_terms: u64) -> Result<()> {
    if n_terms == 0 {
        Err(Error::domain("need at least one term"))
    } else {
        Ok(())
    }
}

fn partial_sum(
    coeffs: impl Iterator<Item = f64>,
    s: Complex64,
) -> (Complex64, u64, f64) {
    let mut re = crate::numerics::NeumaierSum::new();
    let mut im = crate::numerics::NeumaierSum::new();
    let mut last = 0.0;
    let mut n = 0u64;
    for (i, c) in coeffs.enumerate() {
        n = i as u64 + 1;
        if c == 0.0 {
            last = 0.0;
            continue;
        }
        let t = c * pow_neg(n as f64, s);
        re.add(t.re);
        im.add(t.im);
        last = t.norm();
    }
    (Complex64::new(re.sum(), im.sum()), n, last)
}

/// `Σ_{n≤N} u(n; f) n^{−s}` (definition route for `u`).
pub fn dirichlet_f(f: &Element, s: Complex64, n_terms: u64) -> Result<SeriesValue> {
    require_terms(n_terms)?;
    let u = u_sequence(f, n_terms)?;
    let (value, terms_used, last_term_abs) = partial_sum(u.iter().map(|v| v.value), s);
    let sigma = s.re;
    let tail_bound = (sigma > 1.0 && n_terms >= eps_reach(f)).then(|| {
        let nf = n_terms as f64;
        dilate_mass(f) * nf.powf(1.0 - sigma) / (sigma - 1.0)
    });
    Ok(SeriesValue {
        value,
        terms_used,
        last_term_abs,
        method: SeriesMethod::DirichletPartial,
        tail_bound,
        exploratory: sigma <= 1.0,
    })
}

/// `Σ_{n≤N} w(n; f) n^{−s}`.
///
/// Each dilate contributes `w(n; e_k) = −[n = k]`, so past the largest
/// dilate index only the finitely supported part `u_r` of `u` (from `χ` and
/// the steps) remains, and `|w(n)| ≤ Σ_d |u_r(d)|`. That gives the tail
/// bound for `Re s > 1`.
pub fn f_over_zeta(f: &Element, s: Complex64, n_terms: u64) -> Result<SeriesValue> {
    require_terms(n_terms)?;
    let w = w_sequence(f, n_terms)?;
    let (value, terms_used, last_term_abs) = partial_sum(w.iter().map(|v| v.value), s);
    let max_dilate = f
        .terms()
        .filter_map(|(a, _)| match a {
            Atom::E(k) => Some(*k),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let reach = eps_reach(f);
    let tail_bound = if s.re > 1.0 && n_terms >= max_dilate.max(reach) {
        let rest = Element::from_terms(
            f.terms()
                .filter(|(a, _)| !matches!(a, Atom::E(_)))
                .map(|(a, c)| (*a, c.clone())),
        )?;
        let b: f64 = if rest.is_zero() {
            0.0
        } else {
            u_sequence(&rest, reach)?.iter().map(|v| v.value.abs() + v.err).sum()
        };
        let rounding = 8.0 * f64::EPSILON * (n_terms as f64).sqrt() * value.norm().max(1.0);
        Some(b * (n_terms as f64).powf(1.0 - s.re) / (s.re - 1.0) + rounding)
    } else {
        None
    };
    Ok(SeriesValue {
        value,
        terms_used,
        last_term_abs,
        method: SeriesMethod::DirichletPartial,
        tail_bound,
        exploratory: s.re < 1.0,
    })
}

/// `ζ(s, x) − ζ(s, y)`, continuous through `s = 1`.
fn hurwitz_difference(s: Complex64, x: f64, y: f64) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-9 {
        return Ok(Complex64::new(digamma(y)? - digamma(x)?, 0.0));
    }
    Ok(hurwitz_zeta(s, x) - hurwitz_zeta(s, y))
}

/// `F(s) = s ∫₁^∞ f(t) t^{−s−1} dt` for `f ∈ D₀` and `Re s > 1/2`.
///
/// `f` is constant, `h(m)`, on each `[m, m+1)`, so every panel integrates
/// exactly to `h(m)(m^{−s} − (m+1)^{−s})/s`. Past the last `Eps` index `h`
/// is periodic with period `L = lcm` of the dilation indices, and the
/// remaining sum collapses to `Σ_r h(M+r) L^{−s}(ζ(s, (M+r)/L) − ζ(s, (M+r+1)/L))`.
pub fn mellin_f(f: &Element, s: Complex64) -> Result<SeriesValue> {
    if !(s.re > 0.5) {
        return Err(Error::domain(format!("Mellin form needs Re s > 1/2, got {s}")));
    }
    let d = decompose(f)?;
    let lambda_zero = match &d.lambda_exact {
        Some(q) => q.is_zero(),
        None => d.lambda.abs() < 1e-14,
    };
    if !lambda_zero {
        return Err(Error::domain(format!(
            "Mellin form needs lambda = 0, got {}",
            d.lambda
        )));
    }
    let period = f
        .terms()
        .filter_map(|(a, _)| match a {
            Atom::E(k) => Some(*k),
            _ => None,
        })
        .fold(1u64, |acc, k| acc.lcm(&k));
    if period > 1_000_000 {
        return Err(Error::domain(format!("period {period} too long for the Mellin tail")));
    }
    let start = eps_reach(f);
    let mut re = crate::numerics::NeumaierSum::new();
    let mut im = crate::numerics::NeumaierSum::new();
    let mut mag = 0.0;
    let mut last = 0.0;
    for m in 1..start {
        let h = d.step_value(m).value;
        if h != 0.0 {
            let t = h * (pow_neg(m as f64, s) - pow_neg(m as f64 + 1.0, s));
            re.add(t.re);
            im.add(t.im);
            mag += t.norm();
            last = t.norm();
        }
    }
    let lf = period as f64;
    let l_s = pow_neg(lf, s);
    let mut zeta_mag = 0.0;
    for r in 0..period {
        let m = start + r;
        let h = d.step_value(m).value;
        if h != 0.0 {
            let diff = hurwitz_difference(s, m as f64 / lf, (m + 1) as f64 / lf)?;
            let t = h * l_s * diff;
            re.add(t.re);
            im.add(t.im);
            mag += t.norm();
            zeta_mag += h.abs() * l_s.norm() * (hurwitz_zeta(s, m as f64 / lf).norm() + 1.0);
            last = t.norm();
        }
    }
    let value = Complex64::new(re.sum(), im.sum());
    Ok(SeriesValue {
        value,
        terms_used: start - 1 + period,
        last_term_abs: last,
        method: SeriesMethod::MellinQuadrature,
        tail_bound: Some(64.0 * f64::EPSILON * mag + 1e-13 * zeta_mag),
        exploratory: false,
    })
}

/// `F(s)` from the atom-wise closed forms: `E(k) ↦ −k^{−s}ζ(s)`, `Chi ↦ 1`,
/// `Eps(m) ↦ √(m(m+1))(m^{−s} − (m+1)^{−s})`.
pub fn euler_combination(f: &Element, s: Complex64) -> Result<SeriesValue> {
    if f.contains_kappa() {
        return Err(Error::domain("kappa has no Dirichlet series"));
    }
    let has_dilates = f.terms().any(|(a, _)| matches!(a, Atom::E(_)));
    let z = if has_dilates { zeta(s)? } else { Complex64::zero() };
    let mut value = Complex64::zero();
    let mut err = 0.0;
    for (a, c) in f.terms() {
        let cv = c.to_f64(a);
        match *a {
            Atom::E(k) => {
                let t = -cv * pow_neg(k as f64, s);
                value += t * z;
                err += t.norm() * (1e-12 + 4.0 * f64::EPSILON * z.norm());
            }
            Atom::Chi => value += cv,
            Atom::Eps(m) => {
                let r = ((m as f64) * (m as f64 + 1.0)).sqrt();
                value += cv * r * (pow_neg(m as f64, s) - pow_neg(m as f64 + 1.0, s));
            }
            _ => unreachable!("canonical elements hold no phi/f atoms"),
        }
    }
    Ok(SeriesValue {
        value,
        terms_used: f.len().max(1) as u64,
        last_term_abs: 0.0,
        method: SeriesMethod::EulerCombination,
        tail_bound: Some(err + 8.0 * f64::EPSILON * value.norm()),
        exploratory: false,
    })
}

/// `Σ_{n≤n_max} ν̂(n, N) n^{−s}` with `ν̂` from the size-`N` projection.
/// Exploratory below `Re s = 1`.
pub fn nu_series_partial(
    s: Complex64,
    n_proj: usize,
    n_max: u64,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
    opts: SolveOptions,
) -> Result<SeriesValue> {
    require_terms(n_max)?;
    if n_max as usize > n_proj {
        return Err(Error::domain(format!("n_max = {n_max} exceeds N = {n_proj}")));
    }
    let table = nu_table(&[n_proj], n_max, engine, cache, opts)?;
    let (value, terms_used, last_term_abs) = partial_sum(table.rows.iter().map(|r| r.nu_hat), s);
    // Error of the finite sum as a function of ν̂(·, N); says nothing about N → ∞.
    let coeff_err: f64 = table
        .rows
        .iter()
        .map(|r| r.c_err * (r.k as f64).powf(-s.re))
        .sum();
    Ok(SeriesValue {
        value,
        terms_used,
        last_term_abs,
        method: SeriesMethod::DirichletPartial,
        tail_bound: Some(coeff_err),
        exploratory: s.re < 1.0,
    })
}

/// `Σ_{n≤N} (u(n; f) + λ) n^{−s}`: the partial sums of `F(s) + λζ(s)` with
/// both series truncated at the same `N`.
pub fn pole_cancelled_partial(f: &Element, s: Complex64, n_terms: u64) -> Result<SeriesValue> {
    require_terms(n_terms)?;
    let d = decompose(f)?;
    let lambda = d
        .lambda_exact
        .as_ref()
        .map(ratio_to_f64)
        .unwrap_or(d.lambda);
    let u = u_sequence(f, n_terms)?;
    let (value, terms_used, last_term_abs) = partial_sum(
        u.iter().map(|v| match &v.exact {
            Some(q) if d.lambda_exact.is_some() => {
                ratio_to_f64(&(q + d.lambda_exact.as_ref().unwrap_or(&BigRational::zero())))
            }
            _ => v.value + lambda,
        }),
        s,
    );
    Ok(SeriesValue {
        value,
        terms_used,
        last_term_abs,
        method: SeriesMethod::DirichletPartial,
        tail_bound: None,
        exploratory: s.re <= 1.0,
    })
}
