use crate::error::{Error, Result};
use crate::numerics::summation::NeumaierSum;
use crate::numerics::zeta::hurwitz_zeta_real;

/// ψ(x) for `x > 0`: upward recurrence to `x ≥ 10`, then the asymptotic
/// expansion through the `x⁻¹⁴` term.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("digamma requires finite x > 0, got {x}")));
    }
    Ok(digamma_pos(x))
}

#[inline]
pub(crate) fn digamma_pos(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    x.ln() - 0.5 * inv - series - shift
}

/// `a(m) = ∫_m^{m+1} (t − m) t⁻² dt = ln(1 + 1/m) − 1/(m + 1)`, i.e. the
/// inner product of `e₁` with the unit box on `[m, m+1)`.
pub fn ramp_weight(m: f64) -> f64 {
    if m < 8.0 {
        (1.0 / m).ln_1p() - 1.0 / (m + 1.0)
    } else {
        // Σ_{n≥2} (−1)ⁿ (n−1)/n · m⁻ⁿ
        let u = 1.0 / m;
        let mut acc = 0.0;
        for n in (2..=26).rev() {
            let c = (n - 1) as f64 / n as f64;
            let c = if n % 2 == 0 { c } else { -c };
            acc = acc * u + c;
        }
        acc * u * u
    }
}

/// `a(m) − a(m+1)`, evaluated without cancellation for large `m`.
pub(crate) fn ramp_weight_difference(m: f64) -> f64 {
    if m < 20.0 {
        (1.0 / (m * (m + 2.0))).ln_1p() - 1.0 / ((m + 1.0) * (m + 2.0))
    } else {
        // With x = m + 1: Σ_{n≥3} c_n x⁻ⁿ, c_n = 1 (n odd), 2/n − 1 (n even).
        let u = 1.0 / (m + 1.0);
        let mut acc = 0.0;
        for n in (3..=22).rev() {
            let c = if n % 2 == 1 { 1.0 } else { 2.0 / n as f64 - 1.0 };
            acc = acc * u + c;
        }
        acc * u * u * u
    }
}

/// `ω(z) = z⁻²((1−z)ln(1−z) + (1+z)ln(1+z)) − 1 = Σ_{j≥1} z^{2j}/((j+1)(2j+1))`
/// on `|z| ≤ 1`. The closed form is used for `|z| > 1/2`, the power series
/// otherwise.
pub fn omega(z: f64) -> Result<f64> {
    if !(z.abs() <= 1.0) {
        return Err(Error::domain(format!("omega requires |z| <= 1, got {z}")));
    }
    if z.abs() > 0.5 {
        omega_closed(z)
    } else {
        omega_series(z)
    }
}

pub fn omega_closed(z: f64) -> Result<f64> {
    if !(z.abs() <= 1.0) {
        return Err(Error::domain(format!("omega requires |z| <= 1, got {z}")));
    }
    let z = z.abs();
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == 1.0 {
        return Ok(2.0 * std::f64::consts::LN_2 - 1.0);
    }
    let inner = (1.0 - z) * (-z).ln_1p() + (1.0 + z) * z.ln_1p();
    Ok(inner / (z * z) - 1.0)
}

pub fn omega_series(z: f64) -> Result<f64> {
    if !(z.abs() <= 1.0) {
        return Err(Error::domain(format!("omega requires |z| <= 1, got {z}")));
    }
    let z2 = z * z;
    let mut pow = 1.0;
    let mut acc = NeumaierSum::new();
    for j in 1..=200_000u64 {
        pow *= z2;
        let jf = j as f64;
        let term = pow / ((jf + 1.0) * (2.0 * jf + 1.0));
        acc.add(term);
        if term < 1e-19 * acc.sum() {
            break;
        }
    }
    Ok(acc.sum())
}

/// `‖e₁‖² = ∫₀^∞ {t}² t⁻² dt = 1 + Σ_{m≥1} (1 − 2m ln(1+1/m) + m/(m+1))`.
///
/// The first `M` terms are summed directly; the tail uses the expansion
/// `Σ_{n≥2} (−1)ⁿ (n−1)/(n+1) m⁻ⁿ` summed against Hurwitz zeta tails.
/// Returns `(value, error bound)`.
pub fn e1_norm_sq() -> (f64, f64) {
    const M: u64 = 64;
    let mut acc = NeumaierSum::new();
    acc.add(1.0);
    for m in 1..=M {
        let mf = m as f64;
        let b = if m < 8 {
            1.0 - 2.0 * mf * (1.0 / mf).ln_1p() + mf / (mf + 1.0)
        } else {
            let u = 1.0 / mf;
            let mut s = 0.0;
            for n in (2..=30).rev() {
                let c = (n - 1) as f64 / (n + 1) as f64;
                let c = if n % 2 == 0 { c } else { -c };
                s = s * u + c;
            }
            s * u * u
        };
        acc.add(b);
    }
    let a = (M + 1) as f64;
    for n in 2..=16u32 {
        let c = (n - 1) as f64 / (n + 1) as f64;
        let c = if n % 2 == 0 { c } else { -c };
        acc.add(c * hurwitz_zeta_real(n as f64, a));
    }
    (acc.sum(), 8.0 * f64::EPSILON)
}
