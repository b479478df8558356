//! Riemann and Hurwitz zeta functions.
//!
//! [`zeta`] uses Borwein's accelerated alternating (eta) series on `Re s > 0`.
//! [`hurwitz_zeta`] uses Euler–Maclaurin summation and is the analytic
//! continuation for every `s ≠ 1`; the two share no code.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// B_{2k} for k = 1..=12.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// ζ(s) for `Re s > 0`, `s ≠ 1`.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if !(s.re > 0.0) || !s.re.is_finite() || !s.im.is_finite() {
        return Err(Error::domain(format!("zeta requires Re s > 0, got {s}")));
    }
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole);
    }
    let one = Complex64::new(1.0, 0.0);
    let denom = one - Complex64::new(2.0, 0.0).powc(one - s);
    if denom.norm() < 1e-4 {
        // Near s = 1 + 2πik/ln 2 the eta-to-zeta factor vanishes.
        return Ok(hurwitz_zeta(s, 1.0));
    }
    Ok(eta_borwein(s) / denom)
}

/// Dirichlet eta function by Borwein's algorithm 2.
fn eta_borwein(s: Complex64) -> Complex64 {
    let t = s.im.abs();
    // Error ≲ 3 (1 + 2|t|) e^{π|t|/2} / (3 + √8)^n, with margin for 1/|Γ(s)|.
    let need = ((3.0 * (1.0 + 2.0 * t)).ln() + std::f64::consts::PI * t + 40.0) / 1.7627;
    let n = (need.ceil() as usize + 4).clamp(24, 380);
    let nf = n as f64;
    let mut d = Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut acc = 0.0;
    for i in 0..=n {
        acc += term;
        d.push(acc);
        let i_f = i as f64;
        term *= 4.0 * (nf + i_f) * (nf - i_f) / ((2.0 * i_f + 1.0) * (2.0 * i_f + 2.0));
    }
    let dn = d[n];
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let base = Complex64::new((k + 1) as f64, 0.0);
        let w = (d[k] - dn) * if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += w * base.powc(-s);
    }
    -sum / dn
}

/// Hurwitz ζ(s, a) = Σ_{i≥0} (a + i)⁻ˢ for `a > 0`, `s ≠ 1`, continued
/// analytically via Euler–Maclaurin.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let shift = ((s.norm() + 25.0 - a).ceil()).max(0.0) as u64;
    let mut head = Complex64::new(0.0, 0.0);
    for i in 0..shift {
        head += Complex64::new(a + i as f64, 0.0).powc(-s);
    }
    let x = a + shift as f64;
    let xc = Complex64::new(x, 0.0);
    let x_s = xc.powc(-s);
    let mut total = head + xc * x_s / (s - one) + 0.5 * x_s;
    // g = (s)_{2k−1} x^{−s−2k+1} / (2k)!
    let mut g = s * x_s / (2.0 * x);
    let x2 = x * x;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = *b * g;
        total += term;
        if term.norm() < 1e-18 * total.norm() {
            break;
        }
        let k = (k + 1) as f64;
        g = g * (s + (2.0 * k - 1.0)) * (s + 2.0 * k) / ((2.0 * k + 1.0) * (2.0 * k + 2.0) * x2);
    }
    total
}

/// Real-argument Hurwitz zeta, `s > 1`, `a > 0`.
pub fn hurwitz_zeta_real(s: f64, a: f64) -> f64 {
    hurwitz_zeta(Complex64::new(s, 0.0), a).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::summation::NeumaierSum;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Direct summation with an Euler–Maclaurin tail of three terms.
    fn zeta_direct(s: f64, n: u64) -> f64 {
        let mut acc = NeumaierSum::new();
        for k in (1..=n).rev() {
            acc.add((k as f64).powf(-s));
        }
        let nf = n as f64;
        let tail = nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s) + s / 12.0 * nf.powf(-s - 1.0);
        acc.sum() + tail
    }

    #[test]
    fn zeta_two_is_basel() {
        let z = zeta(c(2.0, 0.0)).unwrap();
        assert!((z.re - PI * PI / 6.0).abs() < 1e-14);
        assert!(z.im.abs() < 1e-15);
        assert!((zeta_direct(2.0, 1_000_000) - PI * PI / 6.0).abs() < 1e-13);
    }

    #[test]
    fn zeta_one_half() {
        let z = zeta(c(0.5, 0.0)).unwrap();
        assert!((z.re + 1.460_354_508_809_586_8).abs() < 1e-12, "{z}");
    }

    #[test]
    fn zeta_conjugate_symmetry() {
        for s in [c(2.0, 0.0), c(0.7, 3.0), c(1.5, -7.25)] {
            let a = zeta(s).unwrap();
            let b = zeta(s.conj()).unwrap();
            assert!((a - b.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn zeta_errors() {
        assert_eq!(zeta(c(1.0, 0.0)), Err(Error::Pole));
        assert!(matches!(zeta(c(-0.5, 1.0)), Err(Error::Domain(_))));
        assert!(matches!(zeta(c(0.0, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn zeta_matches_direct_sum_right_half_plane() {
        for s in [2.0, 2.5, 3.0, 4.0, 7.5] {
            let got = zeta(c(s, 0.0)).unwrap().re;
            assert!((got - zeta_direct(s, 20_000)).abs() < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn zeta_first_zero() {
        let z = zeta(c(0.5, 14.134_725_141_734_693)).unwrap();
        assert!(z.norm() < 1e-10, "{z}");
    }

    #[test]
    fn hurwitz_agrees_with_borwein() {
        for s in [c(2.0, 0.0), c(0.6, 2.0), c(0.8, 3.0), c(1.0, 5.0), c(2.9, -1.0)] {
            let a = zeta(s).unwrap();
            let b = hurwitz_zeta(s, 1.0);
            assert!((a - b).norm() < 1e-12, "s = {s}: {a} vs {b}");
        }
        // Near s = 1 + 2πi/ln 2 the eta route is avoided.
        let s = c(1.0, 2.0 * PI / std::f64::consts::LN_2);
        assert!(zeta(s).unwrap().norm().is_finite());
    }

    #[test]
    fn hurwitz_shift_identity() {
        let s = c(0.75, 1.5);
        let a = 0.3;
        let lhs = hurwitz_zeta(s, a) - hurwitz_zeta(s, a + 1.0);
        let rhs = c(a, 0.0).powc(-s);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
