//! Partial-sum diagnostics for the families `φ_k/k` and `f_k/k`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::{functionals::w_sequence, surd_value, Atom, Coeff, Element, InnerProductEngine};
use crate::arith::{ratio_to_f64, MertensTable};
use crate::error::{Error, Result};
use crate::numerics::NeumaierSum;

#[derive(Debug, Clone, PartialEq)]
pub struct PartialSumReport {
    pub k: u64,
    pub norm: f64,
    pub norm_err: f64,
    /// `‖S_K‖²` when it was computed in exact arithmetic.
    pub norm_sq_exact: Option<BigRational>,
    /// `⟨S_K, ε_d⟩` for the requested `d`.
    pub weak_coords: BTreeMap<u64, f64>,
}

/// `S_K = Σ_{k≤K} φ_k/k`, its norm and the coordinates `⟨S_K, ε_d⟩`.
pub fn phi_partial_sum_norm(k_max: u64, coords: &[u64]) -> Result<PartialSumReport> {
    if k_max == 0 {
        return Err(Error::domain("K must be >= 1"));
    }
    // Coefficient of ε_m is √(m(m+1))(1/(m+1) − 1/m) for m < K, −√(K(K+1))/K at m = K.
    let mut terms = Vec::with_capacity(k_max as usize);
    for m in 1..=k_max {
        let mut s = -BigRational::new(1.into(), m.into());
        if m < k_max {
            s += BigRational::new(1.into(), (m + 1).into());
        }
        terms.push((Atom::Eps(m), Coeff::surd(s)));
    }
    let s = Element::from_terms(terms)?;
    let norm_sq = InnerProductEngine::default().norm_sq(&s)?;
    let weak_coords = coords
        .iter()
        .map(|&d| {
            let v = s
                .coefficient(&Atom::Eps(d))
                .map(|c| c.to_f64(&Atom::Eps(d)))
                .unwrap_or(0.0);
            (d, v)
        })
        .collect();
    let norm = norm_sq.value.sqrt();
    Ok(PartialSumReport {
        k: k_max,
        norm,
        norm_err: norm_sq.err / (2.0 * norm) + f64::EPSILON * norm,
        norm_sq_exact: norm_sq.exact,
        weak_coords,
    })
}

/// `β_K = Σ_{k≤K} f_k/k = Σ_{d≤K} m(K/d)/d · φ_d`, with `m(x) = Σ_{n≤x} μ(n)/n`
/// taken from `table`.
pub fn fvas_partial_sum(k_max: u64, coords: &[u64], table: &MertensTable) -> Result<PartialSumReport> {
    if k_max == 0 {
        return Err(Error::domain("K must be >= 1"));
    }
    if k_max as usize > table.limit() {
        return Err(Error::domain(format!(
            "Mertens table limit {} below K = {k_max}",
            table.limit()
        )));
    }
    let c = |d: u64| -> f64 {
        if d > k_max {
            0.0
        } else {
            table.at((k_max / d) as usize) / d as f64
        }
    };
    let coord = |m: u64| surd_value(m) * (c(m + 1) - c(m));
    let mut acc = NeumaierSum::new();
    let mut c_m = c(1);
    for m in 1..=k_max {
        let c_next = c(m + 1);
        let diff = c_next - c_m;
        let mf = m as f64;
        acc.add(mf * (mf + 1.0) * diff * diff);
        c_m = c_next;
    }
    let norm_sq = acc.sum();
    let norm = norm_sq.sqrt();
    let weak_coords = coords.iter().map(|&d| (d, coord(d))).collect();
    Ok(PartialSumReport {
        k: k_max,
        norm,
        norm_err: 8.0 * f64::EPSILON * (k_max as f64).sqrt() * norm.max(1.0),
        norm_sq_exact: None,
        weak_coords,
    })
}

/// `Σ_{n≤N} w(n; f)/n`, with its rounding bound.
pub fn w_over_n_partial(f: &Element, n_max: u64) -> Result<(f64, f64)> {
    let w = w_sequence(f, n_max)?;
    let mut acc = NeumaierSum::new();
    let mut err = 0.0;
    let exact = w.iter().all(|v| v.exact.is_some());
    if exact && n_max <= 2_000 {
        let mut q = BigRational::zero();
        for (i, v) in w.iter().enumerate() {
            let e = v.exact.as_ref().unwrap();
            if !e.is_zero() {
                q += e / BigRational::from_integer((i as u64 + 1).into());
            }
        }
        return Ok((ratio_to_f64(&q), 0.0));
    }
    for (i, v) in w.iter().enumerate() {
        let n = (i + 1) as f64;
        acc.add(v.value / n);
        err += (v.err + f64::EPSILON * v.value.abs()) / n;
    }
    Ok((acc.sum(), err + 2.0 * f64::EPSILON * n_max as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_norm_is_root_two() {
        let sqrt2 = 2f64.sqrt();
        for k in [1u64, 2, 3, 10, 100] {
            let r = phi_partial_sum_norm(k, &[3]).unwrap();
            assert_eq!(r.norm_sq_exact, Some(BigRational::from_integer(2.into())));
            assert!((r.norm - sqrt2).abs() < 1e-15);
            if k >= 4 {
                assert!((r.weak_coords[&3] + 1.0 / 12f64.sqrt()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fvas_first_terms() {
        let t = MertensTable::new(100);
        let r = fvas_partial_sum(1, &[1], &t).unwrap();
        assert!((r.norm - 2f64.sqrt()).abs() < 1e-15);
        assert!((r.weak_coords[&1] + 2f64.sqrt()).abs() < 1e-15);
        // β₂ = f₁ + f₂/2 = −√2ε₁ + √2ε₁ − (√6/2)ε₂.
        let r = fvas_partial_sum(2, &[1, 2], &t).unwrap();
        assert!(r.weak_coords[&1].abs() < 1e-15);
        assert!((r.weak_coords[&2] + 6f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn w_over_n_for_dilates() {
        for k in 1..10u64 {
            let f = Element::atom(Atom::E(k)).unwrap();
            let (s, e) = w_over_n_partial(&f, 3 * k).unwrap();
            assert_eq!(e, 0.0);
            assert!((s + 1.0 / k as f64).abs() < 1e-16);
        }
    }
}
