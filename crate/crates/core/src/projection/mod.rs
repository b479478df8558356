//! Least-squares projections of `χ` onto `span(e₁, …, e_N)` (variant
//! `full`) and onto `span(e_k − e₁/k, 2 ≤ k ≤ N)` (variant `zero`), the
//! derived `ν̂` tables, and the appendix projections `e₁′`, `κ′`.

mod appendix;
mod cache;
mod linalg;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::mobius;
use crate::elements::{Atom, Element, InnerProductEngine};
use crate::error::{Error, Result};
use crate::numerics::DoubleDouble;

pub use appendix::{appendix_projections, AppendixProjections};
pub use cache::{CacheKey, GramCache};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Basis `e_1, …, e_N`.
    Full,
    /// Basis `e_k − e₁/k`, `2 ≤ k ≤ N`.
    Zero,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Zero => "zero",
        }
    }

    /// Basis indices for size `n`.
    pub fn indices(&self, n: usize) -> Vec<u64> {
        let first = match self {
            Variant::Full => 1,
            Variant::Zero => 2,
        };
        (first..=n as u64).collect()
    }

    pub fn basis_element(&self, k: u64) -> Result<Element> {
        let ek = Element::atom(Atom::E(k))?;
        Ok(match self {
            Variant::Full => ek,
            Variant::Zero => {
                let e1 = Element::atom(Atom::E(1))?;
                ek.sub(&e1.scale_rational(&num_rational::BigRational::new(1.into(), k.into())))
            }
        })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Variant::Full),
            "zero" => Ok(Variant::Zero),
            _ => Err(Error::Parse(format!("unknown variant {s:?} (expected full or zero)"))),
        }
    }
}

/// Normal equations `G c = b` of one projection, before and after solving.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramSystem {
    pub n: usize,
    pub variant: Variant,
    /// Basis indices `k` (the `k` in `e_k` or `e_k − e₁/k`).
    pub indices: Vec<u64>,
    pub gram: Vec<Vec<f64>>,
    pub gram_err: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub rhs_err: Vec<f64>,
    pub solution: Option<Solution>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub coefficients: Vec<f64>,
    /// Bound on `‖c − c_exact‖₂` from entry errors and rounding; it applies
    /// to each coefficient.
    pub coefficient_err: f64,
    /// `d² = ‖χ‖² − bᵀc`.
    pub distance_sq: f64,
    pub distance_sq_err: f64,
    pub condition_estimate: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub extended: bool,
}

impl Solution {
    pub fn distance(&self) -> f64 {
        self.distance_sq.max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Double-double factorisation and refinement.
    pub extended: bool,
    /// Solve even when the condition estimate exceeds the refusal limit.
    pub allow_ill_conditioned: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            extended: false,
            allow_ill_conditioned: false,
        }
    }
}

/// Refusal threshold `1/(100·ε)` on the condition estimate.
pub fn condition_limit(extended: bool) -> f64 {
    let eps = if extended { 2f64.powi(-104) } else { f64::EPSILON };
    1.0 / (100.0 * eps)
}

fn entry_key(variant: Variant, j: u64, k: u64, fingerprint: u32) -> CacheKey {
    CacheKey {
        variant: variant.as_str(),
        j: j.min(k),
        k: j.max(k),
        fingerprint,
    }
}

/// Builds `G` and `b` for size `n`, consulting and filling `cache`.
///
/// Entries are computed in parallel; cached values are reused bit for bit.
pub fn assemble_gram(
    n: usize,
    variant: Variant,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
) -> Result<GramSystem> {
    let min_n = match variant {
        Variant::Full => 1,
        Variant::Zero => 2,
    };
    if n < min_n {
        return Err(Error::domain(format!("variant {variant} needs N >= {min_n}, got {n}")));
    }
    let fingerprint = engine.budget().fingerprint();
    let indices = variant.indices(n);
    let basis: Vec<Element> = indices
        .iter()
        .map(|&k| variant.basis_element(k))
        .collect::<Result<_>>()?;
    let chi = Element::atom(Atom::Chi)?;

    // (row, Some(col)) with col ≤ row for G, (row, None) for b.
    let mut missing = Vec::new();
    for (a, &j) in indices.iter().enumerate() {
        for (b, &k) in indices.iter().enumerate().take(a + 1) {
            if cache.get(&entry_key(variant, j, k, fingerprint)).is_none() {
                missing.push((a, Some(b)));
            }
        }
        if cache.get(&entry_key(variant, 0, j, fingerprint)).is_none() {
            missing.push((a, None));
        }
    }
    let computed: Vec<(CacheKey, f64, f64)> = missing
        .par_iter()
        .map(|&(a, b)| {
            let j = indices[a];
            let (left, key_j) = match b {
                Some(b) => (&basis[b], indices[b]),
                None => (&chi, 0),
            };
            let r = engine.inner_product(left, &basis[a]).map_err(|e| Error::GramEntry {
                variant: variant.to_string(),
                j: key_j,
                k: j,
                source: Box::new(e),
            })?;
            Ok((entry_key(variant, key_j, j, fingerprint), r.value, r.err))
        })
        .collect::<Result<_>>()?;
    for (key, v, e) in computed {
        cache.insert(key, v, e);
    }

    let size = indices.len();
    let mut gram = vec![vec![0.0; size]; size];
    let mut gram_err = vec![vec![0.0; size]; size];
    let mut rhs = vec![0.0; size];
    let mut rhs_err = vec![0.0; size];
    for a in 0..size {
        for b in 0..=a {
            let (v, e) = cache
                .get(&entry_key(variant, indices[a], indices[b], fingerprint))
                .expect("entry just computed");
            gram[a][b] = v;
            gram[b][a] = v;
            gram_err[a][b] = e;
            gram_err[b][a] = e;
        }
        let (v, e) = cache
            .get(&entry_key(variant, 0, indices[a], fingerprint))
            .expect("entry just computed");
        rhs[a] = v;
        rhs_err[a] = e;
    }
    Ok(GramSystem {
        n,
        variant,
        indices,
        gram,
        gram_err,
        rhs,
        rhs_err,
        solution: None,
    })
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves `G c = b` by Cholesky with one refinement step (residual in
/// double-double), and records `d² = 1 − bᵀc` and the condition estimate.
pub fn solve_projection(mut g: GramSystem, opts: SolveOptions) -> Result<GramSystem> {
    let size = g.indices.len();
    let (lambda_min, lambda_max) = linalg::extreme_eigenvalues(&g.gram);
    let condition = if lambda_min > 0.0 {
        lambda_max / lambda_min
    } else {
        f64::INFINITY
    };
    let limit = condition_limit(opts.extended);
    if condition > limit && !opts.allow_ill_conditioned {
        return Err(Error::Conditioning {
            n: g.n,
            condition,
            limit,
        });
    }

    let coefficients: Vec<DoubleDouble> = if opts.extended {
        let l = linalg::cholesky_dd(&g.gram)?;
        let b: Vec<DoubleDouble> = g.rhs.iter().map(|&v| DoubleDouble::new(v)).collect();
        let mut c = linalg::cholesky_solve_dd(&l, &b);
        let r = linalg::residual_dd(&g.gram, &c, &g.rhs);
        let d = linalg::cholesky_solve_dd(&l, &r);
        for (ci, di) in c.iter_mut().zip(d) {
            *ci = *ci + di;
        }
        c
    } else {
        let l = linalg::cholesky(&g.gram)?;
        let c0 = linalg::cholesky_solve(&l, &g.rhs);
        let cd: Vec<DoubleDouble> = c0.iter().map(|&v| DoubleDouble::new(v)).collect();
        let r = linalg::residual_dd(&g.gram, &cd, &g.rhs);
        let rf: Vec<f64> = r.iter().map(|v| v.to_f64()).collect();
        let d = linalg::cholesky_solve(&l, &rf);
        cd.iter().zip(d).map(|(c, d)| *c + d).collect()
    };

    // d² = 1 − bᵀc in double-double.
    let mut btc = DoubleDouble::ZERO;
    for (b, c) in g.rhs.iter().zip(&coefficients) {
        btc = btc + *c * *b;
    }
    let distance_sq = (DoubleDouble::new(1.0) - btc).to_f64();
    let c: Vec<f64> = coefficients.iter().map(|v| v.to_f64()).collect();

    let c_norm = norm2(&c);
    let b_err = norm2(&g.rhs_err);
    let g_err = g.gram_err.iter().flatten().map(|e| e * e).sum::<f64>().sqrt();
    let unit = if opts.extended { 2f64.powi(-104) } else { f64::EPSILON };
    let solve_rounding = 4.0 * size as f64 * unit * lambda_max * c_norm;
    let coefficient_err = if lambda_min > 0.0 {
        (b_err + g_err * c_norm + solve_rounding) / lambda_min
    } else {
        f64::INFINITY
    };
    let distance_sq_err = 2.0 * c_norm * b_err
        + c_norm * c_norm * g_err
        + 4.0 * size as f64 * f64::EPSILON * (1.0 + norm2(&g.rhs) * c_norm);

    g.solution = Some(Solution {
        coefficients: c,
        coefficient_err,
        distance_sq,
        distance_sq_err,
        condition_estimate: condition,
        lambda_min,
        lambda_max,
        extended: opts.extended,
    });
    Ok(g)
}

/// Assembles and solves in one call.
pub fn project(
    n: usize,
    variant: Variant,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
    opts: SolveOptions,
) -> Result<GramSystem> {
    solve_projection(assemble_gram(n, variant, engine, cache)?, opts)
}

impl GramSystem {
    pub fn solution(&self) -> Result<&Solution> {
        self.solution
            .as_ref()
            .ok_or_else(|| Error::domain("Gram system has not been solved"))
    }

    /// Coefficient of basis index `k`, i.e. `c(k, N)` or `c₀(k, N)`.
    pub fn coefficient(&self, k: u64) -> Option<f64> {
        let pos = self.indices.iter().position(|&i| i == k)?;
        self.solution.as_ref().map(|s| s.coefficients[pos])
    }

    /// The projection as an element: `Σ c_k·basis_k`.
    pub fn projection_element(&self) -> Result<Element> {
        let s = self.solution()?;
        let mut out = Element::zero();
        for (&k, &c) in self.indices.iter().zip(&s.coefficients) {
            out = out.add(&self.variant.basis_element(k)?.scale_real(c));
        }
        Ok(out)
    }

    /// `b − G c`, evaluated in double-double.
    pub fn normal_equation_residual(&self) -> Result<Vec<f64>> {
        let s = self.solution()?;
        let c: Vec<DoubleDouble> = s.coefficients.iter().map(|&v| DoubleDouble::new(v)).collect();
        Ok(linalg::residual_dd(&self.gram, &c, &self.rhs)
            .iter()
            .map(|v| v.to_f64())
            .collect())
    }
}

/// One row of a `ν̂` table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuRow {
    pub k: u64,
    pub n: usize,
    pub c: f64,
    pub c_err: f64,
    /// `c₀(k, N)`; absent for `k = 1`.
    pub c0: Option<f64>,
    pub c0_err: Option<f64>,
    pub nu_hat: f64,
    pub nu0_hat: Option<f64>,
    pub mobius: i8,
    /// `|ν̂(k, N) − μ(k)| < 1/2`.
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NuTable {
    pub rows: Vec<NuRow>,
}

pub const NU_MATCH_THRESHOLD: f64 = 0.5;

/// `ν̂(k, N) = −c(k, N)` and `ν̂₀(k, N) = −c₀(k, N)` for `k ≤ k_max`, each
/// `N` in `ns`. These are finite-`N` approximations only.
pub fn nu_table(
    ns: &[usize],
    k_max: u64,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
    opts: SolveOptions,
) -> Result<NuTable> {
    let mut rows = Vec::new();
    for &n in ns {
        if (n as u64) < k_max {
            return Err(Error::domain(format!("N = {n} is below k_max = {k_max}")));
        }
        let full = project(n, Variant::Full, engine, cache, opts)?;
        let zero = if n >= 2 {
            Some(project(n, Variant::Zero, engine, cache, opts)?)
        } else {
            None
        };
        let full_err = full.solution()?.coefficient_err;
        for k in 1..=k_max {
            let c = full.coefficient(k).expect("k <= N");
            let (c0, c0_err) = match (&zero, k) {
                (Some(z), k) if k >= 2 => (z.coefficient(k), Some(z.solution()?.coefficient_err)),
                _ => (None, None),
            };
            let mu = mobius(k)?;
            let nu_hat = -c;
            rows.push(NuRow {
                k,
                n,
                c,
                c_err: full_err,
                c0,
                c0_err,
                nu_hat,
                nu0_hat: c0.map(|v| -v),
                mobius: mu,
                matches: (nu_hat - mu as f64).abs() < NU_MATCH_THRESHOLD,
            });
        }
    }
    Ok(NuTable { rows })
}

impl NuTable {
    pub const CSV_HEADER: &'static str = "# nyman nu-table v1";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        out.push_str("k,N,c,c_err,c0,c0_err,nu_hat,nu0_hat,mobius,match\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{:.17e},{:.3e},{},{},{:.17e},{},{},{}\n",
                r.k,
                r.n,
                r.c,
                r.c_err,
                opt(r.c0),
                r.c0_err.map(|v| format!("{v:.3e}")).unwrap_or_default(),
                r.nu_hat,
                opt(r.nu0_hat),
                r.mobius,
                r.matches
            ));
        }
        out
    }

    pub fn row(&self, k: u64, n: usize) -> Option<&NuRow> {
        self.rows.iter().find(|r| r.k == k && r.n == n)
    }
}

/// `Σ_{2≤k≤N} c₀(k, N)/k`.
pub fn nu0_sum_identity(
    n: usize,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
    opts: SolveOptions,
) -> Result<(f64, f64)> {
    let z = project(n, Variant::Zero, engine, cache, opts)?;
    let s = z.solution()?;
    let mut acc = crate::numerics::NeumaierSum::new();
    let mut harmonic = 0.0;
    for (&k, &c) in z.indices.iter().zip(&s.coefficients) {
        acc.add(c / k as f64);
        harmonic += 1.0 / (k as f64 * k as f64);
    }
    Ok((acc.sum(), s.coefficient_err * harmonic.sqrt()))
}

/// `‖χ_N − χ_{0,N}‖`, computed as the `G_full`-norm of the coefficient
/// difference, together with `d_{0,N}² − d_N²` (equal in exact arithmetic).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChiGap {
    pub n: usize,
    pub gap: f64,
    pub distance_sq_difference: f64,
    pub d_full: f64,
    pub d_zero: f64,
}

pub fn chi_gap(
    n: usize,
    engine: &InnerProductEngine,
    cache: &mut GramCache,
    opts: SolveOptions,
) -> Result<ChiGap> {
    let full = project(n, Variant::Full, engine, cache, opts)?;
    let zero = project(n, Variant::Zero, engine, cache, opts)?;
    let sf = full.solution()?;
    let sz = zero.solution()?;
    // χ_{0,N} in the e_k basis: e₁ gets −Σ c₀(k)/k, e_k gets c₀(k).
    let mut v = sf.coefficients.clone();
    for (&k, &c0) in zero.indices.iter().zip(&sz.coefficients) {
        v[0] += c0 / k as f64;
        v[(k - 1) as usize] -= c0;
    }
    let mut q = DoubleDouble::ZERO;
    for (i, row) in full.gram.iter().enumerate() {
        for (j, &gij) in row.iter().enumerate() {
            q = q + DoubleDouble::new(v[i] * v[j]) * gij;
        }
    }
    Ok(ChiGap {
        n,
        gap: q.to_f64().max(0.0).sqrt(),
        distance_sq_difference: sz.distance_sq - sf.distance_sq,
        d_full: sf.distance(),
        d_zero: sz.distance(),
    })
}
