//! Series with periodic coefficients.
//!
//! Inner products of step functions reduce to `Σ_{m≥1} c(m)/(m(m+1))`, and
//! inner products against `e₁` to `Σ_{m≥1} c(m) a(m)` with
//! `a(m) = ln(1+1/m) − 1/(m+1)`. When `c` is periodic both admit structured
//! evaluation: the first exactly through ψ, the second by splitting `c` into
//! its period mean and a zero-mean fluctuation that is Abel-summed.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::ratio_to_f64;
use crate::error::{Error, Result};
use crate::numerics::special::{digamma_pos, ramp_weight, ramp_weight_difference};
use crate::numerics::summation::{Accumulator, NeumaierSum};
use crate::numerics::ONE_MINUS_GAMMA;

/// Error target and work cap for a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionBudget {
    pub abs_tol: f64,
    pub max_terms: u64,
    /// Assumed algebraic decay exponent of the truncation remainder; only
    /// used to guess the first cutoff.
    pub tail_exponent: u32,
    /// Double-double accumulation in the series kernels.
    pub extended: bool,
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget {
            abs_tol: 1e-10,
            max_terms: 10_000_000,
            tail_exponent: 3,
            extended: false,
        }
    }
}

impl PrecisionBudget {
    pub fn new(abs_tol: f64, max_terms: u64) -> Result<Self> {
        let b = PrecisionBudget {
            abs_tol,
            max_terms,
            ..Default::default()
        };
        b.validate()?;
        Ok(b)
    }

    pub fn with_extended(mut self, extended: bool) -> Self {
        self.extended = extended;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !self.abs_tol.is_finite() {
            return Err(Error::domain(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.max_terms < 1 {
            return Err(Error::domain("max_terms must be >= 1"));
        }
        if self.tail_exponent < 1 {
            return Err(Error::domain("tail_exponent must be >= 1"));
        }
        Ok(())
    }

    /// Stable 32-bit fingerprint, used as part of cache keys.
    pub fn fingerprint(&self) -> u32 {
        let mut h = crc32fast::Hasher::new();
        h.update(&self.abs_tol.to_bits().to_le_bytes());
        h.update(&self.max_terms.to_le_bytes());
        h.update(&self.tail_exponent.to_le_bytes());
        h.update(&[u8::from(self.extended)]);
        h.finalize()
    }
}

/// Value of a truncated or structured series with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEstimate {
    pub value: f64,
    pub err: f64,
    /// Number of explicitly summed terms.
    pub terms: u64,
}

/// `c(1..=L)`, extended periodically by `c(m) = c(((m−1) mod L) + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicCoefficients {
    values: Vec<BigRational>,
}

impl PeriodicCoefficients {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("periodic coefficients need period L >= 1"));
        }
        Ok(PeriodicCoefficients { values })
    }

    pub fn constant(value: BigRational) -> Self {
        PeriodicCoefficients {
            values: vec![value],
        }
    }

    /// `c(m) = {m/k}^power` (power 1 or 2 are the cases used).
    pub fn fractional_part(k: u64, power: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("fractional part period must be >= 1"));
        }
        Self::new(
            (1..=k)
                .map(|m| {
                    let f = BigRational::new((m % k).into(), k.into());
                    num_traits::pow(f, power as usize)
                })
                .collect(),
        )
    }

    pub fn period(&self) -> u64 {
        self.values.len() as u64
    }

    /// `c(m)` for any `m ≥ 1`.
    pub fn get(&self, m: u64) -> &BigRational {
        &self.values[((m - 1) % self.period()) as usize]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(ratio_to_f64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| ratio_to_f64(&v.abs()))
            .fold(0.0, f64::max)
    }
}

/// `Σ_{m≥1} c(m)/(m(m+1)) = (1/L) Σ_{r=1}^{L} c(r)(ψ((r+1)/L) − ψ(r/L))`.
pub fn periodic_sum(c: &PeriodicCoefficients) -> f64 {
    let values = c.to_f64();
    periodic_sum_with(c.period(), |r| values[(r - 1) as usize], false).value
}

/// Kernel behind [`periodic_sum`] for coefficients given as a function of
/// `r ∈ 1..=L`.
pub fn periodic_sum_with(period: u64, c: impl Fn(u64) -> f64, extended: bool) -> SeriesEstimate {
    let lf = period as f64;
    let mut acc = Accumulator::new(extended);
    let mut bound = NeumaierSum::new();
    let mut psi_lo = digamma_pos(1.0 / lf);
    for r in 1..=period {
        let psi_hi = digamma_pos((r + 1) as f64 / lf);
        let cr = c(r);
        if cr != 0.0 {
            acc.add(cr * (psi_hi - psi_lo));
            bound.add(cr.abs() * (psi_hi.abs() + psi_lo.abs()));
        }
        psi_lo = psi_hi;
    }
    let value = acc.value() / lf;
    let err = 8.0 * f64::EPSILON * (bound.sum() / lf + value.abs());
    SeriesEstimate {
        value,
        err,
        terms: period,
    }
}

/// `Σ_{j≥1} c(j)(ln(1+1/j) − 1/(j+1))`.
///
/// The period mean contributes `c̄(1 − γ)`. For the fluctuation
/// `d = c − c̄` with prefix sums `D`, Abel summation gives
/// `Σ d(m) a(m) = D̄ a(1) + Σ_{m≥1} (D(m) − D̄) Δ(m)` with
/// `Δ(m) = a(m) − a(m+1) ~ m⁻³`; truncating after a whole number of periods
/// leaves a remainder bounded by `max|E| Δ(M+1)`, `E` being the prefix sums
/// of `D − D̄`.
pub fn log_weighted_periodic_sum(
    c: &PeriodicCoefficients,
    budget: &PrecisionBudget,
) -> Result<SeriesEstimate> {
    let values = c.to_f64();
    log_weighted_periodic_sum_with(c.period(), |r| values[(r - 1) as usize], budget)
}

pub fn log_weighted_periodic_sum_with(
    period: u64,
    c: impl Fn(u64) -> f64,
    budget: &PrecisionBudget,
) -> Result<SeriesEstimate> {
    budget.validate()?;
    let l = period as usize;
    let values: Vec<f64> = (1..=period).map(&c).collect();
    let mean = values.iter().copied().collect::<NeumaierSum>().sum() / period as f64;

    let mut fluct = Vec::with_capacity(l);
    let mut running = NeumaierSum::new();
    for v in &values {
        running.add(v - mean);
        fluct.push(running.sum());
    }
    let d_mean = fluct.iter().copied().collect::<NeumaierSum>().sum() / period as f64;
    let e: Vec<f64> = fluct.iter().map(|d| d - d_mean).collect();
    let mut max_abs_e_prefix: f64 = 0.0;
    let mut running = NeumaierSum::new();
    for v in &e {
        running.add(*v);
        max_abs_e_prefix = max_abs_e_prefix.max(running.sum().abs());
    }

    let mut acc = Accumulator::new(budget.extended);
    acc.add(mean * ONE_MINUS_GAMMA);
    acc.add(d_mean * ramp_weight(1.0));
    let mut rounding = 4.0 * f64::EPSILON * (mean.abs() + d_mean.abs());

    let fluctuation_is_zero = e.iter().all(|v| v.abs() <= 4.0 * f64::EPSILON * mean.abs());
    if fluctuation_is_zero {
        return Ok(SeriesEstimate {
            value: acc.value(),
            err: rounding,
            terms: 0,
        });
    }

    // Smallest whole number of periods meeting half the tolerance.
    let target = 0.5 * budget.abs_tol;
    let remainder = |periods: u64| max_abs_e_prefix * ramp_weight_difference((periods * period) as f64 + 1.0);
    let guess = (max_abs_e_prefix / target).powf(1.0 / budget.tail_exponent as f64) / period as f64;
    let mut periods = (guess.floor() as u64).max(1);
    while periods > 1 && remainder(periods - 1) <= target {
        periods -= 1;
    }
    while remainder(periods) > target {
        periods += 1;
        if periods.saturating_mul(period) > budget.max_terms {
            break;
        }
    }
    let max_periods = budget.max_terms / period;
    if periods > max_periods {
        let attained = if max_periods == 0 {
            f64::INFINITY
        } else {
            remainder(max_periods)
        };
        return Err(Error::Precision {
            target: budget.abs_tol,
            attained,
            max_terms: budget.max_terms,
        });
    }

    let terms = periods * period;
    let mut abs_sum = NeumaierSum::new();
    for m in 1..=terms {
        let em = e[((m - 1) % period) as usize];
        if em != 0.0 {
            let t = em * ramp_weight_difference(m as f64);
            acc.add(t);
            abs_sum.add(t.abs());
        }
    }
    rounding += 8.0 * f64::EPSILON * abs_sum.sum();
    let err = remainder(periods) + rounding;
    if err > budget.abs_tol {
        return Err(Error::Precision {
            target: budget.abs_tol,
            attained: err,
            max_terms: budget.max_terms,
        });
    }
    Ok(SeriesEstimate {
        value: acc.value(),
        err,
        terms,
    })
}
