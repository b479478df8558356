//! Exact arithmetical functions: Möbius, Dirichlet convolution and inversion,
//! Mertens-type sums and the block-variation diagnostic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::summation::NeumaierSum;

/// Default upper limit for batch Möbius tables.
pub const DEFAULT_SIEVE_LIMIT: usize = 1_000_000;

/// μ(n) by trial division.
pub fn mobius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::domain("mobius(0) is undefined"));
    }
    let mut n = n;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

/// Distinct prime factors with multiplicity, by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Sorted divisors of `n`.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Immutable table of μ(1..=limit), built with a linear sieve.
#[derive(Debug, Clone)]
pub struct MobiusSieve {
    values: Vec<i8>,
}

impl MobiusSieve {
    pub fn new(limit: usize) -> Self {
        let mut mu = vec![1i8; limit + 1];
        let mut composite = vec![false; limit + 1];
        let mut primes: Vec<usize> = Vec::new();
        if limit >= 1 {
            mu[0] = 0;
        }
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i);
                mu[i] = -1;
            }
            for &p in &primes {
                let ip = i * p;
                if ip > limit {
                    break;
                }
                composite[ip] = true;
                if i % p == 0 {
                    mu[ip] = 0;
                    break;
                }
                mu[ip] = -mu[i];
            }
        }
        MobiusSieve { values: mu }
    }

    pub fn limit(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    /// μ(n); falls back to trial division beyond the table.
    pub fn get(&self, n: u64) -> Result<i8> {
        match self.values.get(n as usize) {
            Some(_) if n == 0 => Err(Error::domain("mobius(0) is undefined")),
            Some(&v) => Ok(v),
            None => mobius(n),
        }
    }
}

/// A finite prefix `a(1), …, a(N)` of an arithmetical function with exact
/// rational values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithSeq {
    values: Vec<BigRational>,
}

impl ArithSeq {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("arithmetical sequence must have length >= 1"));
        }
        Ok(ArithSeq { values })
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(u64) -> BigRational) -> Result<Self> {
        Self::new((1..=len as u64).map(&mut f).collect())
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn ones(len: usize) -> Result<Self> {
        Self::from_fn(len, |_| BigRational::one())
    }

    /// The convolution identity `[n = 1]`.
    pub fn delta(len: usize) -> Result<Self> {
        Self::from_fn(len, |n| {
            if n == 1 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    pub fn mobius_prefix(len: usize) -> Result<Self> {
        let sieve = MobiusSieve::new(len);
        Self::from_fn(len, |n| {
            BigRational::from_integer(i64::from(sieve.values[n as usize]).into())
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Value at `n` (1-based).
    pub fn get(&self, n: u64) -> Option<&BigRational> {
        if n == 0 {
            return None;
        }
        self.values.get(n as usize - 1)
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(ratio_to_f64).collect()
    }
}

/// `(a * b)(n) = Σ_{d | n} a(d) b(n/d)` for `n ≤ N`.
pub fn dirichlet_convolve(a: &ArithSeq, b: &ArithSeq) -> Result<ArithSeq> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let mut out = vec![BigRational::zero(); n];
    for d in 1..=n {
        let ad = &a.values[d - 1];
        if ad.is_zero() {
            continue;
        }
        let mut m = d;
        let mut q = 1;
        while m <= n {
            let bq = &b.values[q - 1];
            if !bq.is_zero() {
                out[m - 1] += ad * bq;
            }
            m += d;
            q += 1;
        }
    }
    ArithSeq::new(out)
}

/// `w = μ * u`. Inverse of convolving with the all-ones sequence.
pub fn mobius_invert(u: &ArithSeq) -> ArithSeq {
    let mu = ArithSeq::mobius_prefix(u.len()).expect("non-empty");
    dirichlet_convolve(&mu, u).expect("equal lengths")
}

/// `m(x) = Σ_{n ≤ x} μ(n)/n`, exact.
pub fn mertens_m(x: f64) -> Result<BigRational> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("mertens_m requires 0 < x < inf, got {x}")));
    }
    let n0 = x.floor() as usize;
    if n0 == 0 {
        return Ok(BigRational::zero());
    }
    let sieve = MobiusSieve::new(n0);
    // Accumulate over the common denominator lcm(squarefree n ≤ x) lazily: plain
    // rational addition keeps the value reduced.
    let mut acc = BigRational::zero();
    for n in 1..=n0 {
        let mu = sieve.values[n];
        if mu != 0 {
            acc += BigRational::new(BigInt::from(mu), BigInt::from(n));
        }
    }
    Ok(acc)
}

/// Floating prefix sums `m(0..=limit)` with compensated accumulation, for
/// arguments far beyond where exact rationals are affordable.
#[derive(Debug, Clone)]
pub struct MertensTable {
    prefix: Vec<f64>,
}

impl MertensTable {
    pub fn new(limit: usize) -> Self {
        let sieve = MobiusSieve::new(limit.max(1));
        Self::from_sieve(&sieve, limit)
    }

    pub fn from_sieve(sieve: &MobiusSieve, limit: usize) -> Self {
        let mut prefix = Vec::with_capacity(limit + 1);
        prefix.push(0.0);
        let mut acc = NeumaierSum::new();
        for n in 1..=limit {
            let mu = sieve.values[n];
            if mu != 0 {
                acc.add(f64::from(mu) / n as f64);
            }
            prefix.push(acc.sum());
        }
        MertensTable { prefix }
    }

    pub fn limit(&self) -> usize {
        self.prefix.len() - 1
    }

    /// `m(n)` for an integer argument `n ≤ limit`.
    pub fn at(&self, n: usize) -> f64 {
        self.prefix[n]
    }

    /// `m(x)` for real `x > 0`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 1.0 {
            0.0
        } else {
            self.prefix[x.floor() as usize]
        }
    }
}

/// `Σ_{k ≥ 1} |m(x/k) − m(x/(k+1))|^α` with `m` the Mertens-type sum above.
///
/// Only `⌊x⌋` matters because `⌊x/k⌋ = ⌊⌊x⌋/k⌋`, so the summands are taken
/// from an integer-indexed table. Terms vanish for `k > x`.
pub fn block_variation(x: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::domain(format!("block_variation requires alpha > 1, got {alpha}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("block_variation requires x > 0, got {x}")));
    }
    let n0 = x.floor() as usize;
    if n0 == 0 {
        return Ok(0.0);
    }
    let table = MertensTable::new(n0);
    Ok(block_variation_with(&table, n0, alpha))
}

/// Same as [`block_variation`] for integer `x = n0`, reusing a table that
/// covers `n0`.
pub fn block_variation_with(table: &MertensTable, n0: usize, alpha: f64) -> f64 {
    let mut acc = NeumaierSum::new();
    for k in 1..=n0 {
        let diff = table.at(n0 / k) - table.at(n0 / (k + 1));
        if diff != 0.0 {
            acc.add(diff.abs().powf(alpha));
        }
    }
    acc.sum()
}

pub(crate) fn ratio_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_i64(), q.denom().to_i64()) {
        if n.unsigned_abs() < (1u64 << 53) && d < (1i64 << 53) {
            return n as f64 / d as f64;
        }
    }
    q.to_f64().unwrap_or_else(|| {
        // Huge numerators and denominators: scale down by bit shifting.
        let nb = q.numer().bits() as i64;
        let db = q.denom().bits() as i64;
        let shift_n = (nb - 60).max(0);
        let shift_d = (db - 60).max(0);
        let n = (q.numer().abs() >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
        let d = (q.denom() >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
        let v = n / d * 2f64.powi((shift_n - shift_d) as i32);
        if q.is_negative() {
            -v
        } else {
            v
        }
    })
}
