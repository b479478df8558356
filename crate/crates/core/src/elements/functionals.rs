//! Decomposition `f = λe₁ + h`, the arithmetical functions `u(n; f)` and
//! `w(n; f) = (μ * u)(n)`, and pointwise evaluation.

use num_rational::BigRational;
use num_traits::Zero;

use super::{surd_square, surd_value, Atom, Element, InnerProductEngine};
use crate::arith::{factorize, mobius_invert, ratio_to_f64, ArithSeq, MobiusSieve};
use crate::error::{Error, Result};
use crate::numerics::{omega, NeumaierSum, LN4_MINUS_1};

/// Absolute error allowance for the closed-form constants `⟨e₁, φ_n⟩` and
/// `⟨e₁, f_n⟩`.
const CONSTANT_ERR: f64 = 4e-15;

/// A real number with error bound, and its exact rational value when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ArithValue {
    pub value: f64,
    pub err: f64,
    pub exact: Option<BigRational>,
}

impl ArithValue {
    fn from_parts(q: BigRational, x: f64, x_mag: f64, inexact: bool) -> Self {
        let qf = ratio_to_f64(&q);
        let value = qf + x;
        ArithValue {
            value,
            err: if inexact {
                4.0 * f64::EPSILON * (x_mag + qf.abs())
            } else {
                0.0
            },
            exact: (!inexact).then_some(q),
        }
    }
}

/// `u` via the step decomposition, or via `⟨f, ψ_n⟩` (and `w` via Möbius
/// inversion of `u`, or via `⟨f, g_n⟩`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Definition,
    Functional,
}

/// `f = λe₁ + h`, `h` constant on each `[j, j+1)`, `h = 0` on `(0, 1)`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub lambda: f64,
    pub lambda_exact: Option<BigRational>,
    element: Element,
}

pub fn decompose(f: &Element) -> Result<Decomposition> {
    if f.contains_kappa() {
        return Err(Error::domain("kappa is not an element of D and cannot be decomposed"));
    }
    let mut q = BigRational::zero();
    let mut x = 0.0;
    for (atom, c) in f.terms() {
        if let Atom::E(k) = atom {
            q += &c.rational / BigRational::from_integer((*k).into());
            x += c.real / *k as f64;
        }
    }
    let inexact = x != 0.0;
    let qf = ratio_to_f64(&q);
    Ok(Decomposition {
        lambda: qf + x,
        lambda_exact: (!inexact).then_some(q),
        element: f.clone(),
    })
}

impl Decomposition {
    /// `h(j)`, the value of `f − λe₁` on `[j, j+1)`.
    pub fn step_value(&self, j: u64) -> ArithValue {
        if j == 0 {
            return ArithValue {
                value: 0.0,
                err: 0.0,
                exact: Some(BigRational::zero()),
            };
        }
        let mut q = BigRational::zero();
        let mut x = NeumaierSum::new();
        let mut x_mag = 0.0;
        let mut inexact = false;
        for (atom, c) in self.element.terms() {
            match *atom {
                Atom::E(k) => {
                    let r = j % k;
                    if r != 0 {
                        q += &c.rational * BigRational::new(r.into(), k.into());
                        if c.real != 0.0 {
                            let t = c.real * r as f64 / k as f64;
                            x.add(t);
                            x_mag += t.abs();
                            inexact = true;
                        }
                    }
                }
                Atom::Eps(m) if m == j => {
                    q += &c.surd * surd_square(m);
                    let lin = ratio_to_f64(&c.rational) + c.real;
                    if lin != 0.0 {
                        let t = lin * surd_value(m);
                        x.add(t);
                        x_mag += t.abs();
                        inexact = true;
                    }
                }
                Atom::Chi => {
                    q += &c.rational;
                    if c.real != 0.0 {
                        x.add(c.real);
                        x_mag += c.real.abs();
                        inexact = true;
                    }
                }
                _ => {}
            }
        }
        ArithValue::from_parts(q, x.sum(), x_mag, inexact)
    }

    /// `u(n) = −λ + h(n) − h(n−1)`.
    pub fn u(&self, n: u64) -> ArithValue {
        let hn = self.step_value(n);
        let hp = self.step_value(n - 1);
        let exact = match (&self.lambda_exact, &hn.exact, &hp.exact) {
            (Some(l), Some(a), Some(b)) => Some(a - b - l),
            _ => None,
        };
        let value = match &exact {
            Some(q) => ratio_to_f64(q),
            None => -self.lambda + hn.value - hp.value,
        };
        let err = if exact.is_some() {
            0.0
        } else {
            hn.err + hp.err + 4.0 * f64::EPSILON * (self.lambda.abs() + hn.value.abs() + hp.value.abs())
        };
        ArithValue { value, err, exact }
    }
}

/// `⟨e₁, φ_k⟩ = −ω(1/k)`.
pub fn e1_inner_phi(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("phi index must be >= 1"));
    }
    Ok(-omega(1.0 / k as f64)?)
}

/// `⟨e₁, f_n⟩ = −Σ_{j≥1} n^{−2j} Π_{p|n}(1 − p^{2j}) / ((j+1)(2j+1))`.
///
/// The `j`-th product tends to `μ(n)`; that limit is summed in closed form
/// (`μ(n)(ln 4 − 1)`) and only the geometrically decaying remainder is summed
/// term by term.
pub fn e1_inner_fvas(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("f index must be >= 1"));
    }
    let fac = factorize(n);
    let squarefree = fac.iter().all(|&(_, a)| a == 1);
    let mu = if squarefree {
        if fac.len() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    } else {
        0.0
    };
    let mut acc = NeumaierSum::new();
    acc.add(mu * LN4_MINUS_1);
    for j in 1..=400u32 {
        let jf = j as f64;
        let r = if squarefree {
            let log: f64 = fac
                .iter()
                .map(|&(p, _)| (-(p as f64).powf(-2.0 * jf)).ln_1p())
                .sum();
            mu * log.exp_m1()
        } else {
            fac.iter()
                .map(|&(p, a)| {
                    let p = p as f64;
                    p.powf(-2.0 * jf * a as f64) - p.powf(-2.0 * jf * (a as f64 - 1.0))
                })
                .product()
        };
        let term = r / ((jf + 1.0) * (2.0 * jf + 1.0));
        acc.add(term);
        if term.abs() < 1e-20 {
            break;
        }
    }
    Ok(-acc.sum())
}

/// `ψ_n = (⟨e₁, φ_n⟩ − 1)κ − φ_n`, so that `u(n; f) = ⟨f, ψ_n⟩`.
pub fn psi_functional(n: u64) -> Result<Element> {
    let c = e1_inner_phi(n)? - 1.0;
    let kappa = Element::atom(Atom::Kappa)?.scale_real(c);
    Ok(kappa.sub(&Element::atom(Atom::Phi(n))?))
}

/// `g_n = (⟨e₁, f_n⟩ − [n=1])κ − f_n`, so that `w(n; f) = ⟨f, g_n⟩`.
pub fn g_functional(n: u64) -> Result<Element> {
    let c = e1_inner_fvas(n)? - if n == 1 { 1.0 } else { 0.0 };
    let kappa = Element::atom(Atom::Kappa)?.scale_real(c);
    Ok(kappa.sub(&Element::atom(Atom::FVas(n))?))
}

fn require_d(f: &Element) -> Result<()> {
    if f.contains_kappa() {
        Err(Error::domain("u and w are defined for elements of D only (no kappa)"))
    } else {
        Ok(())
    }
}

fn functional_value(
    f: &Element,
    functional: Element,
    lambda: f64,
    engine: &InnerProductEngine,
) -> Result<ArithValue> {
    let r = engine.inner_product(f, &functional)?;
    Ok(ArithValue {
        value: r.value,
        err: r.err + lambda.abs() * CONSTANT_ERR,
        exact: None,
    })
}

pub fn u_of(f: &Element, n: u64, route: Route, engine: &InnerProductEngine) -> Result<ArithValue> {
    require_d(f)?;
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    let d = decompose(f)?;
    match route {
        Route::Definition => Ok(d.u(n)),
        Route::Functional => functional_value(f, psi_functional(n)?, d.lambda, engine),
    }
}

pub fn w_of(f: &Element, n: u64, route: Route, engine: &InnerProductEngine) -> Result<ArithValue> {
    require_d(f)?;
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    match route {
        Route::Definition => {
            let d = decompose(f)?;
            let divs = crate::arith::divisors(n);
            let mut q = BigRational::zero();
            let mut x = NeumaierSum::new();
            let mut err = 0.0;
            let mut exact = true;
            for dd in divs {
                let mu = crate::arith::mobius(n / dd)?;
                if mu == 0 {
                    continue;
                }
                let u = d.u(dd);
                x.add(mu as f64 * u.value);
                err += u.err + 2.0 * f64::EPSILON * u.value.abs();
                match u.exact {
                    Some(e) if exact => {
                        if mu > 0 {
                            q += e
                        } else {
                            q -= e
                        }
                    }
                    _ => exact = false,
                }
            }
            Ok(if exact {
                ArithValue {
                    value: ratio_to_f64(&q),
                    err: 0.0,
                    exact: Some(q),
                }
            } else {
                ArithValue {
                    value: x.sum(),
                    err,
                    exact: None,
                }
            })
        }
        Route::Functional => {
            let lambda = decompose(f)?.lambda;
            functional_value(f, g_functional(n)?, lambda, engine)
        }
    }
}

/// `u(1..=n_max; f)` by the definition route.
pub fn u_sequence(f: &Element, n_max: u64) -> Result<Vec<ArithValue>> {
    require_d(f)?;
    let d = decompose(f)?;
    Ok((1..=n_max).map(|n| d.u(n)).collect())
}

/// `w(1..=n_max; f) = μ * u`, exact whenever every `u(n)` is.
pub fn w_sequence(f: &Element, n_max: u64) -> Result<Vec<ArithValue>> {
    let u = u_sequence(f, n_max)?;
    if n_max == 0 {
        return Ok(Vec::new());
    }
    if u.iter().all(|v| v.exact.is_some()) {
        let seq = ArithSeq::new(u.into_iter().map(|v| v.exact.unwrap()).collect())?;
        let w = mobius_invert(&seq);
        return Ok(w
            .values()
            .iter()
            .map(|q| ArithValue {
                value: ratio_to_f64(q),
                err: 0.0,
                exact: Some(q.clone()),
            })
            .collect());
    }
    let sieve = MobiusSieve::new(n_max as usize);
    let mut out: Vec<(NeumaierSum, f64)> = (0..n_max).map(|_| (NeumaierSum::new(), 0.0)).collect();
    for d in 1..=n_max {
        let ud = &u[(d - 1) as usize];
        if ud.value == 0.0 && ud.err == 0.0 {
            continue;
        }
        let mut m = d;
        let mut q = 1;
        while m <= n_max {
            let mu = sieve.get(q)?;
            if mu != 0 {
                let slot = &mut out[(m - 1) as usize];
                slot.0.add(mu as f64 * ud.value);
                slot.1 += ud.err + 2.0 * f64::EPSILON * ud.value.abs();
            }
            m += d;
            q += 1;
        }
    }
    Ok(out
        .into_iter()
        .map(|(s, e)| ArithValue {
            value: s.sum(),
            err: e,
            exact: None,
        })
        .collect())
}

/// `f(t)` with right-continuous steps; `0` for `t ≤ 0`.
pub fn pointwise_eval(f: &Element, t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    let mut acc = NeumaierSum::new();
    for (atom, c) in f.terms() {
        let v = match *atom {
            Atom::E(k) => (t / k as f64).fract(),
            Atom::Eps(m) => {
                let mf = m as f64;
                if mf <= t && t < mf + 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Atom::Chi => {
                if t >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Atom::Kappa => {
                if t < 1.0 {
                    t
                } else {
                    0.0
                }
            }
            Atom::Phi(_) | Atom::FVas(_) => unreachable!("canonical elements hold no phi/f atoms"),
        };
        if v != 0.0 {
            // Eps(m) is √(m(m+1)) times the unit box.
            let coeff = match atom {
                Atom::Eps(m) => {
                    let r = surd_value(*m);
                    (ratio_to_f64(&c.rational) + c.real) * r
                        + ratio_to_f64(&c.surd) * (*m as f64) * (*m as f64 + 1.0)
                }
                _ => c.to_f64(atom),
            };
            acc.add(coeff * v);
        }
    }
    acc.sum()
}
