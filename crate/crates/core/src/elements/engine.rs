//! Inner products by bilinear expansion over a pair-rule table.
//!
//! Each `E(k)` is split as `E(1)/k + h_k` with `h_k` the step function
//! `h_k(m) = {m/k}` on `[m, m+1)`. The working basis is then
//! `{E(1), h_k (k ≥ 2), Eps(m), Chi, Kappa}` and every pair has a rule:
//!
//! | pair            | value                                        |
//! |-----------------|----------------------------------------------|
//! | E1·E1           | `‖e₁‖²`                                      |
//! | E1·h_k          | `Σ {m/k} a(m)`, `a(m) = ln(1+1/m) − 1/(m+1)` |
//! | E1·Eps(m)       | `√(m(m+1)) a(m)`                             |
//! | E1·Chi          | `1 − γ`                                      |
//! | E1·Kappa        | `1`                                          |
//! | h_j·h_k         | `Σ {m/j}{m/k}/(m(m+1))`                      |
//! | h_j·Eps(m)      | `{m/j}/√(m(m+1))`                            |
//! | h_j·Chi         | `Σ {m/j}/(m(m+1))`                           |
//! | Eps·Eps         | `δ`                                          |
//! | Eps(m)·Chi      | `1/√(m(m+1))`                                |
//! | Chi·Chi         | `1`                                          |
//! | Kappa·Kappa     | `1`                                          |
//! | Kappa·(h, Eps, Chi) | `0`                                      |
//!
//! Values are carried as `q₀ + q₁R + f₀ + f₁R` with `R = √(m(m+1))` of the
//! single `Eps` index involved, so products of surd coefficients stay exact.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{functionals::pointwise_eval, surd_square, surd_value, Atom, Coeff, Element};
use crate::arith::ratio_to_f64;
use crate::error::{Error, Result};
use crate::numerics::periodic::{log_weighted_periodic_sum_with, periodic_sum_with};
use crate::numerics::{
    e1_norm_sq, quad_oracle, ramp_weight, Integrand, NeumaierSum, PrecisionBudget, TailModel,
    ONE_MINUS_GAMMA,
};

/// Which kernel produced a value; combined results report the most involved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    DigammaPeriodic,
    TailAcceleratedSeries,
    QuadratureOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::DigammaPeriodic => "digamma_periodic",
            Method::TailAcceleratedSeries => "tail_accelerated_series",
            Method::QuadratureOracle => "quadrature_oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InnerProductResult {
    pub value: f64,
    pub err: f64,
    pub method: Method,
    /// Exact value when every contributing pair was rational.
    #[serde(skip)]
    pub exact: Option<BigRational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Basis {
    E1,
    H(u64),
    Eps(u64),
    Chi,
    Kappa,
}

/// `q0 + q1·R + f0 + f1·R`, `R² = rr`.
#[derive(Debug, Clone)]
struct SurdNum {
    q0: BigRational,
    q1: BigRational,
    f0: f64,
    f1: f64,
}

impl SurdNum {
    fn exact(q: BigRational) -> Self {
        SurdNum {
            q0: q,
            q1: BigRational::zero(),
            f0: 0.0,
            f1: 0.0,
        }
    }

    fn from_coeff(c: &Coeff) -> Self {
        SurdNum {
            q0: c.rational.clone(),
            q1: c.surd.clone(),
            f0: c.real,
            f1: 0.0,
        }
    }

    fn mul(&self, o: &SurdNum, rr: &BigRational, rrf: f64) -> SurdNum {
        let zero0 = self.q0.is_zero() || o.q0.is_zero();
        let q0 = if zero0 { BigRational::zero() } else { &self.q0 * &o.q0 };
        let q0 = if self.q1.is_zero() || o.q1.is_zero() {
            q0
        } else {
            q0 + &self.q1 * &o.q1 * rr
        };
        let mut q1 = BigRational::zero();
        if !self.q0.is_zero() && !o.q1.is_zero() {
            q1 += &self.q0 * &o.q1;
        }
        if !self.q1.is_zero() && !o.q0.is_zero() {
            q1 += &self.q1 * &o.q0;
        }
        let (a0, a1) = (ratio_to_f64(&self.q0), ratio_to_f64(&self.q1));
        let (b0, b1) = (ratio_to_f64(&o.q0), ratio_to_f64(&o.q1));
        // Every product with at least one float factor.
        let f0 = self.f0 * (b0 + o.f0) + a0 * o.f0 + rrf * (self.f1 * (b1 + o.f1) + a1 * o.f1);
        let f1 = self.f0 * (b1 + o.f1) + a0 * o.f1 + self.f1 * (b0 + o.f0) + a1 * o.f0;
        SurdNum { q0, q1, f0, f1 }
    }

    fn magnitude(&self, r: f64) -> f64 {
        ratio_to_f64(&self.q0).abs()
            + ratio_to_f64(&self.q1).abs() * r
            + self.f0.abs()
            + self.f1.abs() * r
    }
}

struct PairRule {
    value: SurdNum,
    err: f64,
    method: Method,
    /// Index of the `Eps` atom fixing `R`, if any.
    surd_index: Option<u64>,
}

impl PairRule {
    fn exact(q: BigRational) -> Self {
        PairRule {
            value: SurdNum::exact(q),
            err: 0.0,
            method: Method::ClosedForm,
            surd_index: None,
        }
    }

    fn float(v: f64, err: f64, method: Method) -> Self {
        PairRule {
            value: SurdNum {
                q0: BigRational::zero(),
                q1: BigRational::zero(),
                f0: v,
                f1: 0.0,
            },
            err,
            method,
            surd_index: None,
        }
    }
}

type Estimate = (f64, f64);

/// Evaluates inner products of [`Element`]s, memoising the series-valued
/// pair rules. Safe to share between threads.
#[derive(Debug)]
pub struct InnerProductEngine {
    budget: PrecisionBudget,
    e1_norm: OnceLock<Estimate>,
    e1_h: RwLock<HashMap<u64, Estimate>>,
    h_h: RwLock<HashMap<(u64, u64), Estimate>>,
    h_chi: RwLock<HashMap<u64, Estimate>>,
}

impl Default for InnerProductEngine {
    fn default() -> Self {
        InnerProductEngine::new(PrecisionBudget::default())
    }
}

/// One-shot inner product with a fresh engine.
pub fn inner_product(a: &Element, b: &Element, budget: &PrecisionBudget) -> Result<InnerProductResult> {
    InnerProductEngine::new(*budget).inner_product(a, b)
}

fn frac(m: u64, k: u64) -> BigRational {
    BigRational::new((m % k).into(), k.into())
}

fn cached<K: std::hash::Hash + Eq + Copy>(
    map: &RwLock<HashMap<K, Estimate>>,
    key: K,
    compute: impl FnOnce() -> Result<Estimate>,
) -> Result<Estimate> {
    if let Some(v) = map.read().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let v = compute()?;
    map.write().expect("cache lock").insert(key, v);
    Ok(v)
}

impl InnerProductEngine {
    pub fn new(budget: PrecisionBudget) -> Self {
        InnerProductEngine {
            budget,
            e1_norm: OnceLock::new(),
            e1_h: RwLock::new(HashMap::new()),
            h_h: RwLock::new(HashMap::new()),
            h_chi: RwLock::new(HashMap::new()),
        }
    }

    pub fn budget(&self) -> &PrecisionBudget {
        &self.budget
    }

    /// `‖e₁‖²` with its error bound.
    pub fn e1_norm_sq(&self) -> Estimate {
        *self.e1_norm.get_or_init(e1_norm_sq)
    }

    /// `⟨e₁, h_k⟩ = Σ_m {m/k} a(m)`.
    pub fn e1_h(&self, k: u64) -> Result<Estimate> {
        cached(&self.e1_h, k, || {
            let kf = k as f64;
            let r = log_weighted_periodic_sum_with(k, |m| (m % k) as f64 / kf, &self.budget)?;
            Ok((r.value, r.err))
        })
    }

    /// `⟨h_j, h_k⟩ = Σ_m {m/j}{m/k}/(m(m+1))`.
    pub fn h_h(&self, j: u64, k: u64) -> Result<Estimate> {
        let key = (j.min(k), j.max(k));
        cached(&self.h_h, key, || {
            let l = j.lcm(&k);
            let (jf, kf) = (j as f64, k as f64);
            let r = periodic_sum_with(
                l,
                |m| ((m % j) as f64 / jf) * ((m % k) as f64 / kf),
                self.budget.extended,
            );
            Ok((r.value, r.err))
        })
    }

    /// `⟨h_j, χ⟩ = Σ_m {m/j}/(m(m+1))`.
    pub fn h_chi(&self, j: u64) -> Result<Estimate> {
        cached(&self.h_chi, j, || {
            let jf = j as f64;
            let r = periodic_sum_with(j, |m| (m % j) as f64 / jf, self.budget.extended);
            Ok((r.value, r.err))
        })
    }

    fn rule(&self, a: Basis, b: Basis) -> Result<PairRule> {
        use Basis::*;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let eps_rounding = |v: f64| 4.0 * f64::EPSILON * v.abs();
        Ok(match (a, b) {
            (E1, E1) => {
                let (v, e) = self.e1_norm_sq();
                PairRule::float(v, e, Method::TailAcceleratedSeries)
            }
            (E1, H(k)) => {
                let (v, e) = self.e1_h(k)?;
                PairRule::float(v, e, Method::TailAcceleratedSeries)
            }
            (E1, Eps(m)) => {
                let v = ramp_weight(m as f64);
                PairRule {
                    value: SurdNum {
                        q0: BigRational::zero(),
                        q1: BigRational::zero(),
                        f0: 0.0,
                        f1: v,
                    },
                    err: eps_rounding(v) * surd_value(m),
                    method: Method::ClosedForm,
                    surd_index: Some(m),
                }
            }
            (E1, Chi) => PairRule::float(ONE_MINUS_GAMMA, eps_rounding(ONE_MINUS_GAMMA), Method::ClosedForm),
            (E1, Kappa) => PairRule::exact(BigRational::one()),
            (H(j), H(k)) => {
                let (v, e) = self.h_h(j, k)?;
                PairRule::float(v, e, Method::DigammaPeriodic)
            }
            (H(j), Eps(m)) => PairRule {
                value: SurdNum {
                    q0: BigRational::zero(),
                    q1: frac(m, j) / surd_square(m),
                    f0: 0.0,
                    f1: 0.0,
                },
                err: 0.0,
                method: Method::ClosedForm,
                surd_index: Some(m),
            },
            (H(j), Chi) => {
                let (v, e) = self.h_chi(j)?;
                PairRule::float(v, e, Method::DigammaPeriodic)
            }
            (Eps(i), Eps(m)) => {
                if i == m {
                    let mut r = PairRule::exact(BigRational::one());
                    r.surd_index = Some(m);
                    r
                } else {
                    PairRule::exact(BigRational::zero())
                }
            }
            (Eps(m), Chi) => PairRule {
                value: SurdNum {
                    q0: BigRational::zero(),
                    q1: BigRational::one() / surd_square(m),
                    f0: 0.0,
                    f1: 0.0,
                },
                err: 0.0,
                method: Method::ClosedForm,
                surd_index: Some(m),
            },
            (Chi, Chi) | (Kappa, Kappa) => PairRule::exact(BigRational::one()),
            (H(_), Kappa) | (Eps(_), Kappa) | (Chi, Kappa) => PairRule::exact(BigRational::zero()),
            // Remaining orderings are covered by the swap above.
            _ => unreachable!("pair rule table is symmetric"),
        })
    }

    /// `⟨a, b⟩` with error bound and method tag.
    pub fn inner_product(&self, a: &Element, b: &Element) -> Result<InnerProductResult> {
        let ea = expand(a);
        let eb = expand(b);
        let mut exact = BigRational::zero();
        let mut float = NeumaierSum::new();
        let mut err = NeumaierSum::new();
        let mut method = Method::ClosedForm;
        let mut all_exact = true;

        // Eps·Eps is diagonal; look the partner up instead of looping.
        let eps_b: HashMap<u64, &Coeff> = eb
            .iter()
            .filter_map(|(basis, c)| match basis {
                Basis::Eps(m) => Some((*m, c)),
                _ => None,
            })
            .collect();

        for (ba, ca) in &ea {
            for (bb, cb) in &eb {
                if matches!((ba, bb), (Basis::Eps(_), Basis::Eps(_))) {
                    continue;
                }
                self.accumulate(*ba, ca, *bb, cb, &mut exact, &mut float, &mut err, &mut method, &mut all_exact)?;
            }
            if let Basis::Eps(i) = ba {
                if let Some(cb) = eps_b.get(i) {
                    self.accumulate(*ba, ca, *ba, cb, &mut exact, &mut float, &mut err, &mut method, &mut all_exact)?;
                }
            }
        }

        let exact_f = ratio_to_f64(&exact);
        let value = exact_f + float.sum();
        let total_err = err.sum() + 2.0 * f64::EPSILON * value.abs() + f64::EPSILON * exact_f.abs();
        Ok(InnerProductResult {
            value,
            err: if all_exact { f64::EPSILON * exact_f.abs() } else { total_err },
            method,
            exact: all_exact.then_some(exact),
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn accumulate(
        &self,
        ba: Basis,
        ca: &Coeff,
        bb: Basis,
        cb: &Coeff,
        exact: &mut BigRational,
        float: &mut NeumaierSum,
        err: &mut NeumaierSum,
        method: &mut Method,
        all_exact: &mut bool,
    ) -> Result<()> {
        let rule = self.rule(ba, bb)?;
        if rule.value.q0.is_zero() && rule.value.q1.is_zero() && rule.value.f0 == 0.0 && rule.value.f1 == 0.0 {
            return Ok(());
        }
        *method = (*method).max(rule.method);
        let (rr, rrf, r) = match rule.surd_index {
            Some(m) => (surd_square(m), (m as f64) * (m as f64 + 1.0), surd_value(m)),
            None => (BigRational::zero(), 0.0, 0.0),
        };
        let sa = SurdNum::from_coeff(ca);
        let sb = SurdNum::from_coeff(cb);
        let prod = sa.mul(&sb, &rr, rrf);
        let full = prod.mul(&rule.value, &rr, rrf);

        *exact += &full.q0;
        let surd_part = ratio_to_f64(&full.q1) * r;
        let float_part = full.f0 + full.f1 * r;
        if !full.q1.is_zero() || full.f0 != 0.0 || full.f1 != 0.0 || rule.err != 0.0 {
            *all_exact = false;
        }
        float.add(surd_part);
        float.add(float_part);
        let coeff_mag = prod.magnitude(r);
        err.add(coeff_mag * rule.err);
        err.add(4.0 * f64::EPSILON * (surd_part.abs() + full.f0.abs() + (full.f1 * r).abs()));
        Ok(())
    }

    pub fn norm_sq(&self, a: &Element) -> Result<InnerProductResult> {
        self.inner_product(a, a)
    }

    /// Independent check of `⟨a, b⟩` by adaptive quadrature of the pointwise
    /// product against `t⁻²`.
    pub fn oracle_inner_product(&self, a: &Element, b: &Element) -> Result<InnerProductResult> {
        let period = a
            .terms()
            .chain(b.terms())
            .filter_map(|(atom, _)| match atom {
                Atom::E(k) => Some(*k),
                _ => None,
            })
            .fold(1u64, |acc, k| acc.lcm(&k));
        let start = a.max_index().max(b.max_index()) as f64 + 1.0;
        if period > 100_000 {
            return Err(Error::domain(format!(
                "quadrature oracle period {period} too long"
            )));
        }
        let integrand = Integrand::new(|t| pointwise_eval(a, t) * pointwise_eval(b, t))
            .tail(TailModel::Periodic {
                start,
                period: period as f64,
            });
        let r = quad_oracle(&integrand, 0.0, None)?;
        Ok(InnerProductResult {
            value: r.value,
            err: r.err,
            method: Method::QuadratureOracle,
            exact: None,
        })
    }
}

fn push(out: &mut Vec<(Basis, Coeff)>, basis: Basis, c: Coeff) {
    if let Some(slot) = out.iter_mut().find(|(b, _)| *b == basis) {
        slot.1.add_assign(&c);
    } else {
        out.push((basis, c));
    }
}

/// Rewrites `E(k)` as `E(1)/k + h_k`.
fn expand(e: &Element) -> Vec<(Basis, Coeff)> {
    let mut out: Vec<(Basis, Coeff)> = Vec::with_capacity(e.len() + 1);
    let mut e1 = Coeff::default();
    for (atom, c) in e.terms() {
        match *atom {
            Atom::E(k) => {
                e1.add_assign(&c.scaled(&BigRational::new(1.into(), k.into())));
                if k >= 2 {
                    out.push((Basis::H(k), c.clone()));
                }
            }
            Atom::Eps(m) => out.push((Basis::Eps(m), c.clone())),
            Atom::Chi => push(&mut out, Basis::Chi, c.clone()),
            Atom::Kappa => push(&mut out, Basis::Kappa, c.clone()),
            Atom::Phi(_) | Atom::FVas(_) => unreachable!("canonical elements hold no phi/f atoms"),
        }
    }
    if !e1.is_zero() {
        out.push((Basis::E1, e1));
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::omega;
    use std::f64::consts::LN_2;

    fn atom(a: Atom) -> Element {
        Element::atom(a).unwrap()
    }

    #[test]
    fn spec_examples() {
        let eng = InnerProductEngine::default();
        let r = eng.inner_product(&atom(Atom::Eps(3)), &atom(Atom::Eps(3))).unwrap();
        assert_eq!(r.exact, Some(BigRational::one()));
        let r = eng.inner_product(&atom(Atom::E(1)), &atom(Atom::Eps(1))).unwrap();
        assert!((r.value - 2f64.sqrt() * (LN_2 - 0.5)).abs() < 1e-15);
        let r = eng.inner_product(&atom(Atom::E(1)), &atom(Atom::Phi(2))).unwrap();
        assert!((r.value + omega(0.5).unwrap()).abs() < 1e-14, "{r:?}");
        let h2 = Element::parse("e:2 - 1/2*e:1").unwrap();
        let r = eng.norm_sq(&h2).unwrap();
        assert!((r.value - LN_2 / 4.0).abs() < 1e-14, "{r:?}");
        assert_eq!(r.method, Method::DigammaPeriodic);
    }

    #[test]
    fn kappa_extracts_lambda() {
        let eng = InnerProductEngine::default();
        let f = Element::parse("3*e:4 - 2/5*e:1 + eps:2 + chi").unwrap();
        let r = eng.inner_product(&f, &atom(Atom::Kappa)).unwrap();
        let lambda = BigRational::new(3.into(), 4.into()) - BigRational::new(2.into(), 5.into());
        assert_eq!(r.exact, Some(lambda));
    }

    #[test]
    fn oracle_agrees_on_basic_pairs() {
        let eng = InnerProductEngine::default();
        let pairs = [
            ("e:1", "e:1"),
            ("e:2", "e:3"),
            ("chi", "e:5"),
            ("eps:4", "e:3"),
            ("phi:3", "e:2"),
            ("kappa", "e:2"),
        ];
        for (x, y) in pairs {
            let (a, b) = (Element::parse(x).unwrap(), Element::parse(y).unwrap());
            let s = eng.inner_product(&a, &b).unwrap();
            let q = eng.oracle_inner_product(&a, &b).unwrap();
            assert!((s.value - q.value).abs() < 1e-10, "{x} {y}: {s:?} {q:?}");
        }
    }

    #[test]
    fn biorthogonality_is_exact() {
        let eng = InnerProductEngine::default();
        for j in 1..=8u64 {
            for k in 1..=8u64 {
                let h = Element::parse(&format!("e:{j} - 1/{j}*e:1")).unwrap();
                let f = atom(Atom::FVas(k));
                let r = eng.inner_product(&h, &f).unwrap();
                let mut expected = if j == k { 1.0 } else { 0.0 };
                if k == 1 {
                    expected -= 1.0 / j as f64;
                }
                assert!(r.exact.is_some());
                assert!((r.value - expected).abs() < 1e-15, "{j} {k} {r:?}");
            }
        }
    }
}
