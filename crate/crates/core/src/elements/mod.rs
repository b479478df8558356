//! Symbolic elements of `D` and the inner-product engine.
//!
//! An [`Element`] is a finite linear combination of the atoms
//!
//! * `E(k)`: `t ↦ {t/k}`,
//! * `Eps(k)`: `√(k(k+1))·[k ≤ t < k+1]`,
//! * `Chi`: `[t ≥ 1]`,
//! * `Kappa`: `t·[0 < t < 1]` (not in `D`, only used through inner products),
//!
//! plus the derived families `Phi(k)` and `FVas(k)`, which are rewritten into
//! `Eps` atoms on construction. Each coefficient is `q + s·√(k(k+1)) + x` with
//! `q, s` exact rationals and `x` a binary64 remainder; the surd part is only
//! used on `Eps(k)` atoms, where it keeps the `Phi`/`FVas` expansions exact.

mod diagnostics;
mod engine;
mod functionals;
mod parse;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, mobius, ratio_to_f64};
use crate::error::{Error, Result};

pub use diagnostics::{fvas_partial_sum, phi_partial_sum_norm, w_over_n_partial, PartialSumReport};
pub use engine::{inner_product, InnerProductEngine, InnerProductResult, Method};
pub use functionals::{
    decompose, e1_inner_fvas, e1_inner_phi, g_functional, pointwise_eval, psi_functional, u_of,
    u_sequence, w_of, w_sequence, ArithValue, Decomposition, Route,
};

/// Atom kinds. `Phi` and `FVas` never appear in a canonical [`Element`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "k", rename_all = "lowercase")]
pub enum Atom {
    E(u64),
    Eps(u64),
    Phi(u64),
    FVas(u64),
    Chi,
    Kappa,
}

impl Atom {
    pub fn index(&self) -> Option<u64> {
        match *self {
            Atom::E(k) | Atom::Eps(k) | Atom::Phi(k) | Atom::FVas(k) => Some(k),
            Atom::Chi | Atom::Kappa => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.index() {
            Some(0) => Err(Error::domain(format!("atom index must be >= 1 in {self}"))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::E(k) => write!(f, "e:{k}"),
            Atom::Eps(k) => write!(f, "eps:{k}"),
            Atom::Phi(k) => write!(f, "phi:{k}"),
            Atom::FVas(k) => write!(f, "f:{k}"),
            Atom::Chi => write!(f, "chi"),
            Atom::Kappa => write!(f, "kappa"),
        }
    }
}

/// `k(k+1)`, the square of the `Eps(k)` normalisation.
pub(crate) fn surd_square(k: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(k) * BigInt::from(k + 1))
}

pub(crate) fn surd_value(k: u64) -> f64 {
    let kf = k as f64;
    (kf * (kf + 1.0)).sqrt()
}

/// Coefficient `rational + surd·√(k(k+1)) + real`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coeff {
    pub rational: BigRational,
    pub surd: BigRational,
    pub real: f64,
}

impl Coeff {
    pub fn rational(q: BigRational) -> Self {
        Coeff {
            rational: q,
            ..Default::default()
        }
    }

    pub fn surd(s: BigRational) -> Self {
        Coeff {
            surd: s,
            ..Default::default()
        }
    }

    pub fn real(x: f64) -> Self {
        Coeff {
            real: x,
            ..Default::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero() && self.real == 0.0
    }

    pub fn is_exact(&self) -> bool {
        self.real == 0.0
    }

    /// Numerical value for the atom the coefficient is attached to.
    pub fn to_f64(&self, atom: &Atom) -> f64 {
        let mut v = ratio_to_f64(&self.rational) + self.real;
        if !self.surd.is_zero() {
            let k = atom.index().unwrap_or(0);
            v += ratio_to_f64(&self.surd) * surd_value(k);
        }
        v
    }

    fn add_assign(&mut self, other: &Coeff) {
        self.rational += &other.rational;
        self.surd += &other.surd;
        self.real += other.real;
    }

    fn scaled(&self, q: &BigRational) -> Coeff {
        Coeff {
            rational: &self.rational * q,
            surd: &self.surd * q,
            real: self.real * ratio_to_f64(q),
        }
    }
}

/// Finite linear combination of atoms in canonical form.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Element {
    terms: BTreeMap<Atom, Coeff>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    /// `E(k)`, `Eps(k)`, `Chi`, `Kappa` as themselves; `Phi(k)` and `FVas(k)`
    /// expanded into `Eps` atoms.
    pub fn atom(atom: Atom) -> Result<Self> {
        atom.validate()?;
        let mut e = Element::zero();
        match atom {
            Atom::Phi(k) => e.push_phi(k, &BigRational::one()),
            Atom::FVas(k) => {
                for d in divisors(k) {
                    let mu = mobius(k / d)?;
                    if mu != 0 {
                        e.push_phi(d, &BigRational::from_integer(mu.into()));
                    }
                }
            }
            other => e.push(other, Coeff::rational(BigRational::one())),
        }
        Ok(e)
    }

    /// Builds from raw `(atom, coefficient)` pairs, canonicalising on the way.
    pub fn from_terms(terms: impl IntoIterator<Item = (Atom, Coeff)>) -> Result<Self> {
        let mut e = Element::zero();
        for (atom, c) in terms {
            atom.validate()?;
            match atom {
                Atom::Phi(_) | Atom::FVas(_) => {
                    if !c.surd.is_zero() {
                        return Err(Error::domain(format!(
                            "surd coefficient is only meaningful on eps atoms, not {atom}"
                        )));
                    }
                    let expanded = Element::atom(atom)?;
                    let exact = expanded.scale_rational(&c.rational);
                    e = e.add(&exact);
                    if c.real != 0.0 {
                        e = e.add(&expanded.scale_real(c.real));
                    }
                }
                Atom::E(_) | Atom::Chi | Atom::Kappa if !c.surd.is_zero() => {
                    return Err(Error::domain(format!(
                        "surd coefficient is only meaningful on eps atoms, not {atom}"
                    )));
                }
                _ => e.push(atom, c),
            }
        }
        Ok(e)
    }

    fn push(&mut self, atom: Atom, c: Coeff) {
        let slot = self.terms.entry(atom).or_default();
        slot.add_assign(&c);
        if slot.is_zero() {
            self.terms.remove(&atom);
        }
    }

    /// Adds `c·φ_k = c(√(k(k−1))ε_{k−1} − √(k(k+1))ε_k)`.
    fn push_phi(&mut self, k: u64, c: &BigRational) {
        if k >= 2 {
            self.push(Atom::Eps(k - 1), Coeff::surd(c.clone()));
        }
        self.push(Atom::Eps(k), Coeff::surd(-c.clone()));
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Atom, &Coeff)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, atom: &Atom) -> Option<&Coeff> {
        self.terms.get(atom)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains_kappa(&self) -> bool {
        self.terms.contains_key(&Atom::Kappa)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coeff::is_exact)
    }

    /// Largest atom index present (0 if none).
    pub fn max_index(&self) -> u64 {
        self.terms.keys().filter_map(Atom::index).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.push(*a, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        self.scale_rational(&-BigRational::one())
    }

    pub fn scale_rational(&self, q: &BigRational) -> Element {
        let mut out = Element::zero();
        if q.is_zero() {
            return out;
        }
        for (a, c) in &self.terms {
            out.push(*a, c.scaled(q));
        }
        out
    }

    /// Scaling by a real number folds every coefficient into its real part.
    pub fn scale_real(&self, x: f64) -> Element {
        let mut out = Element::zero();
        if x == 0.0 {
            return out;
        }
        for (a, c) in &self.terms {
            out.push(*a, Coeff::real(x * c.to_f64(a)));
        }
        out
    }

    /// Serialises to the documented JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ElementRepr::from(self)).expect("element serialisation")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: ElementRepr =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("element json: {e}")))?;
        repr.try_into()
    }

    /// Parses expressions such as `e:2 - 1/2*e:1`, `3*f:6 + chi`,
    /// `-r*eps:4` (`r` standing for `√(k(k+1))` of the atom).
    pub fn parse(s: &str) -> Result<Self> {
        parse::parse_element(s)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        let mut piece = |f: &mut fmt::Formatter<'_>, sign: bool, body: String| -> fmt::Result {
            if first {
                first = false;
                write!(f, "{}{}", if sign { "-" } else { "" }, body)
            } else {
                write!(f, " {} {}", if sign { "-" } else { "+" }, body)
            }
        };
        for (a, c) in &self.terms {
            if !c.rational.is_zero() {
                let q = c.rational.abs();
                let body = if q.is_one() { format!("{a}") } else { format!("{q}*{a}") };
                piece(f, c.rational.is_negative(), body)?;
            }
            if !c.surd.is_zero() {
                let q = c.surd.abs();
                let body = if q.is_one() { format!("r*{a}") } else { format!("{q}*r*{a}") };
                piece(f, c.surd.is_negative(), body)?;
            }
            if c.real != 0.0 {
                piece(f, c.real < 0.0, format!("{:e}*{a}", c.real.abs()))?;
            }
        }
        Ok(())
    }
}

/// JSON shape: `{"terms":[{"atom":"e","k":3,"rational":"1/2","surd":"0","real":0.0}]}`.
#[derive(Serialize, Deserialize)]
struct ElementRepr {
    terms: Vec<TermRepr>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    atom: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    k: Option<u64>,
    #[serde(default = "zero_string")]
    rational: String,
    #[serde(default = "zero_string")]
    surd: String,
    #[serde(default)]
    real: f64,
}

fn zero_string() -> String {
    "0".into()
}

impl From<&Element> for ElementRepr {
    fn from(e: &Element) -> Self {
        let terms = e
            .terms
            .iter()
            .map(|(a, c)| {
                let name = match a {
                    Atom::E(_) => "e",
                    Atom::Eps(_) => "eps",
                    Atom::Phi(_) => "phi",
                    Atom::FVas(_) => "f",
                    Atom::Chi => "chi",
                    Atom::Kappa => "kappa",
                };
                TermRepr {
                    atom: name.into(),
                    k: a.index(),
                    rational: c.rational.to_string(),
                    surd: c.surd.to_string(),
                    real: c.real,
                }
            })
            .collect();
        ElementRepr { terms }
    }
}

impl TryFrom<ElementRepr> for Element {
    type Error = Error;

    fn try_from(repr: ElementRepr) -> Result<Self> {
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let atom = parse::atom_from_parts(&t.atom, t.k)?;
            let coeff = Coeff {
                rational: parse::parse_rational(&t.rational)?,
                surd: parse::parse_rational(&t.surd)?,
                real: t.real,
            };
            terms.push((atom, coeff));
        }
        Element::from_terms(terms)
    }
}
