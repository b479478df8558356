//! Text syntax for elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := ['-'] factor ('*' factor)*
//! factor := number | 'r' | atom
//! atom   := 'e:'k | 'eps:'k | 'phi:'k | 'f:'k | 'chi' | 'kappa'
//! ```
//!
//! Numbers are rationals `p` or `p/q`, or decimals (which become the real part
//! of the coefficient). `r` multiplies by `√(k(k+1))` of the term's atom and
//! is only accepted on `eps` atoms. Each term holds exactly one atom.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Atom, Coeff, Element};
use crate::error::{Error, Result};

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub(crate) fn atom_from_parts(name: &str, k: Option<u64>) -> Result<Atom> {
    let need = |k: Option<u64>| {
        k.ok_or_else(|| Error::Parse(format!("atom {name:?} needs an index")))
    };
    let atom = match name {
        "e" => Atom::E(need(k)?),
        "eps" => Atom::Eps(need(k)?),
        "phi" => Atom::Phi(need(k)?),
        "f" => Atom::FVas(need(k)?),
        "chi" | "kappa" => {
            if k.is_some() {
                return Err(Error::Parse(format!("atom {name:?} takes no index")));
            }
            if name == "chi" {
                Atom::Chi
            } else {
                Atom::Kappa
            }
        }
        _ => return Err(Error::Parse(format!("unknown atom {name:?}"))),
    };
    if atom.index() == Some(0) {
        return Err(Error::Parse(format!("atom index must be >= 1 in {atom}")));
    }
    Ok(atom)
}

pub fn parse_atom(s: &str) -> Result<Atom> {
    let s = s.trim();
    match s.split_once(':') {
        Some((name, k)) => {
            let k: u64 = k
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad atom index in {s:?}")))?;
            atom_from_parts(name.trim(), Some(k))
        }
        None => atom_from_parts(s, None),
    }
}

fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    for (i, &ch) in chars.iter().enumerate() {
        if ch == '+' || ch == '-' {
            let prev = current.trim_end().chars().last();
            // Exponent sign of a decimal such as `2.5e-1`.
            let exponent = i >= 2
                && matches!(chars[i - 1], 'e' | 'E')
                && (chars[i - 2].is_ascii_digit() || chars[i - 2] == '.');
            if !exponent {
                match prev {
                    None => {
                        if ch == '-' {
                            negative = !negative;
                        }
                        continue;
                    }
                    Some('*') => {
                        return Err(Error::Parse(format!("sign after '*' in {s:?}")));
                    }
                    Some(_) => {
                        out.push((negative, std::mem::take(&mut current)));
                        negative = ch == '-';
                        continue;
                    }
                }
            }
        }
        current.push(ch);
    }
    if current.trim().is_empty() {
        return Err(Error::Parse(format!("empty or dangling expression {s:?}")));
    }
    out.push((negative, current));
    Ok(out)
}

pub(crate) fn parse_element(s: &str) -> Result<Element> {
    if s.trim() == "0" {
        return Ok(Element::zero());
    }
    let mut terms = Vec::new();
    for (negative, body) in split_terms(s)? {
        let mut rational = BigRational::one();
        let mut real: Option<f64> = None;
        let mut surd = false;
        let mut atom: Option<Atom> = None;
        for factor in body.split('*') {
            let factor = factor.trim();
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in {body:?}")));
            }
            if factor == "r" {
                if surd {
                    return Err(Error::Parse(format!("repeated r in {body:?}")));
                }
                surd = true;
            } else if factor.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
                if factor.contains(['.', 'e', 'E']) && !factor.contains('/') {
                    let x: f64 = factor
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad number {factor:?}")))?;
                    real = Some(real.unwrap_or(1.0) * x);
                } else {
                    rational *= parse_rational(factor)?;
                }
            } else {
                if atom.is_some() {
                    return Err(Error::Parse(format!("more than one atom in term {body:?}")));
                }
                atom = Some(parse_atom(factor)?);
            }
        }
        let atom = atom.ok_or_else(|| Error::Parse(format!("term without atom: {body:?}")))?;
        if negative {
            rational = -rational;
        }
        if surd && !matches!(atom, Atom::Eps(_)) {
            return Err(Error::Parse(format!("r is only allowed on eps atoms: {body:?}")));
        }
        let coeff = match (real, surd) {
            (None, false) => Coeff::rational(rational),
            (None, true) => Coeff::surd(rational),
            (Some(x), false) => Coeff::real(x * crate::arith::ratio_to_f64(&rational)),
            (Some(x), true) => Coeff::real(
                x * crate::arith::ratio_to_f64(&rational) * super::surd_value(atom.index().unwrap()),
            ),
        };
        terms.push((atom, coeff));
    }
    Element::from_terms(terms)
}
