//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nyman::elements::{Atom, Coeff, Element};
use nyman::numerics::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

/// μ(n) by trial division.
pub fn mobius_naive(mut n: u64) -> i64 {
    assert!(n >= 1);
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// ζ(s) for Re s > 1 by direct summation plus the first Euler–Maclaurin
/// corrections at N = 20000.
pub fn zeta_direct(s: Complex64) -> Complex64 {
    let n = 20_000u32;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in (1..n).rev() {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let ns = (-s * nf.ln()).exp();
    sum + ns * nf / (s - 1.0) + ns * 0.5 - s * ns / (12.0 * nf)
        + s * (s + 1.0) * (s + 2.0) * ns / (720.0 * nf * nf * nf)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `(p, q)` with `atom(t) = p + q t` on the piece containing `t`.
fn atom_affine(atom: &Atom, t: f64) -> (f64, f64) {
    match *atom {
        Atom::E(k) => {
            let k = k as f64;
            (-(t / k).floor(), 1.0 / k)
        }
        Atom::Eps(m) => {
            let m = m as f64;
            if t >= m && t < m + 1.0 {
                ((m * (m + 1.0)).sqrt(), 0.0)
            } else {
                (0.0, 0.0)
            }
        }
        Atom::Chi => (if t >= 1.0 { 1.0 } else { 0.0 }, 0.0),
        Atom::Kappa => (0.0, if t > 0.0 && t < 1.0 { 1.0 } else { 0.0 }),
        _ => unreachable!("canonical elements only"),
    }
}

fn element_affine(f: &Element, t: f64) -> (f64, f64) {
    f.terms().fold((0.0, 0.0), |(p, q), (a, c)| {
        let (pa, qa) = atom_affine(a, t);
        let v = c.to_f64(a);
        (p + v * pa, q + v * qa)
    })
}

/// Pointwise value, right-continuous, zero for `t ≤ 0`.
pub fn eval(f: &Element, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let (p, q) = element_affine(f, t);
    p + q * t
}

/// `∫_a^b (p₁ + q₁t)(p₂ + q₂t) t⁻² dt`.
fn affine_piece(a: f64, b: f64, f: (f64, f64), g: (f64, f64)) -> f64 {
    let (p1, q1) = f;
    let (p2, q2) = g;
    let pp = p1 * p2;
    let cross = p1 * q2 + q1 * p2;
    let mut v = q1 * q2 * (b - a);
    if a == 0.0 {
        assert!(pp == 0.0 && cross == 0.0, "integrand not integrable at 0");
        return v;
    }
    if pp != 0.0 {
        v += pp * (b - a) / (a * b);
    }
    if cross != 0.0 {
        v += cross * ((b - a) / a).ln_1p();
    }
    v
}

/// `⟨f, g⟩` by exact integration over every affine piece up to `4P` periods
/// and two-step Richardson extrapolation of the `1/T` tail.
pub fn oracle_inner(f: &Element, g: &Element) -> f64 {
    let mut dil = Vec::new();
    let mut extras = vec![1.0];
    for e in [f, g] {
        for (a, _) in e.terms() {
            match *a {
                Atom::E(k) => dil.push(k),
                Atom::Eps(m) => {
                    extras.push(m as f64);
                    extras.push(m as f64 + 1.0);
                }
                _ => {}
            }
        }
    }
    let l = dil.iter().fold(1u64, |acc, &k| acc / gcd(acc, k) * k);
    let mut pattern: Vec<f64> = vec![0.0, l as f64];
    for &k in &dil {
        let mut m = k;
        while m < l {
            pattern.push(m as f64);
            m += k;
        }
    }
    pattern.sort_by(f64::total_cmp);
    pattern.dedup();
    let lf = l as f64;
    let periods = 2000u64;
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut partial = [0.0; 3];
    for n in 0..4 * periods {
        let base = n as f64 * lf;
        let mut pts: Vec<f64> = pattern.iter().map(|x| base + x).collect();
        pts.extend(extras.iter().copied().filter(|&x| x > base && x < base + lf));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        for w in pts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let v = affine_piece(w[0], w[1], element_affine(f, mid), element_affine(g, mid));
            // Kahan.
            let y = v - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        if n + 1 == periods {
            partial[0] = acc;
        } else if n + 1 == 2 * periods {
            partial[1] = acc;
        }
    }
    partial[2] = acc;
    let j1 = 2.0 * partial[1] - partial[0];
    let j2 = 2.0 * partial[2] - partial[1];
    (4.0 * j2 - j1) / 3.0
}

pub fn kappa() -> Element {
    Element::parse("kappa").unwrap()
}

/// `u(n; f) = −⟨f, κ⟩ + f(n) − f(n−1)` from pointwise values.
pub fn u_oracle(f: &Element, n: u64) -> f64 {
    let lambda = oracle_inner(f, &kappa());
    -lambda + eval(f, n as f64) - eval(f, n as f64 - 1.0)
}

/// `w(n; f) = Σ_{d|n} μ(n/d) u(d; f)` with `u` from [`u_oracle`].
pub fn w_oracle(f: &Element, n: u64) -> f64 {
    let lambda = oracle_inner(f, &kappa());
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| {
            let u = -lambda + eval(f, d as f64) - eval(f, d as f64 - 1.0);
            mobius_naive(n / d) as f64 * u
        })
        .sum()
}

pub fn el(s: &str) -> Element {
    Element::parse(s).unwrap()
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Atoms with indices `≤ max_index`; `kappa` only when `with_kappa`.
pub fn atom_strategy(max_index: u64, with_kappa: bool) -> BoxedStrategy<Atom> {
    let mut options = vec![
        (1..=max_index).prop_map(Atom::E).boxed(),
        (1..=max_index).prop_map(Atom::Eps).boxed(),
        (1..=max_index).prop_map(Atom::Phi).boxed(),
        (1..=max_index).prop_map(Atom::FVas).boxed(),
        Just(Atom::Chi).boxed(),
    ];
    if with_kappa {
        options.push(Just(Atom::Kappa).boxed());
    }
    proptest::strategy::Union::new(options).boxed()
}

/// Random finite combination with small rational coefficients.
pub fn element_strategy(max_index: u64, max_terms: usize, with_kappa: bool) -> BoxedStrategy<Element> {
    proptest::collection::vec((atom_strategy(max_index, with_kappa), -6i64..=6, 1i64..=4), 1..=max_terms)
        .prop_map(|terms| {
            terms.into_iter().fold(Element::zero(), |acc, (a, n, d)| {
                acc.add(&Element::atom(a).unwrap().scale_rational(&rational(n, d)))
            })
        })
        .boxed()
}

/// Element with `λ = 0`: dilates enter as `e_k − e₁/k`, plus steps and `χ`.
pub fn zero_lambda_strategy(max_index: u64, max_terms: usize) -> BoxedStrategy<Element> {
    let piece = prop_oneof![
        (2..=max_index).prop_map(|k| el(&format!("e:{k} - 1/{k}*e:1"))),
        (1..=max_index).prop_map(|m| el(&format!("eps:{m}"))),
        Just(el("chi")),
    ];
    proptest::collection::vec((piece, -5i64..=5, 1i64..=3), 1..=max_terms)
        .prop_map(|terms| {
            terms
                .into_iter()
                .fold(Element::zero(), |acc, (e, n, d)| acc.add(&e.scale_rational(&rational(n, d))))
        })
        .boxed()
}

pub fn coeff_value(f: &Element, atom: &Atom) -> f64 {
    f.coefficient(atom).map(|c: &Coeff| c.to_f64(atom)).unwrap_or(0.0)
}
