mod common;

use common::{el, element_strategy, eval, oracle_inner, rational, u_oracle, w_oracle};
use nyman::elements::{
    pointwise_eval, u_of, u_sequence, w_of, Atom, Element, InnerProductEngine, Route,
};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn engine() -> InnerProductEngine {
    InnerProductEngine::default()
}

#[test]
fn oracle_self_check() {
    // ⟨χ, χ⟩ = 1, ‖κ‖ = 1, ⟨e₁, e₁⟩ = ln 2π − γ.
    assert!((oracle_inner(&el("chi"), &el("chi")) - 1.0).abs() < 1e-12);
    assert!((oracle_inner(&el("kappa"), &el("kappa")) - 1.0).abs() < 1e-12);
    let target = (2.0 * std::f64::consts::PI).ln() - 0.577_215_664_901_532_9;
    assert!((oracle_inner(&el("e:1"), &el("e:1")) - target).abs() < 1e-9);
}

#[test]
fn biorthogonality_grid() {
    let eng = engine();
    let mut worst = 0.0f64;
    for j in 1..=40u64 {
        let a = el(&format!("e:{j} - 1/{j}*e:1"));
        for k in 1..=40u64 {
            let r = eng.inner_product(&a, &el(&format!("f:{k}"))).unwrap();
            let expected = (j == k) as i32 as f64 - if k == 1 { 1.0 / j as f64 } else { 0.0 };
            worst = worst.max((r.value - expected).abs());
        }
    }
    assert!(worst <= 1e-9, "worst deviation {worst:e}");
}

#[test]
fn two_routes_on_dilates_and_chi() {
    let eng = engine();
    let mut fs: Vec<Element> = (1..=20).map(|k| el(&format!("e:{k}"))).collect();
    fs.push(el("chi"));
    for f in &fs {
        for n in 1..=50 {
            for which in [u_of, w_of] {
                let a = which(f, n, Route::Definition, &eng).unwrap();
                let b = which(f, n, Route::Functional, &eng).unwrap();
                assert!((a.value - b.value).abs() <= a.err + b.err, "{f} n = {n}: {a:?} {b:?}");
            }
        }
    }
}

#[test]
fn pointwise_evaluation_matches_reference() {
    let f = el("3*e:4 - 1/2*e:1 + 2*eps:3 - chi + kappa");
    for i in 0..400 {
        let t = i as f64 * 0.037;
        assert!((pointwise_eval(&f, t) - eval(&f, t)).abs() < 1e-12, "t = {t}");
    }
}

fn eps_combination() -> impl Strategy<Value = Element> {
    proptest::collection::vec((1u64..=30, -8i64..=8, 1i64..=4), 1..8).prop_map(|terms| {
        terms.into_iter().fold(Element::zero(), |acc, (m, n, d)| {
            acc.add(&Element::atom(Atom::Eps(m)).unwrap().scale_rational(&rational(n, d)))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn engine_matches_oracle_on_atom_pairs(
        a in common::atom_strategy(20, true),
        b in common::atom_strategy(20, true),
    ) {
        let (ea, eb) = (Element::atom(a).unwrap(), Element::atom(b).unwrap());
        let r = engine().inner_product(&ea, &eb).unwrap();
        let o = oracle_inner(&ea, &eb);
        prop_assert!((r.value - o).abs() <= 1e-8, "{a} {b}: {} vs {o}", r.value);
    }

    #[test]
    fn step_functional_identity(h in eps_combination(), k in 1u64..=32) {
        // ⟨h, φ_k⟩ = h(k−1) − h(k).
        let r = engine().inner_product(&h, &el(&format!("phi:{k}"))).unwrap();
        let expected = eval(&h, k as f64 - 1.0) - eval(&h, k as f64);
        prop_assert!((r.value - expected).abs() <= 1e-12, "{} vs {expected}", r.value);
    }

    #[test]
    fn symmetry_and_positivity(a in element_strategy(15, 4, true), b in element_strategy(15, 4, true)) {
        let eng = engine();
        let ab = eng.inner_product(&a, &b).unwrap();
        let ba = eng.inner_product(&b, &a).unwrap();
        prop_assert!((ab.value - ba.value).abs() <= ab.err + ba.err);
        let n = eng.norm_sq(&a).unwrap();
        if a.is_zero() {
            prop_assert!(n.value.abs() <= n.err);
        } else {
            prop_assert!(n.value > n.err, "{a}: {n:?}");
        }
    }

    #[test]
    fn linearity(
        a in element_strategy(12, 3, true),
        b in element_strategy(12, 3, true),
        c in element_strategy(12, 3, true),
        p in -5i64..=5, q in 1i64..=4,
    ) {
        let eng = engine();
        let alpha = rational(p, q);
        let lhs = eng.inner_product(&a.scale_rational(&alpha).add(&b), &c).unwrap();
        let ra = eng.inner_product(&a, &c).unwrap();
        let rb = eng.inner_product(&b, &c).unwrap();
        let af = p as f64 / q as f64;
        let rhs = af * ra.value + rb.value;
        prop_assert!(
            (lhs.value - rhs).abs() <= lhs.err + af.abs() * ra.err + rb.err + 1e-14 * (1.0 + rhs.abs())
        );
    }

    #[test]
    fn random_elements_match_oracle(a in element_strategy(10, 3, true), b in element_strategy(10, 3, true)) {
        let r = engine().inner_product(&a, &b).unwrap();
        let o = oracle_inner(&a, &b);
        prop_assert!((r.value - o).abs() <= 1e-8 * (1.0 + o.abs()), "{} vs {o}", r.value);
    }

    #[test]
    fn two_routes_on_random_combinations(f in element_strategy(12, 4, false), n in 1u64..=50) {
        let eng = engine();
        for which in [u_of, w_of] {
            let a = which(&f, n, Route::Definition, &eng).unwrap();
            let b = which(&f, n, Route::Functional, &eng).unwrap();
            prop_assert!((a.value - b.value).abs() <= a.err + b.err, "{f} n = {n}: {a:?} {b:?}");
        }
    }

    #[test]
    fn u_and_w_match_pointwise_reference(f in element_strategy(8, 3, false), n in 1u64..=24) {
        let eng = engine();
        let u = u_of(&f, n, Route::Definition, &eng).unwrap();
        prop_assert!((u.value - u_oracle(&f, n)).abs() <= 1e-8);
        let w = w_of(&f, n, Route::Definition, &eng).unwrap();
        prop_assert!((w.value - w_oracle(&f, n)).abs() <= 1e-8);
    }

    #[test]
    fn vanishing_u_forces_zero_element(f in element_strategy(10, 5, false)) {
        // Contrapositive at test scale: a nonzero element has some u(n) ≠ 0 with n ≤ 2·max index.
        let n_max = 2 * f.max_index().max(1);
        let u = u_sequence(&f, n_max).unwrap();
        let all_zero = u.iter().all(|v| match &v.exact {
            Some(q) => q.is_zero(),
            None => v.value.abs() <= v.err.max(1e-12),
        });
        prop_assert_eq!(all_zero, f.is_zero(), "{}", f);
    }

    #[test]
    fn text_and_json_round_trips(f in element_strategy(20, 6, true)) {
        prop_assert_eq!(Element::parse(&f.to_string()).unwrap(), f.clone());
        prop_assert_eq!(Element::from_json(&f.to_json()).unwrap(), f);
    }
}

#[test]
fn cancelling_combination_is_zero() {
    // φ_k = √(k(k−1))ε_{k−1} − √(k(k+1))ε_k written out in atoms cancels exactly.
    let f = el("phi:5 - r*eps:4 + r*eps:5");
    assert!(f.is_zero(), "{f}");
    let u = u_sequence(&f, 10).unwrap();
    assert!(u.iter().all(|v| v.exact.as_ref().is_some_and(BigRational::is_zero)));
}
