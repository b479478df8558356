mod common;

use common::{el, oracle_inner};
use nyman::elements::InnerProductEngine;
use nyman::projection::{assemble_gram, chi_gap, nu_table, project, GramCache, SolveOptions, Variant};
use proptest::prelude::*;

fn engine() -> InnerProductEngine {
    InnerProductEngine::default()
}

#[test]
fn residual_is_orthogonal_to_the_span() {
    let eng = engine();
    let mut cache = GramCache::in_memory();
    let chi = el("chi");
    for n in [5usize, 10, 20] {
        let g = project(n, Variant::Full, &eng, &mut cache, SolveOptions::default()).unwrap();
        let s = g.solution().unwrap();
        let residual = chi.sub(&g.projection_element().unwrap());
        for j in 1..=n as u64 {
            let r = eng.inner_product(&residual, &el(&format!("e:{j}"))).unwrap();
            let tol = 1e-9f64.max(r.err + s.coefficient_err * s.lambda_max * (n as f64).sqrt());
            assert!(r.value.abs() <= tol, "N = {n}, j = {j}: {:e}", r.value);
        }
        let d2 = eng.norm_sq(&residual).unwrap();
        assert!((d2.value - s.distance_sq).abs() <= 1e-9, "N = {n}: {} vs {}", d2.value, s.distance_sq);
    }
}

#[test]
fn distances_decrease() {
    let eng = engine();
    let mut cache = GramCache::in_memory();
    let mut prev = f64::INFINITY;
    let mut d1 = None;
    for n in [1usize, 2, 5, 10, 20, 50, 100] {
        let s = project(n, Variant::Full, &eng, &mut cache, SolveOptions::default())
            .unwrap()
            .solution()
            .unwrap()
            .clone();
        let d = s.distance();
        assert!(d <= prev + s.distance_sq_err.sqrt(), "N = {n}: {d} > {prev}");
        assert!(d <= *d1.get_or_insert(d) + 1e-15);
        prev = d;
    }
}

#[test]
fn zero_variant_is_never_closer() {
    let eng = engine();
    let mut cache = GramCache::in_memory();
    for n in 2..=30usize {
        let g = chi_gap(n, &eng, &mut cache, SolveOptions::default()).unwrap();
        assert!(g.d_zero >= g.d_full - 1e-12, "N = {n}: {g:?}");
        // Pythagoras: gap² = d₀² − d².
        assert!((g.gap * g.gap - g.distance_sq_difference).abs() <= 1e-9, "N = {n}: {g:?}");
    }
}

#[test]
fn gram_entries_match_oracle() {
    let eng = engine();
    let mut cache = GramCache::in_memory();
    for variant in [Variant::Full, Variant::Zero] {
        let g = assemble_gram(12, variant, &eng, &mut cache).unwrap();
        for (a, &j) in g.indices.iter().enumerate() {
            let ej = variant.basis_element(j).unwrap();
            for (b, &k) in g.indices.iter().enumerate().skip(a) {
                let o = oracle_inner(&ej, &variant.basis_element(k).unwrap());
                assert!((g.gram[a][b] - o).abs() <= 1e-8, "{variant} ({j}, {k})");
                assert_eq!(g.gram[a][b], g.gram[b][a]);
            }
            let o = oracle_inner(&ej, &el("chi"));
            assert!((g.rhs[a] - o).abs() <= 1e-8, "{variant} rhs {j}");
        }
    }
}

#[test]
fn coefficient_stability_monitor() {
    // Monitored only: no rate of convergence is known.
    let eng = engine();
    let mut cache = GramCache::in_memory();
    let t = nu_table(&[10, 20, 40, 80], 4, &eng, &mut cache, SolveOptions::default()).unwrap();
    for k in 1..=4u64 {
        let c: Vec<f64> = [10, 20, 40, 80].iter().map(|&n| t.row(k, n).unwrap().c).collect();
        let diffs: Vec<f64> = c.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let decreasing = diffs.windows(2).all(|w| w[1] <= w[0]);
        println!("k = {k}: c = {c:?}, |c(2N) - c(N)| = {diffs:?}, decreasing = {decreasing}");
    }
}

#[test]
fn corrupted_cache_is_recomputed_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gram.txt");
    let eng = engine();
    let reference = project(15, Variant::Zero, &eng, &mut GramCache::in_memory(), SolveOptions::default()).unwrap();
    let mut cache = GramCache::open(&path).unwrap();
    project(15, Variant::Zero, &eng, &mut cache, SolveOptions::default()).unwrap();
    cache.flush().unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let damaged: String = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i % 7 == 3 { l.replacen('3', "4", 1) } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&path, damaged).unwrap();
    let mut cache = GramCache::open(&path).unwrap();
    assert!(cache.rejected() > 0);
    let again = project(15, Variant::Zero, &eng, &mut cache, SolveOptions::default()).unwrap();
    assert_eq!(again, reference);
}

#[test]
fn extended_solve_agrees() {
    let eng = engine();
    let mut cache = GramCache::in_memory();
    let a = project(60, Variant::Full, &eng, &mut cache, SolveOptions::default()).unwrap();
    let b = project(60, Variant::Full, &eng, &mut cache, SolveOptions { extended: true, ..Default::default() }).unwrap();
    let (sa, sb) = (a.solution().unwrap(), b.solution().unwrap());
    for (x, y) in sa.coefficients.iter().zip(&sb.coefficients) {
        assert!((x - y).abs() <= sa.coefficient_err + sb.coefficient_err);
    }
    assert!((sa.distance_sq - sb.distance_sq).abs() <= sa.distance_sq_err + sb.distance_sq_err);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gram_matrix_is_symmetric_positive(n in 1usize..40) {
        let g = assemble_gram(n, Variant::Full, &engine(), &mut GramCache::in_memory()).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(g.gram[i][j], g.gram[j][i]);
            }
        }
        let s = nyman::projection::solve_projection(g, SolveOptions::default()).unwrap();
        let sol = s.solution().unwrap();
        prop_assert!(sol.lambda_min > 0.0);
        prop_assert!(sol.distance_sq > 0.0 && sol.distance_sq < 1.0);
    }
}
