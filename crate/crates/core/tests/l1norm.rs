use divsum_l1::arith::build_tables;
use divsum_l1::l1norm::{arc_refined_l1, bound_ratios, default_big_q, l1_norm, l1_norm_with_cap};
use divsum_l1::{ArithTables, Error};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn tables() -> &'static ArithTables {
    static T: OnceLock<ArithTables> = OnceLock::new();
    T.get_or_init(|| build_tables(1 << 16).unwrap())
}

/// Midpoint rule on `m` nodes for `∫₀¹ |Σ c_n e(nα)| dα`, evaluating each
/// term with its own `cos`/`sin`.
fn fine_grid(coeffs: &[(u64, f64)], m: usize) -> f64 {
    (0..m)
        .into_par_iter()
        .map(|k| {
            let a = (k as f64 + 0.5) / m as f64;
            let (re, im) = coeffs.iter().fold((0.0, 0.0), |(re, im), &(n, c)| {
                let t = 2.0 * PI * ((n as f64 * a) % 1.0);
                (re + c * t.cos(), im + c * t.sin())
            });
            (re * re + im * im).sqrt()
        })
        .sum::<f64>()
        / m as f64
}

fn tau_coeffs(t: &ArithTables, x: u64) -> Vec<(u64, f64)> {
    (1..=x).map(|n| (n, t.tau(n) as f64)).collect()
}

#[test]
fn x_one_is_exact() {
    let r = l1_norm::<f64>(tables(), 1, 1e-3).unwrap();
    assert!((r.value - 1.0).abs() < 1e-12);
    let (lo, hi) = bound_ratios(&r);
    assert!((lo - 1.0).abs() < 1e-12);
    assert_eq!(hi, f64::INFINITY);
}

#[test]
fn small_x_matches_fine_grid() {
    let t = tables();
    for x in [2u64, 3, 10] {
        let want = fine_grid(&tau_coeffs(t, x), 1_000_000);
        let r = l1_norm::<f64>(t, x, 1e-6).unwrap();
        assert!(r.converged);
        assert!((r.value - want).abs() <= 1e-5 * want, "x = {x}: {} vs {want}", r.value);
    }
}

#[test]
fn calibration_point_matches_fine_grid() {
    let t = tables();
    let x = 1 << 12;
    let want = fine_grid(&tau_coeffs(t, x), 1 << 16);
    let r = l1_norm::<f64>(t, x, 1e-3).unwrap();
    assert!((r.value - want).abs() <= 2e-3 * want, "{} vs {want}", r.value);
    assert!(r.value >= 0.01 * 64.0 && r.value <= 10.0 * 64.0 * (x as f64).ln());
}

#[test]
fn bound_ratio_arithmetic() {
    let r = l1_norm::<f64>(tables(), 4096, 1e-3).unwrap();
    let (lo, hi) = bound_ratios(&r);
    assert!((lo - r.value / 64.0).abs() < 1e-12);
    assert!((hi - r.value / (64.0 * 4096f64.ln())).abs() < 1e-12);
}

#[test]
fn coefficient_and_cauchy_schwarz_bounds() {
    let t = tables();
    for x in [16u64, 256, 1000, 4096, 1 << 14] {
        let r = l1_norm::<f64>(t, x, 1e-3).unwrap();
        let max_tau = (1..=x).map(|n| t.tau(n)).max().unwrap() as f64;
        let l2 = (1..=x).map(|n| (t.tau(n) as f64).powi(2)).sum::<f64>().sqrt();
        assert!(r.value >= max_tau, "x = {x}");
        assert!(r.value <= l2, "x = {x}");
        assert!(r.value <= t.divisor_summatory(x).unwrap() as f64);
    }
}

#[test]
fn refinement_trace_is_consistent() {
    let r = l1_norm::<f64>(tables(), 1024, 1e-4).unwrap();
    assert!(r.converged);
    assert!(r.nodes >= 4 * 1024);
    assert_eq!(r.levels.last().unwrap(), &(r.nodes, r.value));
    assert!(r.levels.windows(2).all(|w| w[1].0 == 2 * w[0].0));
    assert!(r.error_estimate <= 1e-4 * r.value);
    assert!(r.lipschitz_bound > 0.0);
}

#[test]
fn node_cap_stops_refinement() {
    let r = l1_norm_with_cap::<f64>(tables(), 4096, 1e-9, 1 << 14).unwrap();
    assert!(!r.converged);
    assert!(r.nodes <= 1 << 14);
}

#[test]
fn arc_and_uniform_estimates_agree() {
    let t = tables();
    for x in [1u64 << 8, 1 << 10, 1 << 12] {
        let u = l1_norm::<f64>(t, x, 1e-4).unwrap();
        let a = arc_refined_l1::<f64>(t, x, default_big_q(x), 1e-4).unwrap();
        assert!(a.converged);
        let slack = u.error_estimate + a.error_estimate + 1e-4 * u.value;
        assert!((u.value - a.value).abs() <= slack, "x = {x}: {} vs {}", u.value, a.value);
    }
}

#[test]
fn arc_quadrature_requires_covering_order() {
    let t = tables();
    let x = 256;
    assert!(matches!(arc_refined_l1::<f64>(t, x, 31, 1e-3), Err(Error::CoverFailure { .. })));
    assert!(matches!(arc_refined_l1::<f64>(t, x, 1, 1e-3), Err(Error::CoverFailure { .. })));
    assert!(arc_refined_l1::<f64>(t, x, 32, 1e-3).is_ok());
    assert!(arc_refined_l1::<f64>(t, x, 50, 1e-3).is_ok());
}

#[test]
fn bad_inputs_are_rejected() {
    let t = tables();
    assert!(l1_norm::<f64>(t, 0, 1e-3).is_err());
    assert!(l1_norm::<f64>(t, 16, 0.0).is_err());
    assert!(l1_norm::<f64>(t, 1 << 17, 1e-3).is_err());
    assert_eq!(default_big_q(256), 32);
    assert_eq!(default_big_q(1000), 64);
}

#[test]
fn single_precision_tracks_double() {
    let t = tables();
    let d = l1_norm::<f64>(t, 512, 1e-3).unwrap().value;
    let s = l1_norm::<f32>(t, 512, 1e-3).unwrap().value as f64;
    assert!((d - s).abs() <= 5e-3 * d);
}
