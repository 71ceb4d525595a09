use divsum_l1::arith::{build_tables, main_term_pair, mobius_invert_check, read_cache, write_cache};
use divsum_l1::{ArithTables, EULER_GAMMA};
use proptest::prelude::*;
use std::sync::OnceLock;

fn tables() -> &'static ArithTables {
    static T: OnceLock<ArithTables> = OnceLock::new();
    T.get_or_init(|| build_tables(100_000).unwrap())
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn tau_naive(n: u64) -> u32 {
    (1..=n).filter(|d| n.is_multiple_of(*d)).count() as u32
}

fn mu_naive(n: u64) -> i8 {
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn phi_naive(n: u64) -> u32 {
    (1..=n).filter(|&k| num_gcd(k, n) == 1).count() as u32
}

fn num_gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `c_q(n)` as the rounded real part of the defining exponential sum.
fn ramanujan_naive(q: u64, n: i64) -> i64 {
    let s: f64 = (1..=q)
        .filter(|&a| num_gcd(a, q) == 1)
        .map(|a| (2.0 * std::f64::consts::PI * (a as f64) * (n as f64) / q as f64).cos())
        .sum();
    s.round() as i64
}

#[test]
fn small_tables_match_direct_counts() {
    let t = build_tables(12).unwrap();
    assert_eq!(t.tau_values(), &[1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]);
    let one = build_tables(1).unwrap();
    assert_eq!((one.tau_values(), one.mu_values(), one.phi_values()), (&[1u32][..], &[1i8][..], &[1u32][..]));
    assert_eq!(build_tables(10).unwrap().divisor_summatory(10).unwrap(), 27);
    assert!(build_tables(0).is_err());
}

#[test]
fn tables_agree_with_naive_functions() {
    let t = tables();
    for n in 1..=2000 {
        assert_eq!(t.tau(n), tau_naive(n), "tau({n})");
        assert_eq!(t.mu(n), mu_naive(n), "mu({n})");
        assert_eq!(t.phi(n), phi_naive(n), "phi({n})");
    }
}

#[test]
fn divisor_summatory_matches_hyperbola_count() {
    // D(x) = 2 Σ_{u ≤ √x} ⌊x/u⌋ − ⌊√x⌋²
    let t = tables();
    for x in [1u64, 10, 16, 100, 9999, 10_000, 100_000] {
        let r = (x as f64).sqrt() as u64;
        let d: u64 = 2 * (1..=r).map(|u| x / u).sum::<u64>() - r * r;
        assert_eq!(t.divisor_summatory(x).unwrap(), d, "x = {x}");
    }
}

#[test]
fn ramanujan_examples() {
    let t = tables();
    assert_eq!(t.ramanujan_sum(1, 17), 1);
    assert_eq!(t.ramanujan_sum(4, 8), 2);
    assert_eq!(t.ramanujan_sum(6, 4), -1);
    assert_eq!(t.ramanujan_sum(5, 1), -1);
    assert_eq!(t.ramanujan_sum(2, 1), -1);
    assert_eq!(t.ramanujan_sum(3, 0), 2);
}

#[test]
fn ramanujan_matches_exponential_oracle() {
    let t = tables();
    for q in 1..=60 {
        for n in -60..=60 {
            assert_eq!(t.ramanujan_sum(q, n), ramanujan_naive(q, n), "c_{q}({n})");
        }
    }
}

#[test]
fn euler_gamma_matches_harmonic_oracle() {
    let n = 1_000_000u64;
    let h: f64 = (1..=n).rev().map(|k| 1.0 / k as f64).sum();
    let est = h - (n as f64).ln() - 1.0 / (2.0 * n as f64) + 1.0 / (12.0 * (n as f64).powi(2));
    assert!((est - EULER_GAMMA).abs() < 1e-10, "{est}");
}

#[test]
fn main_term_pair_examples() {
    let t = tables();
    let x: f64 = 100.0;
    let p = main_term_pair(t, x).unwrap();
    let g1 = x.ln() + 2.0 * EULER_GAMMA - 1.0;
    assert!((p.g(1) - g1).abs() < 1e-14);
    assert!((p.f(1) - g1).abs() < 1e-14);
    assert!((p.f(7) - p.g(1) - p.g(7)).abs() < 1e-12);
    // (f ∗ μ)(4) = f(4) − f(2) by hand
    assert!((p.f(4) - p.f(2) - p.g(4)).abs() < 1e-12);
    assert_eq!(mobius_invert_check(t, 1, 1e4).unwrap(), 0.0);
    assert!(mobius_invert_check(t, 200, 1e4).unwrap() <= 1e-10);
}

#[test]
fn convolution_oracle_recovers_g() {
    let t = tables();
    let x: f64 = 1000.0;
    let p = main_term_pair(t, x).unwrap();
    for q in 1..=100u64 {
        let conv: f64 = (1..=q).filter(|d| q % d == 0).map(|d| mu_naive(q / d) as f64 * p.f(d)).sum();
        assert!((conv - p.g(q)).abs() <= 1e-12 * (1.0 + p.g(q).abs()), "q = {q}");
    }
}

#[test]
fn phi_mean_examples() {
    let t = tables();
    assert_eq!(divsum_l1::arith::phi_mean::<f64>(t, 1).unwrap(), 1.0);
    assert!((divsum_l1::arith::phi_mean::<f64>(t, 4).unwrap() - 8.0 / 3.0).abs() < 1e-15);
    let big = build_tables(1_000_000).unwrap();
    let m: f64 = divsum_l1::arith::phi_mean(&big, 1_000_000).unwrap();
    assert!((m - 6e6 / std::f64::consts::PI.powi(2)).abs() <= 30.0);
}

#[test]
fn cache_roundtrip_and_refusals() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.bin");
    let t = build_tables(5000).unwrap();
    write_cache(&t, &path).unwrap();
    assert_eq!(read_cache(&path).unwrap(), t);

    let mut bytes = std::fs::read(&path).unwrap();
    bytes[8] = 99;
    std::fs::write(&path, &bytes).unwrap();
    assert!(read_cache(&path).is_err(), "version mismatch accepted");

    bytes[8] = 1;
    bytes[0] = b'X';
    std::fs::write(&path, &bytes).unwrap();
    assert!(read_cache(&path).is_err(), "bad magic accepted");

    bytes[0] = b'D';
    bytes.truncate(bytes.len() - 1);
    std::fs::write(&path, &bytes).unwrap();
    assert!(read_cache(&path).is_err(), "truncated file accepted");
}

#[test]
fn tables_refuse_out_of_range_scales() {
    let t = build_tables(100).unwrap();
    assert!(t.divisor_summatory(101).is_err());
    assert!(divsum_l1::arith::build_tables_with_capacity(1000, 999).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ramanujan_is_multiplicative(a in 1u64..300, b in 1u64..300, n in -5000i64..5000) {
        prop_assume!(num_gcd(a, b) == 1);
        let t = tables();
        prop_assert_eq!(t.ramanujan_sum(a * b, n), t.ramanujan_sum(a, n) * t.ramanujan_sum(b, n));
    }

    #[test]
    fn ramanujan_closed_form_agrees(q in 1u64..2000, n in -100_000i64..100_000) {
        let t = tables();
        prop_assert_eq!(t.ramanujan_sum(q, n), t.ramanujan_sum_closed_form(q, n));
    }

    #[test]
    fn ramanujan_is_even_and_periodic(q in 1u64..500, n in -10_000i64..10_000) {
        let t = tables();
        prop_assert_eq!(t.ramanujan_sum(q, n), t.ramanujan_sum(q, -n));
        prop_assert_eq!(t.ramanujan_sum(q, n), t.ramanujan_sum(q, n + q as i64));
    }

    #[test]
    fn divisors_and_factorization_are_consistent(m in 1u64..10_000_000) {
        let t = tables();
        let f = t.factorize(m);
        prop_assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), m);
        let ds = t.divisors(m);
        prop_assert_eq!(ds.len() as u32, f.iter().map(|&(_, e)| e + 1).product::<u32>());
        prop_assert!(ds.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(ds.iter().all(|d| m % d == 0));
    }

    #[test]
    fn multiplicative_tables(a in 1u64..300, b in 1u64..300) {
        prop_assume!(num_gcd(a, b) == 1);
        let t = tables();
        prop_assert_eq!(t.tau(a * b), t.tau(a) * t.tau(b));
        prop_assert_eq!(t.mu(a * b), t.mu(a) * t.mu(b));
        prop_assert_eq!(t.phi(a * b), t.phi(a) * t.phi(b));
    }
}
