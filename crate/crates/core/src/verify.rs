//! Named invariant suite run by the `verify` subcommand.
//!
//! Every check is a pure function of the tables and a seed, returning a
//! measured value, the threshold it was held to and a pass flag.

use num_complex::Complex;
use num_integer::Roots;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{main_term_pair, mobius_invert_at, ramanujan_sum_via_exponentials};
use crate::asympt::{partial_summation_check, pv_main_term, u_q, u_q_reduced_residue};
use crate::dissection::{cover_check, disjoint_check, farey_enumerate, locate_arc, HalfWidth};
use crate::expsum::{
    eval_s, eval_t, eval_v, f_envelope_ratio, g_envelope_ratio, geometric_sum_bound_check,
    grid_eval, grid_eval_v, nearest_int_distance, TrigPoly,
};
use crate::{ArithTables, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckOutcome {
    /// Passes when `measured ≤ threshold`.
    fn at_most(name: &'static str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name, passed: measured <= threshold, measured, threshold, detail: detail.into() }
    }

    /// Passes when `measured > threshold`.
    fn above(name: &'static str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Self { name, passed: measured > threshold, measured, threshold, detail: detail.into() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    /// Scale for the exponential-sum checks.
    pub x: u64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { x: 10_000, seed: 0x5eed }
    }
}

/// Table size [`run_suite`] wants for a given configuration.
pub fn required_table_size(cfg: &VerifyConfig) -> u64 {
    cfg.x.max(100_000)
}

pub fn run_suite(tables: &ArithTables, cfg: &VerifyConfig) -> Result<Vec<CheckOutcome>> {
    tables.require(cfg.x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = vec![
        tau_trial_division(tables, &mut rng),
        mobius_divisor_sum(tables),
        totient_divisor_sum(tables),
        ramanujan_dual_formula(tables),
        ramanujan_multiplicative(tables, &mut rng),
        mobius_inversion(tables, 500, 1e4)?,
        phi_mean_envelope(tables),
    ];
    out.push(decomposition_identity(tables, cfg.x, &mut rng)?);
    out.push(periodicity_and_conjugation(tables, cfg.x.min(20_000), &mut rng)?);
    out.push(grid_vs_direct(tables, cfg.x.min(2000), 1024, &mut rng)?);
    out.extend(parseval(tables, cfg.x.min(2000), 4096)?);
    out.push(geometric_bound(&mut rng)?);
    out.push(f_envelope(cfg.x, &mut rng));
    out.push(g_envelope(cfg.x, &mut rng));
    out.push(farey_neighbours(500)?);
    out.push(cover(300)?);
    out.push(disjoint(&[1_000, 10_000, 100_000])?);
    out.push(locate(200, &mut rng)?);
    out.push(u_q_two_forms(tables, cfg.x, &mut rng)?);
    out.push(u_q_integrality(tables, tables.x_max().min(100_000), 200)?);
    out.push(pv_mobius_chain(tables, cfg.x, 60)?);
    out.push(partial_summation(tables, cfg.x, &mut rng)?);
    Ok(out)
}

fn tau_trial_division(t: &ArithTables, rng: &mut ChaCha8Rng) -> CheckOutcome {
    let samples = (t.x_max() / 100).clamp(1, 20_000);
    let mut bad = 0u64;
    for _ in 0..samples {
        let n = rng.gen_range(1..=t.x_max());
        let mut count = 0u32;
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                count += if d * d == n { 1 } else { 2 };
            }
            d += 1;
        }
        bad += (count != t.tau(n)) as u64;
    }
    CheckOutcome::at_most("tau_trial_division", bad as f64, 0.0, format!("{samples} sampled n"))
}

/// `Σ_{d|n} f(d)` for every `n ≤ x_max`, by a multiples sieve.
fn divisor_sums(t: &ArithTables, f: impl Fn(u64) -> i64) -> Vec<i64> {
    let n = t.x_max() as usize;
    let mut acc = vec![0i64; n + 1];
    for d in 1..=n {
        let v = f(d as u64);
        for m in (d..=n).step_by(d) {
            acc[m] += v;
        }
    }
    acc
}

fn mobius_divisor_sum(t: &ArithTables) -> CheckOutcome {
    let sums = divisor_sums(t, |d| t.mu(d) as i64);
    let bad = (1..sums.len()).filter(|&n| sums[n] != (n == 1) as i64).count();
    CheckOutcome::at_most("mobius_divisor_sum", bad as f64, 0.0, "n with sum_{d|n} mu(d) != [n=1]")
}

fn totient_divisor_sum(t: &ArithTables) -> CheckOutcome {
    let sums = divisor_sums(t, |d| t.phi(d) as i64);
    let bad = (1..sums.len()).filter(|&n| sums[n] != n as i64).count();
    CheckOutcome::at_most("totient_divisor_sum", bad as f64, 0.0, "n with sum_{d|n} phi(d) != n")
}

fn ramanujan_dual_formula(t: &ArithTables) -> CheckOutcome {
    let mut worst = 0f64;
    for q in 1..=200u64 {
        for n in 0..=200i64 {
            let exact = t.ramanujan_sum(q, n);
            let closed = t.ramanujan_sum_closed_form(q, n);
            let float: Complex<f64> = ramanujan_sum_via_exponentials(q, n);
            let dev = ((float.re - exact as f64).abs().max(float.im.abs())) / q as f64;
            let dev = if closed == exact { dev } else { f64::INFINITY };
            worst = worst.max(dev);
        }
    }
    CheckOutcome::at_most("ramanujan_dual_formula", worst, 1e-9, "max deviation / q over q, n <= 200")
}

fn ramanujan_multiplicative(t: &ArithTables, rng: &mut ChaCha8Rng) -> CheckOutcome {
    let mut bad = 0;
    let mut done = 0;
    while done < 500 {
        let (a, b) = (rng.gen_range(1..=300u64), rng.gen_range(1..=300u64));
        if num_integer::gcd(a, b) != 1 {
            continue;
        }
        let n = rng.gen_range(-1000..=1000i64);
        if t.ramanujan_sum(a * b, n) != t.ramanujan_sum(a, n) * t.ramanujan_sum(b, n) {
            bad += 1;
        }
        done += 1;
    }
    CheckOutcome::at_most("ramanujan_multiplicative", bad as f64, 0.0, "500 coprime pairs <= 300")
}

fn mobius_inversion(t: &ArithTables, q_max: u64, x: f64) -> Result<CheckOutcome> {
    let pair = main_term_pair(t, x)?;
    let worst = (1..=q_max)
        .map(|q| mobius_invert_at(&pair, q).abs() / (1.0 + pair.g(q).abs()))
        .fold(0f64, f64::max);
    Ok(CheckOutcome::at_most(
        "mobius_inversion",
        worst,
        1e-10,
        format!("max |(f*mu)(q) - g(q)| / (1 + |g(q)|), q <= {q_max}, x = {x}"),
    ))
}

fn phi_mean_envelope(t: &ArithTables) -> CheckOutcome {
    let top = t.x_max().min(1_000_000);
    let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    let mut acc = crate::sum::Neumaier::<f64>::new();
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=top {
        acc += t.phi(n) as f64 / n as f64;
        if n >= 10 {
            let x = n as f64;
            worst = worst.max((acc.total() - c * x).abs() - (2.0 + 3.0 * x.ln()));
        }
    }
    CheckOutcome::at_most("phi_mean_envelope", worst, 0.0, format!("max excess over 2 + 3 log x, 10 <= x <= {top}"))
}

fn decomposition_identity(t: &ArithTables, x: u64, rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let poly = TrigPoly::<f64>::divisor(t, x)?;
    let scale = t.divisor_summatory(x)? as f64;
    let mut worst = 0f64;
    for _ in 0..100 {
        let a: f64 = rng.gen();
        let s = poly.eval(a);
        let r = s - eval_t::<f64>(x, a).scale(2.0) - eval_v::<f64>(x, a);
        worst = worst.max(r.norm() / scale);
    }
    Ok(CheckOutcome::at_most("decomposition_identity", worst, 1e-9, format!("|S - 2T - V| / sum tau, x = {x}")))
}

fn periodicity_and_conjugation(t: &ArithTables, x: u64, rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let poly = TrigPoly::<f64>::divisor(t, x)?;
    let scale = poly.abs_coeff_sum();
    let mut worst = 0f64;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let s = poly.eval(a);
        worst = worst.max((poly.eval(a + 1.0) - s).norm() / scale);
        worst = worst.max((poly.eval(-a) - s.conj()).norm() / scale);
    }
    Ok(CheckOutcome::at_most("periodicity_conjugation", worst, 1e-9, format!("x = {x}")))
}

fn grid_vs_direct(t: &ArithTables, x: u64, n: usize, rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let grid = grid_eval::<f64>(t, x, n)?;
    let scale = t.divisor_summatory(x)? as f64;
    let mut worst = 0f64;
    for _ in 0..32 {
        let k = rng.gen_range(0..n);
        let d: Complex<f64> = eval_s(t, x, k as f64 / n as f64)?;
        worst = worst.max((grid.values[k] - d).norm() / scale);
    }
    Ok(CheckOutcome::at_most("grid_vs_direct", worst, 1e-6, format!("x = {x}, N = {n}, 32 random k")))
}

fn parseval(t: &ArithTables, x: u64, n: usize) -> Result<Vec<CheckOutcome>> {
    let s = grid_eval::<f64>(t, x, n)?.mean_square();
    let l2 = TrigPoly::<f64>::divisor(t, x)?.square_coeff_sum();
    let v = grid_eval_v::<f64>(x, n)?.mean_square();
    let root = x.sqrt() as f64;
    Ok(vec![
        CheckOutcome::at_most("parseval_s", (s - l2).abs() / l2, 1e-6, format!("x = {x}, N = {n}")),
        CheckOutcome::at_most("parseval_v", (v - root).abs() / root, 1e-6, format!("x = {x}, N = {n}")),
    ])
}

fn geometric_bound(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let n1 = rng.gen_range(-10_000..10_000i64);
        let n2 = n1 + rng.gen_range(1..20_000i64);
        let a: f64 = rng.gen_range(-2.0..2.0);
        let (lhs, rhs) = geometric_sum_bound_check(n1, n2, a)?;
        worst = worst.max(lhs - rhs);
    }
    Ok(CheckOutcome::at_most("geometric_sum_bound", worst, 1e-9, "max(lhs - rhs), 1000 random triples"))
}

fn random_unit(rng: &mut ChaCha8Rng, q: u64) -> u64 {
    loop {
        let a = rng.gen_range(1..=q);
        if num_integer::gcd(a, q) == 1 {
            return a;
        }
    }
}

fn f_envelope(x: u64, rng: &mut ChaCha8Rng) -> CheckOutcome {
    let root = x.sqrt();
    let mut worst = 0f64;
    for _ in 0..1000 {
        let q = rng.gen_range(1..=root);
        let a = random_unit(rng, q);
        let w = 1.0 / (2.0 * q as f64 * (x as f64).sqrt());
        let beta = rng.gen_range(-w..=w);
        worst = worst.max(f_envelope_ratio(x, q, a, beta));
    }
    CheckOutcome::at_most("f_envelope", worst, 10.0, format!("sampled C_F, x = {x}, q <= sqrt x"))
}

fn g_envelope(x: u64, rng: &mut ChaCha8Rng) -> CheckOutcome {
    let top = 2 * x.sqrt();
    let mut worst = 0f64;
    for _ in 0..1000 {
        let q = rng.gen_range(1..=top);
        let a = random_unit(rng, q);
        let w = 1.0 / (2.0 * q as f64 * (x as f64).sqrt());
        let beta = rng.gen_range(-w..=w);
        worst = worst.max(g_envelope_ratio(x, q, a, beta));
    }
    CheckOutcome::at_most("g_envelope", worst, 10.0, format!("sampled C_G, x = {x}, q <= 2 sqrt x"))
}

fn farey_neighbours(q_max: u64) -> Result<CheckOutcome> {
    let mut bad = 0u64;
    for big_q in 1..=q_max {
        let f = farey_enumerate(big_q)?;
        bad += f
            .windows(2)
            .filter(|w| w[1].a() as i128 * w[0].q() as i128 - w[0].a() as i128 * w[1].q() as i128 != 1)
            .count() as u64;
    }
    Ok(CheckOutcome::at_most("farey_neighbours", bad as f64, 0.0, format!("a'q - aq' = 1 for Q <= {q_max}")))
}

fn cover(q_max: u64) -> Result<CheckOutcome> {
    let mut worst = f64::NEG_INFINITY;
    for big_q in 2..=q_max {
        worst = worst.max(cover_check::<f64>(big_q, HalfWidth::Dirichlet { big_q })?);
    }
    Ok(CheckOutcome::at_most("dirichlet_cover", worst, 0.0, format!("worst gap, 2 <= Q <= {q_max}")))
}

fn disjoint(xs: &[u64]) -> Result<CheckOutcome> {
    let mut worst = f64::INFINITY;
    for &x in xs {
        worst = worst.min(disjoint_check::<f64>(x, x.sqrt() / 2)?);
    }
    Ok(CheckOutcome::above("disjoint_arcs", worst, 0.0, format!("min separation, x in {xs:?}")))
}

fn locate(big_q: u64, rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let lo = 1.0 / big_q as f64;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let a: f64 = rng.gen_range(lo..=1.0 + lo);
        let (f, beta) = locate_arc(a, big_q)?;
        worst = worst.max(beta.abs() * (f.q() * big_q) as f64 - 1.0);
    }
    Ok(CheckOutcome::at_most("locate_arc", worst, 1e-9, format!("max q Q |beta| - 1, Q = {big_q}")))
}

fn u_q_two_forms(t: &ArithTables, x: u64, rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let scale = t.divisor_summatory(x)? as f64;
    let w = 1.0 / (4.0 * x as f64);
    let mut worst = 0f64;
    for _ in 0..50 {
        let q = rng.gen_range(1..=100u64);
        let beta = rng.gen_range(-w..=w);
        let a: Complex<f64> = u_q(t, x, q, beta)?;
        let b: Complex<f64> = u_q_reduced_residue(t, x, q, beta)?;
        worst = worst.max((a - b).norm() / scale);
    }
    Ok(CheckOutcome::at_most("u_q_two_forms", worst, 1e-8, format!("x = {x}, 50 random (q, beta)")))
}

fn u_q_integrality(t: &ArithTables, x: u64, q_max: u64) -> Result<CheckOutcome> {
    let mut worst = 0f64;
    for q in 1..=q_max {
        let u: Complex<f64> = u_q(t, x, q, 0.0)?;
        worst = worst.max(nearest_int_distance(u.re)).max(u.im.abs());
    }
    Ok(CheckOutcome::at_most("u_q_integrality", worst, 1e-6, format!("x = {x}, q <= {q_max}")))
}

fn pv_mobius_chain(t: &ArithTables, x: u64, q_max: u64) -> Result<CheckOutcome> {
    let tx = x as f64;
    let pair = main_term_pair(t, tx)?;
    let mut worst = 0f64;
    for q in 1..=q_max {
        let mut acc = crate::sum::Neumaier::<f64>::new();
        for d in t.divisors(q) {
            let m = t.mobius(q / d);
            if m != 0 {
                acc += (d as i64 * m) as f64 * pv_main_term(t, tx, d, 0)?;
            }
        }
        let main = tx * pair.g(q);
        worst = worst.max((acc.total() - main).abs() / main.abs().max(1.0));
    }
    Ok(CheckOutcome::at_most("pv_mobius_chain", worst, 1e-9, format!("x = {x}, q <= {q_max}")))
}

fn partial_summation(t: &ArithTables, x: u64, rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let scale = t.divisor_summatory(x)? as f64;
    let w = 1.0 / (4.0 * x as f64);
    let mut worst = partial_summation_check(t, x, 6, w)? / scale;
    for _ in 0..10 {
        let q = rng.gen_range(1..=50u64);
        let beta = rng.gen_range(-w..=w);
        worst = worst.max(partial_summation_check(t, x, q, beta)? / scale);
    }
    Ok(CheckOutcome::at_most("partial_summation", worst, 1e-7, format!("x = {x}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;

    #[test]
    fn suite_passes_on_clean_tables() {
        let t = build_tables(100_000).unwrap();
        let out = run_suite(&t, &VerifyConfig::default()).unwrap();
        for o in &out {
            assert!(o.passed, "{o:?}");
        }
    }

    #[test]
    fn suite_catches_corrupted_tables() {
        let mut t = build_tables(100_000).unwrap();
        t.inject_fault(360);
        let out = run_suite(&t, &VerifyConfig::default()).unwrap();
        let failed: Vec<_> = out.iter().filter(|o| !o.passed).map(|o| o.name).collect();
        assert!(failed.contains(&"mobius_divisor_sum"), "{failed:?}");
        assert!(failed.contains(&"totient_divisor_sum"), "{failed:?}");
    }
}
