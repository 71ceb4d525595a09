//! The Ramanujan-sum aggregate and its asymptotics.
//!
//! ```text
//! U_q(x; β) = Σ_{1≤a≤q, (a,q)=1} S(a/q + β) = Σ_{n≤x} τ(n) c_q(n) e(nβ)
//! U_q(x; 0) = x·g_x(q) + error
//! ```
//!
//! together with the divisor sum over a residue class, the partial
//! summation identity, the disjoint-arc lower-bound functional and
//! log-log regression of measured errors.

use num_complex::Complex;
use rayon::prelude::*;

use crate::arith::main_term_pair;
use crate::error::{Error, Result};
use crate::expsum::{eval_s, unit, TrigPoly};
use crate::sum::{ComplexNeumaier, Neumaier};
use crate::{ArithTables, Scalar};

/// Trapezoid nodes per `q` in the lower-bound functional.
pub const LOWER_BOUND_NODES: usize = 65;

/// `τ(n)·c_q(n)` for `n = 1..=x`.
pub fn ramanujan_weights(tables: &ArithTables, x: u64, q: u64) -> Result<Vec<i64>> {
    if q == 0 {
        return Err(Error::domain("q must be positive"));
    }
    tables.require(x)?;
    // c_q(n) only depends on g = (n, q)
    let divs = tables.divisors(q);
    let by_gcd: Vec<i64> = divs.iter().map(|&g| tables.ramanujan_sum(q, g as i64)).collect();
    Ok((1..=x)
        .map(|n| {
            let g = num_integer::gcd(n, q);
            let c = by_gcd[divs.binary_search(&g).unwrap()];
            tables.tau(n) as i64 * c
        })
        .collect())
}

fn weights_poly<T: Scalar>(w: &[i64]) -> TrigPoly<T> {
    TrigPoly::from_coeffs(w.iter().map(|&c| T::of_i64(c)).collect())
}

/// `U_q(x; β)` through the Ramanujan-sum coefficients.
pub fn u_q<T: Scalar>(tables: &ArithTables, x: u64, q: u64, beta: T) -> Result<Complex<T>> {
    let w = ramanujan_weights(tables, x, q)?;
    Ok(weights_poly::<T>(&w).eval(beta))
}

/// `U_q(x; β)` as the sum of `S` over reduced residues; independent of [`u_q`].
pub fn u_q_reduced_residue<T: Scalar>(
    tables: &ArithTables,
    x: u64,
    q: u64,
    beta: T,
) -> Result<Complex<T>> {
    if q == 0 {
        return Err(Error::domain("q must be positive"));
    }
    let mut acc = ComplexNeumaier::new();
    for a in (1..=q).filter(|&a| num_integer::gcd(a, q) == 1) {
        acc += eval_s(tables, x, T::of_u64(a) / T::of_u64(q) + beta)?;
    }
    Ok(acc.total())
}

/// `U_q(x; 0)` exactly.
pub fn u_q_at_zero(tables: &ArithTables, x: u64, q: u64) -> Result<i128> {
    Ok(ramanujan_weights(tables, x, q)?.into_iter().map(|w| w as i128).sum())
}

/// One `(q, x)` comparison of `U_q(x; 0)` against `x·g_x(q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticRecord<T> {
    pub q: u64,
    pub x: u64,
    /// `U_q(x; 0)`; always an integer.
    pub exact: T,
    pub main: T,
    pub abs_err: T,
    /// `q·τ(q)·(x^{1/3} + q^{1/2})`.
    pub bound_scale: T,
    /// `q > x`: the sum is defined but the asymptotic is meaningless.
    pub out_of_regime: bool,
}

impl<T: Scalar> AsymptoticRecord<T> {
    fn new(tables: &ArithTables, q: u64, x: u64, exact: i128) -> Result<Self> {
        let tx = T::of_u64(x);
        let pair = main_term_pair(tables, tx)?;
        let main = tx * pair.g(q);
        let exact = T::of_i128(exact);
        let tq = T::of_u64(q);
        let tau_q = T::of_u64(tables.divisors(q).len() as u64);
        Ok(Self {
            q,
            x,
            exact,
            main,
            abs_err: (exact - main).abs(),
            bound_scale: tq * tau_q * (tx.cbrt() + tq.sqrt()),
            out_of_regime: q > x,
        })
    }
}

/// [`AsymptoticRecord`] for a single `(q, x)`.
pub fn lemma4_record<T: Scalar>(tables: &ArithTables, x: u64, q: u64) -> Result<AsymptoticRecord<T>> {
    Ok(lemma4_series(tables, q, &[x])?.remove(0))
}

/// Records for one `q` and several `x`, sharing a single pass over the table.
pub fn lemma4_series<T: Scalar>(
    tables: &ArithTables,
    q: u64,
    xs: &[u64],
) -> Result<Vec<AsymptoticRecord<T>>> {
    if let Some(&x) = xs.iter().find(|&&x| x < 2) {
        return Err(Error::domain(format!("lemma4 records need x >= 2, got {x}")));
    }
    let Some(&top) = xs.iter().max() else {
        return Ok(Vec::new());
    };
    let w = ramanujan_weights(tables, top, q)?;
    let mut prefix = Vec::with_capacity(w.len() + 1);
    prefix.push(0i128);
    for &v in &w {
        prefix.push(prefix.last().unwrap() + v as i128);
    }
    xs.iter()
        .map(|&x| AsymptoticRecord::new(tables, q, x, prefix[x as usize]))
        .collect()
}

/// Divisor sum over a residue class against its asymptotic main term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PvRecord<T> {
    pub x: u64,
    pub d: u64,
    pub a: i64,
    pub exact: u64,
    pub main: T,
    pub abs_err: T,
}

/// `(x/d) Σ_{r|d} (c_r(a)/r)(log(x/r²) + 2γ − 1)`.
pub fn pv_main_term<T: Scalar>(tables: &ArithTables, x: T, d: u64, a: i64) -> Result<T> {
    if d == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    let pair = main_term_pair(tables, x)?;
    let s = tables
        .divisors(d)
        .into_iter()
        .map(|r| T::of_i64(tables.ramanujan_sum(r, a)) / T::of_u64(r) * pair.log_factor(r))
        .collect::<Neumaier<T>>()
        .total();
    Ok(x / T::of_u64(d) * s)
}

/// `Σ_{n≤x, n≡a (mod d)} τ(n)` against [`pv_main_term`]; `(a, d) > 1` is allowed.
pub fn pv_check<T: Scalar>(tables: &ArithTables, x: u64, d: u64, a: i64) -> Result<PvRecord<T>> {
    if d == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    tables.require(x)?;
    let r = (a as i128).rem_euclid(d as i128) as u64;
    let start = if r == 0 { d } else { r };
    let exact: u64 = (start..=x).step_by(d as usize).map(|n| tables.tau(n) as u64).sum();
    let main = pv_main_term(tables, T::of_u64(x), d, a)?;
    Ok(PvRecord { x, d, a, exact, main, abs_err: (T::of_u64(exact) - main).abs() })
}

/// `|U_q(x; β) − [e(βx)U_q(x; 0) − 2πiβ ∫₁ˣ e(βy) U_q(y; 0) dy]|`.
///
/// The integral runs over the step function `U_q(y; 0)`, exactly, one unit
/// interval at a time: `∫_k^{k+1} e(βy) dy = e(βk)(e(β) − 1)/(2πiβ)`.
pub fn partial_summation_check<T: Scalar>(
    tables: &ArithTables,
    x: u64,
    q: u64,
    beta: T,
) -> Result<T> {
    let w = ramanujan_weights(tables, x, q)?;
    let direct = weights_poly::<T>(&w).eval(beta);

    let mut running = 0i128;
    let mut integral = ComplexNeumaier::new();
    let step = unit(beta) - Complex::new(T::one(), T::zero());
    for k in 1..x {
        running += w[(k - 1) as usize] as i128;
        if running != 0 {
            // 2πiβ·∫_k^{k+1} e(βy) U(y; 0) dy
            integral += (unit(T::of_u64(k) * beta) * step).scale(T::of_i128(running));
        }
    }
    running += w.last().copied().unwrap_or(0) as i128;
    let rebuilt = unit(T::of_u64(x) * beta).scale(T::of_i128(running)) - integral.total();
    Ok((direct - rebuilt).norm())
}

/// `∫_{−1/(4x)}^{1/(4x)} |U_q(x; β)| dβ` for each `q ≤ ½√x`.
pub fn lower_bound_terms<T: Scalar>(
    tables: &ArithTables,
    x: u64,
    nodes: usize,
) -> Result<Vec<(u64, T)>> {
    if nodes < 2 {
        return Err(Error::domain("trapezoid needs at least two nodes"));
    }
    tables.require(x)?;
    let qs: Vec<u64> = (1..).take_while(|&q: &u64| 4 * q * q <= x).collect();
    let half = T::one() / (T::of(4.0) * T::of_u64(x));
    let h = T::of(2.0) * half / T::of_u64(nodes as u64 - 1);
    qs.into_par_iter()
        .map(|q| {
            let poly = weights_poly::<T>(&ramanujan_weights(tables, x, q)?);
            let mut acc = Neumaier::new();
            for i in 0..nodes {
                let beta = -half + h * T::of_u64(i as u64);
                let f = poly.eval(beta).norm();
                acc += if i == 0 || i == nodes - 1 { f / T::of(2.0) } else { f };
            }
            Ok((q, acc.total() * h))
        })
        .collect()
}

/// `Σ_{q≤½√x} ∫_{−1/(4x)}^{1/(4x)} |U_q(x; β)| dβ`, a lower bound for `I(x)`; 0 when `x < 4`.
pub fn lower_bound_functional<T: Scalar>(tables: &ArithTables, x: u64) -> Result<T> {
    lower_bound_functional_with_nodes(tables, x, LOWER_BOUND_NODES)
}

pub fn lower_bound_functional_with_nodes<T: Scalar>(
    tables: &ArithTables,
    x: u64,
    nodes: usize,
) -> Result<T> {
    Ok(lower_bound_terms::<T>(tables, x, nodes)?
        .into_iter()
        .map(|(_, v)| v)
        .collect::<Neumaier<T>>()
        .total())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosingConstant<T> {
    pub x: u64,
    /// `Σ_{q≤½√x} (φ(q)/q)(log(x/q²) + 2γ − 1)`.
    pub lhs: T,
    /// `(6/π²)(log 2 + γ − 1)·√x`.
    pub target: T,
    /// `lhs / target`.
    pub ratio: T,
    /// `(6/π²)(log 2 + γ + 1/2)·√x`, what partial summation of `lhs` gives.
    pub partial_summation_target: T,
}

/// Coefficient `(6/π²)(log 2 + γ − 1)`.
pub fn closing_coefficient<T: Scalar>() -> T {
    T::of(6.0) / (T::PI() * T::PI()) * (T::LN_2() + T::euler_gamma() - T::one())
}

/// Coefficient `(6/π²)(log 2 + γ + 1/2)`.
pub fn partial_summation_coefficient<T: Scalar>() -> T {
    T::of(6.0) / (T::PI() * T::PI()) * (T::LN_2() + T::euler_gamma() + T::of(0.5))
}

pub fn closing_constant_check<T: Scalar>(tables: &ArithTables, x: u64) -> Result<ClosingConstant<T>> {
    if x < 2 {
        return Err(Error::domain("closing constant needs x >= 2"));
    }
    let tx = T::of_u64(x);
    let pair = main_term_pair(tables, tx)?;
    let lhs = (1..)
        .take_while(|&q: &u64| 4 * q * q <= x)
        .map(|q| pair.g(q))
        .collect::<Neumaier<T>>()
        .total();
    let target = closing_coefficient::<T>() * tx.sqrt();
    Ok(ClosingConstant {
        x,
        lhs,
        target,
        ratio: lhs / target,
        partial_summation_target: partial_summation_coefficient::<T>() * tx.sqrt(),
    })
}

/// Least-squares fit of `log abs_err` against `log x` at fixed `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit<T> {
    pub q: u64,
    pub pairs: Vec<(T, T)>,
    pub slope: T,
    pub intercept: T,
    pub r2: T,
    /// Records dropped because `abs_err ≤ 10⁻⁶·x^{1/4}`.
    pub excluded: usize,
}

pub fn error_exponent<T: Scalar>(records: &[AsymptoticRecord<T>]) -> Result<ExponentFit<T>> {
    let Some(first) = records.first() else {
        return Err(Error::DegenerateFit("no records".into()));
    };
    let q = first.q;
    if records.iter().any(|r| r.q != q) {
        return Err(Error::DegenerateFit("records mix several moduli".into()));
    }
    let floor = |x: u64| T::of(1e-6) * T::of_u64(x).powf(T::of(0.25));
    let usable: Vec<&AsymptoticRecord<T>> = records.iter().filter(|r| r.abs_err > floor(r.x)).collect();
    let excluded = records.len() - usable.len();
    let mut xs: Vec<u64> = usable.iter().map(|r| r.x).collect();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "q = {q}: {} distinct x with nonzero error, need 3",
            xs.len()
        )));
    }

    let pairs: Vec<(T, T)> = usable
        .iter()
        .map(|r| (T::of_u64(r.x).ln(), r.abs_err.ln()))
        .collect();
    let n = T::of_u64(pairs.len() as u64);
    let mx = pairs.iter().map(|p| p.0).fold(T::zero(), |a, b| a + b) / n;
    let my = pairs.iter().map(|p| p.1).fold(T::zero(), |a, b| a + b) / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for &(u, v) in &pairs {
        sxx += (u - mx) * (u - mx);
        sxy += (u - mx) * (v - my);
        syy += (v - my) * (v - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy > T::zero() { sxy * sxy / (sxx * syy) } else { T::one() };
    Ok(ExponentFit { q, pairs, slope, intercept, r2, excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;

    #[test]
    fn u_q_examples() {
        let t = build_tables(100).unwrap();
        let u: Complex<f64> = u_q(&t, 10, 1, 0.0).unwrap();
        assert_eq!(u, Complex::new(27.0, 0.0));
        assert_eq!(u_q_at_zero(&t, 4, 2).unwrap(), 2);
        let s: Complex<f64> = eval_s(&t, 4, 0.5).unwrap();
        assert!((s.re - 2.0).abs() < 1e-12);
        for q in 1..=30 {
            let u: Complex<f64> = u_q(&t, 100, q, 0.0).unwrap();
            assert!(u.im.abs() <= 1e-9 * 482.0);
            assert_eq!(u.re, u_q_at_zero(&t, 100, q).unwrap() as f64);
        }
    }

    #[test]
    fn two_forms_agree_small() {
        let t = build_tables(500).unwrap();
        for (q, beta) in [(1u64, 0.0f64), (6, 1e-4), (7, -3e-4), (12, 0.0)] {
            let a: Complex<f64> = u_q(&t, 500, q, beta).unwrap();
            let b: Complex<f64> = u_q_reduced_residue(&t, 500, q, beta).unwrap();
            assert!((a - b).norm() < 1e-9 * 3000.0, "q={q}");
        }
    }

    #[test]
    fn lemma4_main_term_at_q_two() {
        let t = build_tables(100_000).unwrap();
        let r: AsymptoticRecord<f64> = lemma4_record(&t, 100_000, 2).unwrap();
        let x = 1e5f64;
        let main = 0.5 * x * ((x / 4.0).ln() + 2.0 * crate::EULER_GAMMA - 1.0);
        assert!((r.main - main).abs() < 1e-9 * main);
        assert!(!r.out_of_regime);
        assert_eq!(r.exact.fract(), 0.0);
    }

    #[test]
    fn lemma4_out_of_regime() {
        let t = build_tables(100).unwrap();
        let r: AsymptoticRecord<f64> = lemma4_record(&t, 50, 77).unwrap();
        assert!(r.out_of_regime);
        assert!(lemma4_record::<f64>(&t, 1, 3).is_err());
    }

    #[test]
    fn pv_trivial_modulus_is_divisor_asymptotic() {
        let t = build_tables(1000).unwrap();
        let r: PvRecord<f64> = pv_check(&t, 1000, 1, 0).unwrap();
        let x = 1000f64;
        assert_eq!(r.exact, t.divisor_summatory(1000).unwrap());
        assert!((r.main - x * (x.ln() + 2.0 * crate::EULER_GAMMA - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn pv_scans_the_class() {
        let t = build_tables(1000).unwrap();
        let r: PvRecord<f64> = pv_check(&t, 1000, 6, 3).unwrap();
        let oracle: u64 = (1..=1000u64).filter(|n| n % 6 == 3).map(|n| t.tau(n) as u64).sum();
        assert_eq!(r.exact, oracle);
        let r: PvRecord<f64> = pv_check(&t, 1000, 6, -3).unwrap();
        assert_eq!(r.exact, oracle);
        assert!(r.abs_err <= 50.0 * 10.0);
    }

    #[test]
    fn partial_summation_zero_beta() {
        let t = build_tables(100).unwrap();
        assert_eq!(partial_summation_check(&t, 100, 3, 0.0f64).unwrap(), 0.0);
        let r = partial_summation_check(&t, 100, 1, 1.0f64 / 400.0).unwrap();
        assert!(r <= 1e-7 * 482.0);
    }

    #[test]
    fn lower_bound_small() {
        let t = build_tables(16).unwrap();
        assert_eq!(lower_bound_functional::<f64>(&t, 3).unwrap(), 0.0);
        let terms = lower_bound_terms::<f64>(&t, 16, LOWER_BOUND_NODES).unwrap();
        assert_eq!(terms.iter().map(|t| t.0).collect::<Vec<_>>(), vec![1, 2]);
        assert!(terms.iter().all(|t| t.1 > 0.0));
    }

    #[test]
    fn closing_coefficient_value() {
        assert!((closing_coefficient::<f64>() - 0.16436).abs() < 1e-5);
        assert!((partial_summation_coefficient::<f64>() - 1.07625).abs() < 1e-5);
    }

    #[test]
    fn exponent_fit_basics() {
        let rec = |x: u64, e: f64| AsymptoticRecord {
            q: 1,
            x,
            exact: 0.0,
            main: 0.0,
            abs_err: e,
            bound_scale: 0.0,
            out_of_regime: false,
        };
        let flat = error_exponent(&[rec(10, 5.0), rec(100, 5.0), rec(1000, 5.0)]).unwrap();
        assert_eq!(flat.slope, 0.0);
        let line = error_exponent(&[rec(10, 10f64.powf(0.3)), rec(100, 100f64.powf(0.3)), rec(1000, 1000f64.powf(0.3))])
            .unwrap();
        assert!((line.slope - 0.3).abs() < 1e-12 && (line.r2 - 1.0).abs() < 1e-12);
        assert!(error_exponent(&[rec(10, 5.0), rec(100, 5.0)]).is_err());
        let with_zero = error_exponent(&[rec(10, 5.0), rec(100, 0.0), rec(1000, 5.0), rec(10000, 5.0)]).unwrap();
        assert_eq!(with_zero.excluded, 1);
    }
}
