//! Quadrature of `I(x) = ∫₀¹ |S(α)| dα`.
//!
//! [`l1_norm`] runs the periodic trapezoid rule on FFT grids of doubling
//! size. [`arc_refined_l1`] integrates piece by piece over the Farey
//! dissection with per-piece adaptive refinement; the two are
//! independent routes to the same number.
//!
//! Acceptance is gated on doubling agreement. The rigorous Lipschitz
//! bound `L·h/4` with `L = 2π Σ nτ(n)` is reported alongside but is far
//! too large to be useful at realistic grid sizes.

use num_integer::Roots;
use rayon::prelude::*;

use crate::dissection::{cover_check, farey_partition, HalfWidth};
use crate::error::{Error, Result};
use crate::expsum::{grid_eval, TrigPoly};
use crate::sum::Neumaier;
use crate::{ArithTables, Scalar};

pub const DEFAULT_TOL: f64 = 1e-3;
pub const DEFAULT_NODE_CAP: usize = 1 << 24;
const MAX_PIECE_DOUBLINGS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub x: u64,
    /// Estimate of `I(x)`.
    pub value: T,
    /// Last refinement change (uniform grid) or sum of per-piece changes (arcs).
    pub error_estimate: T,
    /// Integrand evaluations behind `value`.
    pub nodes: usize,
    /// `(nodes, value)` after each refinement level.
    pub levels: Vec<(usize, T)>,
    pub converged: bool,
    /// Rigorous but very loose bound from the Lipschitz constant of `|S|`.
    pub lipschitz_bound: T,
}

/// Uniform-grid estimate of `I(x)` to relative tolerance `tol`.
pub fn l1_norm<T: Scalar>(tables: &ArithTables, x: u64, tol: T) -> Result<QuadratureResult<T>> {
    l1_norm_with_cap(tables, x, tol, DEFAULT_NODE_CAP)
}

pub fn l1_norm_with_cap<T: Scalar>(
    tables: &ArithTables,
    x: u64,
    tol: T,
    node_cap: usize,
) -> Result<QuadratureResult<T>> {
    if x == 0 {
        return Err(Error::domain("x must be at least 1"));
    }
    if !(tol > T::zero()) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    tables.require(x)?;
    let lipschitz = TrigPoly::<T>::divisor(tables, x)?.lipschitz_bound();

    let gate = 4 * x as usize;
    let mut n = (x as usize).next_power_of_two().max(8);
    let mut levels: Vec<(usize, T)> = Vec::new();
    let mut change = T::infinity();
    let mut converged = false;
    loop {
        let v = grid_eval::<T>(tables, x, n)?.mean_abs();
        if let Some(&(_, prev)) = levels.last() {
            change = (v - prev).abs();
        }
        levels.push((n, v));
        if n >= gate && change < tol * v {
            converged = true;
            break;
        }
        if n * 2 > node_cap {
            break;
        }
        n *= 2;
    }
    let (nodes, value) = *levels.last().unwrap();
    Ok(QuadratureResult {
        x,
        value,
        error_estimate: change,
        nodes,
        levels,
        converged,
        lipschitz_bound: lipschitz / T::of_u64(4 * nodes as u64),
    })
}

/// `(I/√x, I/(√x log x))`; the second is `+∞` at `x = 1`.
pub fn bound_ratios<T: Scalar>(result: &QuadratureResult<T>) -> (T, T) {
    let tx = T::of_u64(result.x);
    let root = tx.sqrt();
    let lower = result.value / root;
    let log = tx.ln();
    let upper = if log > T::zero() { result.value / (root * log) } else { T::infinity() };
    (lower, upper)
}

/// One piece of the arc-wise trapezoid rule.
#[derive(Clone, Debug)]
struct Piece<T> {
    lo: T,
    hi: T,
    intervals: usize,
    ends: T,
    interior: Neumaier<T>,
    estimate: T,
    change: T,
    target: T,
    doublings: usize,
}

impl<T: Scalar> Piece<T> {
    fn width(&self) -> T {
        (self.hi - self.lo) / T::of_u64(self.intervals as u64)
    }

    fn trapezoid(&self) -> T {
        self.width() * (self.ends / T::of(2.0) + self.interior.total())
    }

    fn done(&self) -> bool {
        self.change <= self.target || self.doublings >= MAX_PIECE_DOUBLINGS
    }

    fn double(&mut self, poly: &TrigPoly<T>) {
        let h = self.width();
        for i in 0..self.intervals {
            let t = self.lo + h * (T::of_u64(i as u64) + T::of(0.5));
            self.interior += poly.eval(t).norm();
        }
        self.intervals *= 2;
        let next = self.trapezoid();
        self.change = (next - self.estimate).abs();
        self.estimate = next;
        self.doublings += 1;
    }

    fn nodes(&self) -> usize {
        self.intervals + 1
    }
}

/// `I(x)` integrated over the Farey dissection of order `Q` with per-piece refinement.
///
/// `Q` must satisfy `Q ≥ 2√x`, which is exactly when the arcs of half-width
/// `1/(2q√x)` cover `[1/Q, 1 + 1/Q]`. Each piece of the mediant partition
/// starts with a node density proportional to `x·(1 + log(2√x/q))`, denser
/// near small denominators where `|S|` peaks, and is halved until its
/// trapezoid value moves by less than `base_tol·I₀·length`.
pub fn arc_refined_l1<T: Scalar>(
    tables: &ArithTables,
    x: u64,
    big_q: u64,
    base_tol: T,
) -> Result<QuadratureResult<T>> {
    if x == 0 {
        return Err(Error::domain("x must be at least 1"));
    }
    if !(base_tol > T::zero()) {
        return Err(Error::domain(format!("tolerance must be positive, got {base_tol}")));
    }
    tables.require(x)?;
    if big_q < 2 {
        return Err(Error::CoverFailure { gap: f64::INFINITY });
    }
    let gap: T = cover_check(big_q, HalfWidth::Major { x })?;
    if gap > T::zero() || (big_q as u128).pow(2) < 4 * x as u128 {
        return Err(Error::CoverFailure { gap: gap.as_f64() });
    }

    let poly = TrigPoly::<T>::divisor(tables, x)?;
    let tx = T::of_u64(x);
    let two_root_x = T::of(2.0) * tx.sqrt();
    let mut pieces: Vec<Piece<T>> = farey_partition::<T>(big_q)?
        .into_par_iter()
        .map(|p| {
            let boost = T::one() + (two_root_x / T::of_u64(p.center.q())).ln().max(T::zero());
            let want = (p.hi - p.lo) * tx * T::of(4.0) * boost;
            let intervals = want.ceil().to_usize().unwrap_or(2).max(2);
            let mut piece = Piece {
                lo: p.lo,
                hi: p.hi,
                intervals,
                ends: poly.eval(p.lo).norm() + poly.eval(p.hi).norm(),
                interior: Neumaier::new(),
                estimate: T::zero(),
                change: T::infinity(),
                target: T::zero(),
                doublings: 0,
            };
            let h = piece.width();
            for i in 1..intervals {
                piece.interior += poly.eval(p.lo + h * T::of_u64(i as u64)).norm();
            }
            piece.estimate = piece.trapezoid();
            piece
        })
        .collect();

    let total = |ps: &[Piece<T>]| ps.iter().map(|p| p.estimate).collect::<Neumaier<T>>().total();
    let count = |ps: &[Piece<T>]| ps.iter().map(Piece::nodes).sum::<usize>();
    let initial = total(&pieces);
    for p in pieces.iter_mut() {
        p.target = base_tol * initial * (p.hi - p.lo);
    }
    let mut levels = vec![(count(&pieces), initial)];
    while pieces.iter().any(|p| !p.done()) {
        pieces.par_iter_mut().filter(|p| !p.done()).for_each(|p| p.double(&poly));
        levels.push((count(&pieces), total(&pieces)));
    }

    let value = total(&pieces);
    let error_estimate = pieces.iter().map(|p| p.change).collect::<Neumaier<T>>().total();
    let converged = pieces.iter().all(|p| p.change <= p.target);
    let max_h = pieces.iter().map(Piece::width).fold(T::zero(), T::max);
    let nodes = count(&pieces);
    Ok(QuadratureResult {
        x,
        value,
        error_estimate,
        nodes,
        levels,
        converged,
        lipschitz_bound: poly.lipschitz_bound() * max_h / T::of(4.0),
    })
}

/// Default dissection order `⌈2√x⌉`.
pub fn default_big_q(x: u64) -> u64 {
    let r = (4 * x).sqrt();
    if r * r == 4 * x {
        r
    } else {
        r + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_tables;

    #[test]
    fn single_term_has_unit_norm() {
        let t = build_tables(4).unwrap();
        let r = l1_norm::<f64>(&t, 1, 1e-3).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(bound_ratios(&r), (r.value, f64::INFINITY));
    }

    #[test]
    fn two_terms_against_fine_midpoint_reference() {
        let t = build_tables(4).unwrap();
        let r = l1_norm::<f64>(&t, 2, 1e-6).unwrap();
        let m = 1_000_000;
        let reference: f64 = (0..m)
            .map(|k| {
                let a = (k as f64 + 0.5) / m as f64;
                let z = crate::expsum::unit(a) + crate::expsum::unit(2.0 * a).scale(2.0);
                z.norm()
            })
            .sum::<f64>()
            / m as f64;
        assert!((r.value - reference).abs() < 1e-6, "{} vs {}", r.value, reference);
    }

    #[test]
    fn bad_inputs() {
        let t = build_tables(10).unwrap();
        assert!(l1_norm::<f64>(&t, 0, 1e-3).is_err());
        assert!(l1_norm::<f64>(&t, 5, 0.0).is_err());
        assert!(l1_norm::<f64>(&t, 11, 1e-3).is_err());
    }

    #[test]
    fn node_cap_flags_non_convergence() {
        let t = build_tables(64).unwrap();
        let r = l1_norm_with_cap::<f64>(&t, 64, 1e-3, 64).unwrap();
        assert!(!r.converged);
        assert_eq!(r.nodes, 64);
    }

    #[test]
    fn ratios_are_arithmetic() {
        let r = QuadratureResult {
            x: 4096,
            value: 640.0f64,
            error_estimate: 0.0,
            nodes: 0,
            levels: vec![],
            converged: true,
            lipschitz_bound: 0.0,
        };
        let (lo, hi) = bound_ratios(&r);
        assert_eq!(lo, 10.0);
        assert!((hi - 640.0 / (64.0 * 4096f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn default_q_is_ceiling_of_two_root_x() {
        assert_eq!(default_big_q(100), 20);
        assert_eq!(default_big_q(101), 21);
        assert_eq!(default_big_q(1), 2);
    }

    #[test]
    fn arc_refined_rejects_small_q() {
        let t = build_tables(256).unwrap();
        assert!(matches!(arc_refined_l1::<f64>(&t, 256, 31, 1e-3), Err(Error::CoverFailure { .. })));
    }

    #[test]
    fn arc_refined_agrees_with_uniform_small() {
        let t = build_tables(64).unwrap();
        let u = l1_norm::<f64>(&t, 64, 1e-4).unwrap();
        let a = arc_refined_l1::<f64>(&t, 64, default_big_q(64), 1e-4).unwrap();
        assert!((u.value - a.value).abs() <= 3.0 * (u.error_estimate + a.error_estimate));
    }
}
