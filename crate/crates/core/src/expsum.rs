//! Evaluation of `S`, `T`, `V`, `F_q`, `G_q` at points and on uniform grids.
//!
//! With `u, v` positive integers,
//!
//! ```text
//! S(α) = Σ_{uv≤x} e(uvα) = 2 T(α) + V(α)
//! T(α) = Σ_{u≤√x} Σ_{u<v≤x/u} e(uvα),   V(α) = Σ_{u≤√x} e(u²α)
//! T(α) = F_q(α) + G_q(α)                 (F: q | u,  G: q ∤ u)
//! ```
//!
//! The sign convention is `e(α) = exp(+2πiα)` everywhere.

use std::io::Write;

use num_complex::Complex;
use num_integer::Roots;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::sum::{ComplexNeumaier, Neumaier};
use crate::{ArithTables, Scalar};

/// Terms per recurrence block; each block is re-seeded from a reduced phase.
const BLOCK: usize = 64;
/// Terms per parallel chunk.
const CHUNK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SumKind {
    S,
    T,
    V,
    F,
    G,
}

/// A single evaluation together with the parameters that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpSumEval<T> {
    pub kind: SumKind,
    pub x: u64,
    pub alpha: T,
    pub q: Option<u64>,
    pub value: Complex<T>,
}

/// `‖α‖`, the distance from `α` to the nearest integer.
#[inline]
pub fn nearest_int_distance<T: Scalar>(alpha: T) -> T {
    (alpha - alpha.round()).abs()
}

/// `e(phase)` after reducing `phase` mod 1.
#[inline]
pub fn unit<T: Scalar>(phase: T) -> Complex<T> {
    let (s, c) = (T::TAU() * phase.frac01()).sin_cos();
    Complex::new(c, s)
}

/// A real-coefficient trigonometric polynomial `Σ_{n=1}^{len} c_n e(nα)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TrigPoly<T> {
    /// `coeffs[i]` multiplies `e((i+1)α)`.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// The divisor polynomial `S`: coefficients τ(1..=x).
    pub fn divisor(tables: &ArithTables, x: u64) -> Result<Self> {
        tables.require(x)?;
        Ok(Self::from_coeffs(
            tables.tau_values()[..x as usize]
                .iter()
                .map(|&t| T::of_u64(t as u64))
                .collect(),
        ))
    }

    pub fn degree(&self) -> u64 {
        self.coeffs.len() as u64
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn eval(&self, alpha: T) -> Complex<T> {
        let alpha = alpha.frac01();
        if self.coeffs.len() <= CHUNK {
            return eval_range(&self.coeffs, 1, alpha).total();
        }
        let parts: Vec<ComplexNeumaier<T>> = self
            .coeffs
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(i, c)| eval_range(c, 1 + (i * CHUNK) as u64, alpha))
            .collect();
        let mut acc = ComplexNeumaier::new();
        for p in parts {
            acc += p.total();
        }
        acc.total()
    }

    /// `Σ |c_n|`, the trivial bound on `|P(α)|`.
    pub fn abs_coeff_sum(&self) -> T {
        self.coeffs.iter().map(|c| c.abs()).collect::<Neumaier<T>>().total()
    }

    /// `Σ c_n²`, i.e. `∫₀¹ |P|²`.
    pub fn square_coeff_sum(&self) -> T {
        self.coeffs.iter().map(|&c| c * c).collect::<Neumaier<T>>().total()
    }

    /// `2π Σ n |c_n|`, a Lipschitz constant for `|P|`.
    pub fn lipschitz_bound(&self) -> T {
        let s = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| T::of_u64(i as u64 + 1) * c.abs())
            .collect::<Neumaier<T>>()
            .total();
        T::TAU() * s
    }
}

fn eval_range<T: Scalar>(coeffs: &[T], first_n: u64, alpha: T) -> ComplexNeumaier<T> {
    let step = unit(alpha);
    let mut acc = ComplexNeumaier::new();
    for (b, block) in coeffs.chunks(BLOCK).enumerate() {
        let n0 = first_n + (b * BLOCK) as u64;
        let mut z = unit(T::of_u64(n0) * alpha);
        for &c in block {
            if c != T::zero() {
                acc += z.scale(c);
            }
            z *= step;
        }
    }
    acc
}

/// `S(α) = Σ_{n≤x} τ(n) e(nα)`.
pub fn eval_s<T: Scalar>(tables: &ArithTables, x: u64, alpha: T) -> Result<Complex<T>> {
    Ok(TrigPoly::divisor(tables, x)?.eval(alpha))
}

/// `S(a/q)` by bucketing τ over residues mod `q`; every phase is exact.
pub fn eval_s_at_fraction<T: Scalar>(
    tables: &ArithTables,
    x: u64,
    a: i64,
    q: u64,
) -> Result<Complex<T>> {
    if q == 0 {
        return Err(Error::domain("denominator must be positive"));
    }
    tables.require(x)?;
    let mut buckets = vec![0u64; q as usize];
    for n in 1..=x {
        buckets[(n % q) as usize] += tables.tau(n) as u64;
    }
    let a = (a as i128).rem_euclid(q as i128);
    let tq = T::of_u64(q);
    let mut acc = ComplexNeumaier::new();
    for (m, &b) in buckets.iter().enumerate() {
        if b == 0 {
            continue;
        }
        let k = (a * m as i128) % q as i128;
        acc += unit(T::of_i128(k) / tq).scale(T::of_u64(b));
    }
    Ok(acc.total())
}

/// `V(α) = Σ_{u≤√x} e(u²α)`.
pub fn eval_v<T: Scalar>(x: u64, alpha: T) -> Complex<T> {
    let alpha = alpha.frac01();
    (1..=x.sqrt())
        .map(|u| unit(T::of_u64(u * u) * alpha))
        .collect::<ComplexNeumaier<T>>()
        .total()
}

/// Inner sum `Σ_{u<v≤x/u} e(uvα)` for one `u`, in closed form.
#[inline]
fn row<T: Scalar>(x: u64, u: u64, alpha: T) -> Complex<T> {
    let top = x / u;
    if top <= u {
        return Complex::new(T::zero(), T::zero());
    }
    geometric_sum(u as i64, top as i64, T::of_u64(u) * alpha)
}

fn rows<T: Scalar>(x: u64, alpha: T, keep: impl Fn(u64) -> bool) -> Complex<T> {
    let alpha = alpha.frac01();
    (1..=x.sqrt())
        .filter(|&u| keep(u))
        .map(|u| row(x, u, alpha))
        .collect::<ComplexNeumaier<T>>()
        .total()
}

/// `T(α) = Σ_{u≤√x} Σ_{u<v≤x/u} e(uvα)`.
pub fn eval_t<T: Scalar>(x: u64, alpha: T) -> Complex<T> {
    rows(x, alpha, |_| true)
}

/// `F_q(α)`: the part of `T` with `q | u`; identically zero when `q > √x`.
pub fn eval_f<T: Scalar>(x: u64, q: u64, alpha: T) -> Complex<T> {
    assert!(q >= 1, "q must be positive");
    let alpha = alpha.frac01();
    let root = x.sqrt();
    (1..=root / q)
        .map(|j| row(x, j * q, alpha))
        .collect::<ComplexNeumaier<T>>()
        .total()
}

/// `G_q(α)`: the part of `T` with `q ∤ u`.
pub fn eval_g<T: Scalar>(x: u64, q: u64, alpha: T) -> Complex<T> {
    assert!(q >= 1, "q must be positive");
    rows(x, alpha, |u| u % q != 0)
}

/// Evaluate any of the five sums and tag the result.
pub fn evaluate<T: Scalar>(
    kind: SumKind,
    tables: &ArithTables,
    x: u64,
    q: Option<u64>,
    alpha: T,
) -> Result<ExpSumEval<T>> {
    let need_q = || q.filter(|&q| q >= 1).ok_or_else(|| Error::domain("F and G need a modulus q >= 1"));
    let value = match kind {
        SumKind::S => eval_s(tables, x, alpha)?,
        SumKind::T => eval_t(x, alpha),
        SumKind::V => eval_v(x, alpha),
        SumKind::F => eval_f(x, need_q()?, alpha),
        SumKind::G => eval_g(x, need_q()?, alpha),
    };
    Ok(ExpSumEval { kind, x, alpha, q, value })
}

/// `Σ_{n1<n≤n2} e(nα)` in closed form, `e((n1+n2+1)θ/2)·sin(πLθ)/sin(πθ)`.
pub fn geometric_sum<T: Scalar>(n1: i64, n2: i64, alpha: T) -> Complex<T> {
    let len = n2 - n1;
    if len <= 0 {
        return Complex::new(T::zero(), T::zero());
    }
    let theta = alpha - alpha.round();
    if theta == T::zero() {
        return Complex::new(T::of_i64(len), T::zero());
    }
    let two = T::of(2.0);
    let lt = T::of_i64(len) * theta;
    let lt = lt - two * (lt / two).round();
    let ratio = (T::PI() * lt).sin() / (T::PI() * theta).sin();
    let centre = T::of_i64(n1 + n2 + 1) * theta;
    let centre = centre - two * (centre / two).floor();
    unit(centre / two).scale(ratio)
}

/// `(|Σ_{n1<n≤n2} e(nα)|, min(n2 − n1, 1/(2‖α‖)))`.
pub fn geometric_sum_bound_check<T: Scalar>(n1: i64, n2: i64, alpha: T) -> Result<(T, T)> {
    if n1 >= n2 {
        return Err(Error::domain("geometric sum needs n1 < n2"));
    }
    let lhs = geometric_sum(n1, n2, alpha).norm();
    let dist = nearest_int_distance(alpha);
    let len = T::of_i64(n2 - n1);
    let rhs = if dist == T::zero() { len } else { len.min(T::one() / (T::of(2.0) * dist)) };
    Ok((lhs, rhs))
}

/// `S` (or another polynomial) sampled at `α = k/N`, `k = 0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridEval<T> {
    pub x: u64,
    pub n: usize,
    pub values: Vec<Complex<T>>,
}

/// `values[k] = Σ_m b[m] e(km/N)` for real bucket weights `b`.
fn dft_of_buckets<T: Scalar>(buckets: Vec<T>) -> Vec<Complex<T>> {
    let n = buckets.len();
    let mut buf: Vec<Complex<T>> = buckets.into_iter().map(|b| Complex::new(b, T::zero())).collect();
    // the unnormalised inverse transform carries the e(+km/N) kernel
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf
}

/// `S(k/N)` for `k = 0..N` via residue bucketing and one length-`N` DFT.
pub fn grid_eval<T: Scalar>(tables: &ArithTables, x: u64, n: usize) -> Result<GridEval<T>> {
    if n == 0 {
        return Err(Error::domain("grid size must be positive"));
    }
    tables.require(x)?;
    let mut buckets = vec![0u64; n];
    for m in 1..=x {
        buckets[(m % n as u64) as usize] += tables.tau(m) as u64;
    }
    let values = dft_of_buckets(buckets.into_iter().map(T::of_u64).collect());
    Ok(GridEval { x, n, values })
}

/// `V(k/N)` for `k = 0..N`.
pub fn grid_eval_v<T: Scalar>(x: u64, n: usize) -> Result<GridEval<T>> {
    if n == 0 {
        return Err(Error::domain("grid size must be positive"));
    }
    let mut buckets = vec![0u64; n];
    for u in 1..=x.sqrt() {
        buckets[((u * u) % n as u64) as usize] += 1;
    }
    let values = dft_of_buckets(buckets.into_iter().map(T::of_u64).collect());
    Ok(GridEval { x, n, values })
}

impl<T: Scalar> GridEval<T> {
    /// `(1/N) Σ_k |values[k]|²`.
    pub fn mean_square(&self) -> T {
        let s = self.values.iter().map(|v| v.norm_sqr()).collect::<Neumaier<T>>().total();
        s / T::of_u64(self.n as u64)
    }

    /// `(1/N) Σ_k |values[k]|`, the rectangle (periodic trapezoid) rule for `∫|S|`.
    pub fn mean_abs(&self) -> T {
        let s = self.values.iter().map(|v| v.norm()).collect::<Neumaier<T>>().total();
        s / T::of_u64(self.n as u64)
    }

    /// CSV with header `k,alpha,re,im,abs`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "alpha", "re", "im", "abs"])?;
        let n = T::of_u64(self.n as u64);
        for (k, v) in self.values.iter().enumerate() {
            out.write_record(&[
                k.to_string(),
                (T::of_u64(k as u64) / n).to_string(),
                v.re.to_string(),
                v.im.to_string(),
                v.norm().to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `q·|F_q(a/q+β)| / (min(x, 1/|β|)·log(2√x/q))`, meaningful for `q ≤ √x`.
pub fn f_envelope_ratio<T: Scalar>(x: u64, q: u64, a: u64, beta: T) -> T {
    let alpha = T::of_u64(a) / T::of_u64(q) + beta;
    let f = eval_f(x, q, alpha).norm();
    let tx = T::of_u64(x);
    let cap = if beta == T::zero() { tx } else { tx.min(T::one() / beta.abs()) };
    let log = (T::of(2.0) * tx.sqrt() / T::of_u64(q)).ln();
    T::of_u64(q) * f / (cap * log)
}

/// `|G_q(a/q+β)| / ((√x + q)(1 + log q))`.
pub fn g_envelope_ratio<T: Scalar>(x: u64, q: u64, a: u64, beta: T) -> T {
    let alpha = T::of_u64(a) / T::of_u64(q) + beta;
    let g = eval_g(x, q, alpha).norm();
    let tq = T::of_u64(q);
    g / ((T::of_u64(x).sqrt() + tq) * (T::one() + tq.ln()))
}
