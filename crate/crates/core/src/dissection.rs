//! Farey fractions and the arc systems built on them.
//!
//! Three half-width rules are used around a reduced `a/q`, `1 ≤ a ≤ q`:
//!
//! * [`HalfWidth::Dirichlet`]: `1/(qQ)`, covering `[1/Q, 1 + 1/Q]`;
//! * [`HalfWidth::Major`]: `1/(2q√x)`, the arcs integrated over for the upper bound;
//! * [`HalfWidth::Disjoint`]: `1/(4x)`, pairwise disjoint when `q ≤ √x`.

use std::cmp::Ordering;
use std::io::Write;
use std::ops::Sub;

use crate::error::{Error, Result};
use crate::Scalar;

/// A reduced fraction `a/q` with `1 ≤ a ≤ q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    a: u64,
    q: u64,
}

impl Fraction {
    pub fn new(a: u64, q: u64) -> Result<Self> {
        if q == 0 || a == 0 || a > q {
            return Err(Error::domain(format!("{a}/{q} is not in (0, 1]")));
        }
        if num_integer::gcd(a, q) != 1 {
            return Err(Error::domain(format!("{a}/{q} is not reduced")));
        }
        Ok(Self { a, q })
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn value<T: Scalar>(&self) -> T {
        T::of_u64(self.a) / T::of_u64(self.q)
    }

    fn rat(&self) -> Rat {
        Rat::new(self.a as i128, self.q as i128)
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.a as u128 * other.q as u128).cmp(&(other.a as u128 * self.q as u128))
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// Exact rational used by the cover and disjointness sweeps.
#[derive(Clone, Copy, Debug)]
struct Rat {
    num: i128,
    den: i128,
}

impl Rat {
    fn new(num: i128, den: i128) -> Self {
        debug_assert!(den > 0);
        let g = num_integer::gcd(num, den).max(1);
        Self { num: num / g, den: den / g }
    }

    fn to_scalar<T: Scalar>(self) -> T {
        T::of_i128(self.num) / T::of_i128(self.den)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        self.num * other.den == other.num * self.den
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.num * other.den).partial_cmp(&(other.num * self.den))
    }
}

impl Sub for Rat {
    type Output = Rat;
    fn sub(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
}

impl std::ops::Add for Rat {
    type Output = Rat;
    fn add(self, o: Rat) -> Rat {
        Rat::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
}

/// How wide the arc around `a/q` is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HalfWidth {
    /// `1/(qQ)`.
    Dirichlet { big_q: u64 },
    /// `1/(2q√x)`.
    Major { x: u64 },
    /// `1/(4x)`.
    Disjoint { x: u64 },
}

impl HalfWidth {
    pub fn width<T: Scalar>(&self, q: u64) -> T {
        let tq = T::of_u64(q);
        match *self {
            HalfWidth::Dirichlet { big_q } => T::one() / (tq * T::of_u64(big_q)),
            HalfWidth::Major { x } => T::one() / (T::of(2.0) * tq * T::of_u64(x).sqrt()),
            HalfWidth::Disjoint { x } => T::one() / (T::of(4.0) * T::of_u64(x)),
        }
    }

    fn exact(&self, q: u64) -> Option<Rat> {
        match *self {
            HalfWidth::Dirichlet { big_q } => Some(Rat::new(1, q as i128 * big_q as i128)),
            HalfWidth::Major { .. } => None,
            HalfWidth::Disjoint { x } => Some(Rat::new(1, 4 * x as i128)),
        }
    }
}

/// An interval `[a/q − w, a/q + w]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc<T> {
    pub center: Fraction,
    pub half_width: T,
}

impl<T: Scalar> Arc<T> {
    pub fn new(center: Fraction, rule: HalfWidth) -> Self {
        Self { center, half_width: rule.width(center.q) }
    }

    pub fn lo(&self) -> T {
        self.center.value::<T>() - self.half_width
    }

    pub fn hi(&self) -> T {
        self.center.value::<T>() + self.half_width
    }

    pub fn contains(&self, alpha: T) -> bool {
        (alpha - self.center.value::<T>()).abs() <= self.half_width
    }
}

/// All reduced `a/q` with `1 ≤ a ≤ q ≤ Q`, increasing, by the next-term recurrence.
pub fn farey_enumerate(big_q: u64) -> Result<Vec<Fraction>> {
    if big_q == 0 {
        return Err(Error::domain("Farey order must be at least 1"));
    }
    let mut out = Vec::new();
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, big_q);
    while c <= d {
        out.push(Fraction { a: c, q: d });
        let k = (big_q + b) / d;
        let (nc, nd) = (k * c - a, k * d - b);
        (a, b, c, d) = (c, d, nc, nd);
        if a == 1 && b == 1 {
            break;
        }
    }
    Ok(out)
}

/// The arcs around every Farey fraction of order `Q`.
pub fn arcs<T: Scalar>(big_q: u64, rule: HalfWidth) -> Result<Vec<Arc<T>>> {
    Ok(farey_enumerate(big_q)?.into_iter().map(|f| Arc::new(f, rule)).collect())
}

/// Largest uncovered gap of `[start, end]` under the union of `(lo, hi)` intervals.
fn worst_gap<V: Copy + PartialOrd + Sub<Output = V>>(start: V, end: V, mut spans: Vec<(V, V)>) -> V {
    spans.sort_by(|l, r| l.0.partial_cmp(&r.0).unwrap_or(Ordering::Equal));
    let mut reach = start;
    let mut worst = None::<V>;
    let mut bump = |g: V| {
        if worst.is_none_or(|w| g > w) {
            worst = Some(g);
        }
    };
    for (lo, hi) in spans {
        if lo >= end {
            break;
        }
        bump(lo - reach);
        if hi > reach {
            reach = hi;
        }
    }
    bump(end - reach);
    worst.unwrap()
}

/// Worst gap left by the arcs of order `Q` inside `[1/Q, 1 + 1/Q]`.
///
/// A result `≤ 0` means the arcs cover the whole range. Rational rules
/// are swept in exact integer arithmetic.
pub fn cover_check<T: Scalar>(big_q: u64, rule: HalfWidth) -> Result<T> {
    if big_q < 2 {
        return Err(Error::domain("cover_check requires Q >= 2"));
    }
    let fracs = farey_enumerate(big_q)?;
    if rule.exact(1).is_some() {
        let spans = fracs
            .iter()
            .map(|f| {
                let w = rule.exact(f.q).unwrap();
                (f.rat() - w, f.rat() + w)
            })
            .collect();
        let start = Rat::new(1, big_q as i128);
        let end = Rat::new(big_q as i128 + 1, big_q as i128);
        Ok(worst_gap(start, end, spans).to_scalar())
    } else {
        let spans = fracs
            .iter()
            .map(|&f| {
                let arc = Arc::<T>::new(f, rule);
                (arc.lo(), arc.hi())
            })
            .collect();
        let q = T::of_u64(big_q);
        Ok(worst_gap(T::one() / q, T::one() + T::one() / q, spans))
    }
}

/// `min_{a/q ≠ a'/q'} |a/q − a'/q'| − 2/(4x)` over fractions with `q ≤ q_cap`,
/// measured on the circle `ℝ/ℤ`; `+∞` when there is only one fraction.
pub fn disjoint_check<T: Scalar>(x: u64, q_cap: u64) -> Result<T> {
    if q_cap == 0 || x == 0 {
        return Err(Error::domain("disjoint_check requires x, q_cap >= 1"));
    }
    if q_cap.saturating_mul(q_cap) > x {
        return Err(Error::domain(format!("q_cap {q_cap} exceeds sqrt({x})")));
    }
    let fracs = farey_enumerate(q_cap)?;
    if fracs.len() < 2 {
        return Ok(T::infinity());
    }
    let width = Rat::new(2, 4 * x as i128);
    let wrap = fracs[0].rat() + Rat::new(1, 1) - fracs[fracs.len() - 1].rat();
    let min = fracs
        .windows(2)
        .map(|w| w[1].rat() - w[0].rat())
        .fold(wrap, |m, d| if d < m { d } else { m });
    Ok((min - width).to_scalar())
}

const TIE_MARGIN: f64 = 1.0 / (1u64 << 40) as f64;

/// Find `a/q` with `q ≤ Q` and `|α − a/q| ≤ 1/(qQ)`; returns it with `β = α − a/q`.
///
/// The two Farey neighbours of order `Q` around `α` are located by
/// continued-fraction (batched Stern–Brocot) steps; the nearer admissible
/// one wins, ties going to the smaller `q`, then the smaller `a`.
pub fn locate_arc<T: Scalar>(alpha: T, big_q: u64) -> Result<(Fraction, T)> {
    if big_q == 0 {
        return Err(Error::domain("Q must be positive"));
    }
    let tq = T::of_u64(big_q);
    if !(alpha >= T::one() / tq && alpha <= T::one() + T::one() / tq) {
        return Err(Error::domain(format!("alpha = {alpha} outside [1/Q, 1 + 1/Q]")));
    }
    if alpha >= T::one() {
        let one = Fraction { a: 1, q: 1 };
        return Ok((one, alpha - T::one()));
    }

    let (lo, hi) = farey_neighbours(alpha, big_q);
    let mut best: Option<(Fraction, T)> = None;
    for (p, q) in [lo, hi] {
        if p == 0 {
            continue;
        }
        let f = Fraction { a: p, q };
        let beta = alpha - f.value::<T>();
        if beta.abs() > (HalfWidth::Dirichlet { big_q }).width::<T>(q) {
            continue;
        }
        best = match best {
            None => Some((f, beta)),
            Some((g, gb)) => {
                // distances closer than 2⁻⁴⁰ count as a tie
                let gap = beta.abs() - gb.abs();
                let better = if gap.abs() <= T::of(TIE_MARGIN) {
                    (f.q, f.a) < (g.q, g.a)
                } else {
                    gap < T::zero()
                };
                Some(if better { (f, beta) } else { (g, gb) })
            }
        };
    }
    best.ok_or_else(|| Error::domain(format!("no admissible fraction for alpha = {alpha}")))
}

/// Consecutive fractions `lo ≤ α ≤ hi` of the Farey sequence of order `Q` on `[0, 1]`.
fn farey_neighbours<T: Scalar>(alpha: T, big_q: u64) -> ((u64, u64), (u64, u64)) {
    // `p/q ≤ α` in floating point
    let le = |p: u64, q: u64| T::of_u64(p) <= alpha * T::of_u64(q);
    let (mut lo, mut hi) = ((0u64, 1u64), (1u64, 1u64));
    loop {
        if lo.1 + hi.1 > big_q {
            return (lo, hi);
        }
        if le(lo.0 + hi.0, lo.1 + hi.1) {
            // largest k with lo + k·hi ≤ α and denominator ≤ Q
            let mut k = (big_q - lo.1) / hi.1;
            let num = alpha * T::of_u64(lo.1) - T::of_u64(lo.0);
            let den = T::of_u64(hi.0) - alpha * T::of_u64(hi.1);
            if den > T::zero() {
                let est = (num / den).floor().max(T::one()).to_u64().unwrap_or(u64::MAX);
                k = k.min(est);
            }
            while k > 1 && !le(lo.0 + k * hi.0, lo.1 + k * hi.1) {
                k -= 1;
            }
            while k < (big_q - lo.1) / hi.1 && le(lo.0 + (k + 1) * hi.0, lo.1 + (k + 1) * hi.1) {
                k += 1;
            }
            lo = (lo.0 + k * hi.0, lo.1 + k * hi.1);
        } else {
            // largest k with hi + k·lo > α and denominator ≤ Q
            let mut k = (big_q - hi.1) / lo.1;
            let num = T::of_u64(hi.0) - alpha * T::of_u64(hi.1);
            let den = alpha * T::of_u64(lo.1) - T::of_u64(lo.0);
            if den > T::zero() {
                let est = (num / den).floor().max(T::one()).to_u64().unwrap_or(u64::MAX);
                k = k.min(est);
            }
            while k > 1 && le(hi.0 + k * lo.0, hi.1 + k * lo.1) {
                k -= 1;
            }
            while k < (big_q - hi.1) / lo.1 && !le(hi.0 + (k + 1) * lo.0, hi.1 + (k + 1) * lo.1) {
                k += 1;
            }
            hi = (hi.0 + k * lo.0, hi.1 + k * lo.1);
        }
    }
}

/// A tile of the mediant partition of `[1/Q, 1 + 1/Q]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FareyPiece<T> {
    pub center: Fraction,
    pub lo: T,
    pub hi: T,
}

/// Partition `[1/Q, 1 + 1/Q]` into one piece per Farey fraction, cut at mediants.
///
/// Each piece lies inside the Dirichlet arc `1/(qQ)` of its fraction.
pub fn farey_partition<T: Scalar>(big_q: u64) -> Result<Vec<FareyPiece<T>>> {
    let fracs = farey_enumerate(big_q)?;
    let tq = T::of_u64(big_q);
    let mut pieces = Vec::with_capacity(fracs.len());
    let mut left = T::one() / tq;
    for (i, &f) in fracs.iter().enumerate() {
        let right = match fracs.get(i + 1) {
            Some(g) => T::of_u64(f.a + g.a) / T::of_u64(f.q + g.q),
            None => T::one() + T::one() / tq,
        };
        pieces.push(FareyPiece { center: f, lo: left, hi: right });
        left = right;
    }
    Ok(pieces)
}

/// CSV with header `a,q,lo,hi`.
pub fn write_arcs_csv<T: Scalar, W: Write>(arcs: &[Arc<T>], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["a", "q", "lo", "hi"])?;
    for arc in arcs {
        out.write_record(&[
            arc.center.a.to_string(),
            arc.center.q.to_string(),
            arc.lo().to_string(),
            arc.hi().to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
