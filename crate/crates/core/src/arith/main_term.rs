use crate::error::{Error, Result};
use crate::sum::Neumaier;
use crate::{ArithTables, Scalar};

/// The pair `g_x(r) = (φ(r)/r)(log(x/r²) + 2γ − 1)` and `f_x = g_x ∗ 1`.
///
/// `x·f_x(d)/d` is the main term of `Σ_{n≤x, d|n} τ(n)`; Möbius inversion
/// recovers `g_x` from `f_x`.
#[derive(Clone, Copy, Debug)]
pub struct MainTermPair<'a, T> {
    x: T,
    log_x: T,
    gamma: T,
    tables: &'a ArithTables,
}

pub fn main_term_pair<T: Scalar>(tables: &ArithTables, x: T) -> Result<MainTermPair<'_, T>> {
    if !(x > T::one()) {
        return Err(Error::domain(format!("main_term_pair requires x > 1, got {x}")));
    }
    Ok(MainTermPair { x, log_x: x.ln(), gamma: T::euler_gamma(), tables })
}

impl<'a, T: Scalar> MainTermPair<'a, T> {
    pub fn x(&self) -> T {
        self.x
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// `log(x/r²) + 2γ − 1`.
    #[inline]
    pub fn log_factor(&self, r: u64) -> T {
        let two = T::of(2.0);
        self.log_x - two * T::of_u64(r).ln() + two * self.gamma - T::one()
    }

    pub fn g(&self, r: u64) -> T {
        assert!(r >= 1);
        T::of_u64(self.tables.totient(r)) / T::of_u64(r) * self.log_factor(r)
    }

    pub fn f(&self, d: u64) -> T {
        self.tables
            .divisors(d)
            .into_iter()
            .map(|r| self.g(r))
            .collect::<Neumaier<T>>()
            .total()
    }
}

/// `(f_x ∗ μ)(q) − g_x(q)`; zero in exact arithmetic.
pub fn mobius_invert_at<T: Scalar>(pair: &MainTermPair<'_, T>, q: u64) -> T {
    let tables = pair.tables;
    let mut acc = Neumaier::new();
    for d in tables.divisors(q) {
        let m = tables.mobius(q / d);
        if m != 0 {
            acc += T::of_i64(m) * pair.f(d);
        }
    }
    acc.total() - pair.g(q)
}

/// `max_{q ≤ q_max} |Σ_{d|q} μ(q/d) f_x(d) − g_x(q)|`.
pub fn mobius_invert_check<T: Scalar>(tables: &ArithTables, q_max: u64, x: T) -> Result<T> {
    if q_max == 0 {
        return Err(Error::domain("q_max must be at least 1"));
    }
    let pair = main_term_pair(tables, x)?;
    Ok((1..=q_max)
        .map(|q| mobius_invert_at(&pair, q).abs())
        .fold(T::zero(), T::max))
}
