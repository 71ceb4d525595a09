//! Sieved arithmetic tables and the small multiplicative-function algebra
//! built on them: τ, μ, φ, Ramanujan sums, and the `f_x`/`g_x` pair.

mod cache;
mod main_term;
mod ramanujan;

pub use cache::{read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use main_term::{main_term_pair, mobius_invert_at, mobius_invert_check, MainTermPair};
pub use ramanujan::ramanujan_sum_via_exponentials;

use crate::error::{Error, Result};
use crate::sum::Neumaier;
use crate::Scalar;

/// Euler's constant γ to full double precision.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest table accepted by [`build_tables`].
pub const DEFAULT_CAPACITY: u64 = 100_000_000;

/// Immutable τ, μ, φ tables for `1 ≤ n ≤ x_max`.
///
/// All arrays are indexed by `n` directly; slot 0 is unused. The
/// smallest-prime-factor table is kept so that any `m ≤ x_max` can be
/// factored in `O(log m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArithTables {
    x_max: u64,
    tau: Vec<u32>,
    mu: Vec<i8>,
    phi: Vec<u32>,
    spf: Vec<u32>,
}

/// Sieve τ, μ, φ up to `x_max` under the default capacity.
pub fn build_tables(x_max: u64) -> Result<ArithTables> {
    build_tables_with_capacity(x_max, DEFAULT_CAPACITY)
}

pub fn build_tables_with_capacity(x_max: u64, cap: u64) -> Result<ArithTables> {
    if x_max == 0 {
        return Err(Error::domain("x_max must be at least 1"));
    }
    if x_max > cap || x_max > u32::MAX as u64 {
        return Err(Error::Capacity { requested: x_max, cap });
    }
    let n = x_max as usize;

    let mut tau = vec![0u32; n + 1];
    for d in 1..=n {
        for m in (d..=n).step_by(d) {
            tau[m] += 1;
        }
    }

    // linear sieve for μ, φ and the smallest prime factor
    let mut spf = vec![0u32; n + 1];
    let mut mu = vec![0i8; n + 1];
    let mut phi = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mu[1] = 1;
    phi[1] = 1;
    spf[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mu[i] = -1;
            phi[i] = i as u32 - 1;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
            if p == si {
                mu[m] = 0;
                phi[m] = phi[i] * p;
            } else {
                mu[m] = -mu[i];
                phi[m] = phi[i] * (p - 1);
            }
        }
    }

    Ok(ArithTables { x_max, tau, mu, phi, spf })
}

impl ArithTables {
    pub(crate) fn from_parts(
        x_max: u64,
        tau: Vec<u32>,
        mu: Vec<i8>,
        phi: Vec<u32>,
        spf: Vec<u32>,
    ) -> Self {
        Self { x_max, tau, mu, phi, spf }
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    #[inline]
    pub fn tau(&self, n: u64) -> u32 {
        self.tau[n as usize]
    }

    #[inline]
    pub fn mu(&self, n: u64) -> i8 {
        self.mu[n as usize]
    }

    #[inline]
    pub fn phi(&self, n: u64) -> u32 {
        self.phi[n as usize]
    }

    /// τ(1), …, τ(x_max) (no slot for 0).
    pub fn tau_values(&self) -> &[u32] {
        &self.tau[1..]
    }

    pub fn mu_values(&self) -> &[i8] {
        &self.mu[1..]
    }

    pub fn phi_values(&self) -> &[u32] {
        &self.phi[1..]
    }

    pub(crate) fn spf_values(&self) -> &[u32] {
        &self.spf[1..]
    }

    /// Fails unless the tables reach `x`.
    pub fn require(&self, x: u64) -> Result<()> {
        if x > self.x_max {
            Err(Error::TablesTooSmall { needed: x, have: self.x_max })
        } else {
            Ok(())
        }
    }

    /// Σ_{n≤x} τ(n).
    pub fn divisor_summatory(&self, x: u64) -> Result<u64> {
        self.require(x)?;
        Ok(self.tau[1..=x as usize].iter().map(|&t| t as u64).sum())
    }

    /// Prime factorisation `[(p, e)]` in increasing order of `p`.
    ///
    /// Uses the smallest-prime-factor table when `m ≤ x_max`, trial
    /// division otherwise.
    pub fn factorize(&self, m: u64) -> Vec<(u64, u32)> {
        assert!(m >= 1, "factorize(0)");
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut push = |p: u64| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        let mut m = m;
        while m > 1 && m > self.x_max {
            // trial division until the cofactor drops into the table
            let mut found = false;
            let mut p = 2u64;
            while p * p <= m {
                if m.is_multiple_of(p) {
                    push(p);
                    m /= p;
                    found = true;
                    break;
                }
                p += if p == 2 { 1 } else { 2 };
            }
            if !found {
                push(m);
                m = 1;
            }
        }
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            push(p);
            m /= p;
        }
        out
    }

    /// All positive divisors of `m`, ascending.
    pub fn divisors(&self, m: u64) -> Vec<u64> {
        let mut divs = vec![1u64];
        for (p, e) in self.factorize(m) {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// μ(m) for any `m ≥ 1`.
    pub fn mobius(&self, m: u64) -> i64 {
        if m <= self.x_max {
            return self.mu[m as usize] as i64;
        }
        let f = self.factorize(m);
        if f.iter().any(|&(_, e)| e > 1) {
            0
        } else if f.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// φ(m) for any `m ≥ 1`.
    pub fn totient(&self, m: u64) -> u64 {
        if m <= self.x_max {
            return self.phi[m as usize] as u64;
        }
        self.factorize(m)
            .into_iter()
            .fold(1u64, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
    }

    /// Exact Ramanujan sum `c_q(n) = Σ_{d | (n,q)} d μ(q/d)`.
    pub fn ramanujan_sum(&self, q: u64, n: i64) -> i64 {
        assert!(q >= 1, "ramanujan_sum requires q >= 1");
        let g = num_integer::gcd(n.unsigned_abs(), q);
        self.divisors(g)
            .into_iter()
            .map(|d| d as i64 * self.mobius(q / d))
            .sum()
    }

    /// Closed form `c_q(n) = μ(q/g) φ(q) / φ(q/g)` with `g = (n, q)`.
    pub fn ramanujan_sum_closed_form(&self, q: u64, n: i64) -> i64 {
        assert!(q >= 1, "ramanujan_sum requires q >= 1");
        let g = num_integer::gcd(n.unsigned_abs(), q);
        let m = q / g;
        self.mobius(m) * (self.totient(q) / self.totient(m)) as i64
    }

    /// Corrupt the entries at `n` so that the table invariants fail.
    #[doc(hidden)]
    pub fn inject_fault(&mut self, n: u64) {
        let i = n as usize;
        self.tau[i] += 1;
        self.mu[i] = if self.mu[i] == 1 { -1 } else { 1 };
        self.phi[i] += 1;
    }
}

/// `Σ_{n≤x} φ(n)/n`.
pub fn phi_mean<T: Scalar>(tables: &ArithTables, x: u64) -> Result<T> {
    if x == 0 {
        return Err(Error::domain("phi_mean requires x >= 1"));
    }
    tables.require(x)?;
    let mut acc = Neumaier::new();
    for n in 1..=x {
        acc += T::of_u64(tables.phi(n) as u64) / T::of_u64(n);
    }
    Ok(acc.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tau(n: u64) -> u32 {
        (1..=n).filter(|d| n.is_multiple_of(*d)).count() as u32
    }

    #[test]
    fn tau_small_table() {
        let t = build_tables(12).unwrap();
        assert_eq!(t.tau_values(), &[1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]);
        for n in 1..=12 {
            assert_eq!(t.tau(n), brute_tau(n));
        }
    }

    #[test]
    fn single_entry_table() {
        let t = build_tables(1).unwrap();
        assert_eq!(t.tau_values(), &[1]);
        assert_eq!(t.mu_values(), &[1]);
        assert_eq!(t.phi_values(), &[1]);
    }

    #[test]
    fn divisor_summatory_matches_pair_count() {
        let t = build_tables(10).unwrap();
        let pairs = (1..=10u64).flat_map(|u| (1..=10u64).map(move |v| u * v)).filter(|&p| p <= 10).count();
        assert_eq!(t.divisor_summatory(10).unwrap(), pairs as u64);
        assert_eq!(pairs, 27);
    }

    #[test]
    fn primes_have_expected_values() {
        let t = build_tables(1000).unwrap();
        for p in (2..=1000u64).filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)) {
            assert_eq!(t.tau(p), 2);
            assert_eq!(t.mu(p), -1);
            assert_eq!(t.phi(p) as u64, p - 1);
        }
    }

    #[test]
    fn mobius_and_totient_divisor_sums() {
        let t = build_tables(3000).unwrap();
        for n in 1..=3000u64 {
            let divs = t.divisors(n);
            let mu_sum: i64 = divs.iter().map(|&d| t.mu(d) as i64).sum();
            let phi_sum: u64 = divs.iter().map(|&d| t.phi(d) as u64).sum();
            assert_eq!(mu_sum, (n == 1) as i64, "n={n}");
            assert_eq!(phi_sum, n, "n={n}");
        }
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            build_tables_with_capacity(1001, 1000),
            Err(Error::Capacity { requested: 1001, cap: 1000 })
        ));
        assert!(build_tables(0).is_err());
    }

    #[test]
    fn factorization_beyond_table() {
        let t = build_tables(100).unwrap();
        assert_eq!(t.factorize(2 * 2 * 3 * 101 * 101), vec![(2, 2), (3, 1), (101, 2)]);
        assert_eq!(t.factorize(1), vec![]);
        assert_eq!(t.divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(t.mobius(2 * 3 * 101), -1);
        assert_eq!(t.mobius(4 * 101), 0);
        assert_eq!(t.totient(101 * 103), 100 * 102);
    }

    #[test]
    fn ramanujan_examples() {
        let t = build_tables(100).unwrap();
        for n in -5..20 {
            assert_eq!(t.ramanujan_sum(1, n), 1);
        }
        assert_eq!(t.ramanujan_sum(4, 8), 2);
        assert_eq!(t.ramanujan_sum(6, 4), -1);
        assert_eq!(t.ramanujan_sum(5, 1), -1);
        assert_eq!(t.ramanujan_sum(3, 0), 2);
        for q in 1..=60 {
            for n in -30..=60 {
                assert_eq!(t.ramanujan_sum(q, n), t.ramanujan_sum_closed_form(q, n), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn phi_mean_small() {
        let t = build_tables(10).unwrap();
        assert_eq!(phi_mean::<f64>(&t, 1).unwrap(), 1.0);
        assert!((phi_mean::<f64>(&t, 4).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert!(matches!(phi_mean::<f64>(&t, 11), Err(Error::TablesTooSmall { .. })));
    }

    #[test]
    fn euler_gamma_matches_harmonic_oracle() {
        let n = 1_000_000u64;
        let h: f64 = (1..=n).rev().map(|k| 1.0 / k as f64).sum();
        let oracle = h - (n as f64).ln() - 1.0 / (2.0 * n as f64);
        assert!((oracle - EULER_GAMMA).abs() < 1e-10);
    }

    #[test]
    fn fault_injection_breaks_invariants() {
        let mut t = build_tables(50).unwrap();
        t.inject_fault(12);
        let phi_sum: u64 = t.divisors(12).iter().map(|&d| t.phi(d) as u64).sum();
        assert_ne!(phi_sum, 12);
    }
}
