use num_complex::Complex;

use crate::sum::ComplexNeumaier;
use crate::Scalar;

/// `c_q(n) = Σ_{1≤a≤q, (a,q)=1} e(an/q)` evaluated as a floating sum.
///
/// Only a cross-check for [`super::ArithTables::ramanujan_sum`]: the
/// product `an` is reduced mod `q` in integers so each phase is exact.
pub fn ramanujan_sum_via_exponentials<T: Scalar>(q: u64, n: i64) -> Complex<T> {
    assert!(q >= 1, "ramanujan_sum requires q >= 1");
    let qi = q as i128;
    let r = (n as i128).rem_euclid(qi);
    let tq = T::of_u64(q);
    let mut acc = ComplexNeumaier::new();
    for a in 1..=q {
        if num_integer::gcd(a, q) != 1 {
            continue;
        }
        let k = (a as i128 * r) % qi;
        let theta = T::TAU() * T::of_i128(k) / tq;
        acc += Complex::new(theta.cos(), theta.sin());
    }
    acc.total()
}
