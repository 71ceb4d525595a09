//! Compensated (Kahan–Neumaier) accumulators.

use std::ops::AddAssign;

use num_complex::Complex;

use crate::Scalar;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Neumaier<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    #[inline]
    pub fn add(&mut self, v: T) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Scalar> AddAssign<T> for Neumaier<T> {
    fn add_assign(&mut self, rhs: T) {
        self.add(rhs);
    }
}

impl<T: Scalar> FromIterator<T> for Neumaier<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Componentwise [`Neumaier`] accumulator for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexNeumaier<T> {
    re: Neumaier<T>,
    im: Neumaier<T>,
}

impl<T: Scalar> ComplexNeumaier<T> {
    pub fn new() -> Self {
        Self { re: Neumaier::new(), im: Neumaier::new() }
    }

    #[inline]
    pub fn add(&mut self, v: Complex<T>) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn total(&self) -> Complex<T> {
        Complex::new(self.re.total(), self.im.total())
    }
}

impl<T: Scalar> AddAssign<Complex<T>> for ComplexNeumaier<T> {
    fn add_assign(&mut self, rhs: Complex<T>) {
        self.add(rhs);
    }
}

impl<T: Scalar> FromIterator<Complex<T>> for ComplexNeumaier<T> {
    fn from_iter<I: IntoIterator<Item = Complex<T>>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn sum<T: Scalar>(values: &[T]) -> T {
    values.iter().copied().collect::<Neumaier<T>>().total()
}
