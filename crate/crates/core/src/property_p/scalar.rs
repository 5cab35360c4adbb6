//! Scalars for the objective: plain `f64`, or forward-mode dual numbers
//! carrying a full gradient.

use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Arithmetic needed by the objective and constraint code.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
{
    fn cst(v: f64) -> Self;
    fn re(&self) -> f64;
    /// Applies a univariate function whose value and derivative at `re()`
    /// are `value` and `deriv`.
    fn chain(self, value: f64, deriv: f64) -> Self;

    fn ln(self) -> Self {
        let x = self.re();
        self.chain(libm::log(x), 1.0 / x)
    }
    fn exp(self) -> Self {
        let e = libm::exp(self.re());
        self.chain(e, e)
    }
    fn sin(self) -> Self {
        let x = self.re();
        self.chain(libm::sin(x), libm::cos(x))
    }
    fn sqr(self) -> Self {
        self * self
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn chain(self, value: f64, _deriv: f64) -> Self {
        value
    }
}

/// Value plus gradient with respect to `N` independent variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<const N: usize> {
    pub v: f64,
    pub d: [f64; N],
}

impl<const N: usize> Dual<N> {
    /// The `i`-th independent variable at value `v`.
    pub fn var(v: f64, i: usize) -> Self {
        let mut d = [0.0; N];
        d[i] = 1.0;
        Dual { v, d }
    }

    fn map(self, v: f64, k: f64) -> Self {
        let mut d = self.d;
        d.iter_mut().for_each(|x| *x *= k);
        Dual { v, d }
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        self.d.iter_mut().zip(o.d.iter()).for_each(|(a, b)| *a += b);
        self
    }
}

impl<const N: usize> AddAssign for Dual<N> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self.v -= o.v;
        self.d.iter_mut().zip(o.d.iter()).for_each(|(a, b)| *a -= b);
        self
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = self.d[i] * o.v + o.d[i] * self.v;
        }
        Dual { v: self.v * o.v, d }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let q = self.v / o.v;
        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = (self.d[i] - q * o.d[i]) / o.v;
        }
        Dual { v: q, d }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(-self.v, -1.0)
    }
}

impl<const N: usize> Add<f64> for Dual<N> {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.v += o;
        self
    }
}

impl<const N: usize> Sub<f64> for Dual<N> {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.v -= o;
        self
    }
}

impl<const N: usize> Mul<f64> for Dual<N> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        self.map(self.v * o, o)
    }
}

impl<const N: usize> Scalar for Dual<N> {
    fn cst(v: f64) -> Self {
        Dual { v, d: [0.0; N] }
    }
    fn re(&self) -> f64 {
        self.v
    }
    fn chain(self, value: f64, deriv: f64) -> Self {
        self.map(value, deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::<2>::var(3.0, 0);
        let y = Dual::<2>::var(2.0, 1);
        let f = x * y / (x + y) + x.ln() * 2.0;
        let h = 1e-6;
        let g = |a: f64, b: f64| a * b / (a + b) + 2.0 * a.ln();
        assert!((f.v - g(3.0, 2.0)).abs() < 1e-15);
        assert!((f.d[0] - (g(3.0 + h, 2.0) - g(3.0 - h, 2.0)) / (2.0 * h)).abs() < 1e-8);
        assert!((f.d[1] - (g(3.0, 2.0 + h) - g(3.0, 2.0 - h)) / (2.0 * h)).abs() < 1e-8);
        let s = x.sin().exp();
        assert!((s.d[0] - 3f64.cos() * 3f64.sin().exp()).abs() < 1e-14);
    }
}
