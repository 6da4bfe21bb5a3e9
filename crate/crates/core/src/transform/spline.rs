//! Natural cubic spline through complex samples; zero outside the grid.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub(crate) struct CubicSpline<T: Real> {
    xs: Vec<T>,
    ys: Vec<Complex<T>>,
    // second derivatives at the knots
    m: Vec<Complex<T>>,
}

impl<T: Real> CubicSpline<T> {
    pub(crate) fn new(xs: Vec<T>, ys: Vec<Complex<T>>) -> Result<Self> {
        let n = xs.len();
        if n != ys.len() || n < 2 {
            return Err(Error::InvalidInput(format!(
                "spline needs at least two matching samples, got {} nodes and {} values",
                n,
                ys.len()
            )));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut m = vec![zero; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives
            let two = T::lit(2.0);
            let six = T::lit(6.0);
            let mut diag = vec![T::zero(); n];
            let mut rhs = vec![zero; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i] = two * (h0 + h1);
                rhs[i] = ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0) * six;
            }
            for i in 2..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let w = h0 / diag[i - 1];
                diag[i] = diag[i] - w * h0;
                rhs[i] = rhs[i] - rhs[i - 1] * w;
            }
            for i in (1..n - 1).rev() {
                let h1 = xs[i + 1] - xs[i];
                let next = if i + 1 < n - 1 { m[i + 1] * h1 } else { zero };
                m[i] = (rhs[i] - next) / diag[i];
            }
        }
        Ok(Self { xs, ys, m })
    }

    fn locate(&self, x: T) -> Option<usize> {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return None;
        }
        let i = self.xs.partition_point(|&v| v <= x);
        Some(i.clamp(1, n - 1) - 1)
    }

    /// Value and first two derivatives at `x`.
    pub(crate) fn eval3(&self, x: T) -> [Complex<T>; 3] {
        let zero = Complex::new(T::zero(), T::zero());
        let Some(i) = self.locate(x) else {
            return [zero; 3];
        };
        let six = T::lit(6.0);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let v = y0 * a + y1 * b + (m0 * (a * a * a - a) + m1 * (b * b * b - b)) * (h * h / six);
        let d = (y1 - y0) / h + (m1 * (T::lit(3.0) * b * b - T::one()) - m0 * (T::lit(3.0) * a * a - T::one())) * (h / six);
        let d2 = m0 * a + m1 * b;
        [v, d, d2]
    }

    pub(crate) fn nodes(&self) -> &[T] {
        &self.xs
    }
}
