//! The Cherednik operator `T`, its square, the Laplacian `½(T² - ρ²)` and
//! related checks, applied to functions given by callbacks.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::JacobiParams;
use crate::scalar::{real, Real};
use crate::specfun::{log_deriv_a, log_deriv_a_prime, x_log_deriv_a};

/// Symmetry of a function under `x ↦ -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parity {
    Even,
    Odd,
    #[default]
    None,
}

/// A function that can be evaluated pointwise, optionally with exact
/// derivatives.
pub trait EvaluableFunction<T: Real> {
    fn value(&self, x: T) -> Result<Complex<T>>;

    fn derivative(&self, _x: T) -> Option<Result<Complex<T>>> {
        None
    }

    fn second_derivative(&self, _x: T) -> Option<Result<Complex<T>>> {
        None
    }

    fn parity(&self) -> Parity {
        Parity::None
    }
}

type Callback<T> = Arc<dyn Fn(T) -> Result<Complex<T>> + Send + Sync>;

/// Callback-backed [`EvaluableFunction`].
#[derive(Clone)]
pub struct Func<T: Real> {
    f: Callback<T>,
    df: Option<Callback<T>>,
    d2f: Option<Callback<T>>,
    parity: Parity,
}

impl<T: Real> std::fmt::Debug for Func<T> {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("Func")
            .field("derivative", &self.df.is_some())
            .field("second_derivative", &self.d2f.is_some())
            .field("parity", &self.parity)
            .finish()
    }
}

impl<T: Real> Func<T> {
    /// Fallible complex-valued callback.
    pub fn try_new(f: impl Fn(T) -> Result<Complex<T>> + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            df: None,
            d2f: None,
            parity: Parity::None,
        }
    }

    /// Real-valued callback.
    pub fn real(f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self::try_new(move |x| Ok(real(f(x))))
    }

    pub fn with_derivative(mut self, df: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.df = Some(Arc::new(move |x| Ok(real(df(x)))));
        self
    }

    pub fn with_second_derivative(mut self, d2f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.d2f = Some(Arc::new(move |x| Ok(real(d2f(x)))));
        self
    }

    pub fn with_complex_derivatives(
        mut self,
        df: impl Fn(T) -> Result<Complex<T>> + Send + Sync + 'static,
        d2f: impl Fn(T) -> Result<Complex<T>> + Send + Sync + 'static,
    ) -> Self {
        self.df = Some(Arc::new(df));
        self.d2f = Some(Arc::new(d2f));
        self
    }

    pub fn with_parity(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }
}

impl<T: Real> EvaluableFunction<T> for Func<T> {
    fn value(&self, x: T) -> Result<Complex<T>> {
        (self.f)(x)
    }
    fn derivative(&self, x: T) -> Option<Result<Complex<T>>> {
        self.df.as_ref().map(|d| d(x))
    }
    fn second_derivative(&self, x: T) -> Option<Result<Complex<T>>> {
        self.d2f.as_ref().map(|d| d(x))
    }
    fn parity(&self) -> Parity {
        self.parity
    }
}

impl<T: Real, F: EvaluableFunction<T> + ?Sized> EvaluableFunction<T> for &F {
    fn value(&self, x: T) -> Result<Complex<T>> {
        (**self).value(x)
    }
    fn derivative(&self, x: T) -> Option<Result<Complex<T>>> {
        (**self).derivative(x)
    }
    fn second_derivative(&self, x: T) -> Option<Result<Complex<T>>> {
        (**self).second_derivative(x)
    }
    fn parity(&self) -> Parity {
        (**self).parity()
    }
}

/// Default half-width below which the singular terms are evaluated by
/// their expansion at the origin.
pub const X_SWITCH: f64 = 1e-3;

/// Operator application settings for one parameter pair.
#[derive(Debug, Clone, Copy)]
pub struct Operator<T: Real> {
    params: JacobiParams<T>,
    finite_differences: bool,
    x_switch: T,
}

fn fd_step<T: Real>(x: T, power: f64) -> T {
    T::epsilon().powf(T::lit(power)) * (T::one() + x.abs())
}

impl<T: Real> Operator<T> {
    pub fn new(params: JacobiParams<T>) -> Self {
        Self {
            params,
            finite_differences: true,
            x_switch: T::lit(X_SWITCH),
        }
    }

    /// Disables the finite-difference fallback; functions without derivative
    /// callbacks then fail with [`Error::DerivativeUnavailable`].
    pub fn without_finite_differences(mut self) -> Self {
        self.finite_differences = false;
        self
    }

    pub fn with_x_switch(mut self, x_switch: T) -> Self {
        self.x_switch = x_switch;
        self
    }

    pub fn params(&self) -> &JacobiParams<T> {
        &self.params
    }

    fn reflect<F: EvaluableFunction<T>>(&self, f: &F, x: T, fx: Complex<T>) -> Result<Complex<T>> {
        match f.parity() {
            Parity::Even => Ok(fx),
            Parity::Odd => Ok(-fx),
            Parity::None => f.value(-x),
        }
    }

    /// `f'(x)`, from the callback or by central differences with one
    /// Richardson level.
    pub fn d1<F: EvaluableFunction<T>>(&self, f: &F, x: T) -> Result<Complex<T>> {
        if let Some(d) = f.derivative(x) {
            return d;
        }
        if !self.finite_differences {
            return Err(Error::DerivativeUnavailable);
        }
        let h = fd_step(x, 0.2);
        let two = T::lit(2.0);
        let half = h / two;
        let d_h = (f.value(x + h)? - f.value(x - h)?) / (two * h);
        let d_half = (f.value(x + half)? - f.value(x - half)?) / (two * half);
        Ok((d_half * T::lit(4.0) - d_h) / T::lit(3.0))
    }

    /// `f''(x)`, from the callback or by central differences with one
    /// Richardson level.
    pub fn d2<F: EvaluableFunction<T>>(&self, f: &F, x: T) -> Result<Complex<T>> {
        if let Some(d) = f.second_derivative(x) {
            return d;
        }
        if !self.finite_differences {
            return Err(Error::DerivativeUnavailable);
        }
        let h = fd_step(x, 1.0 / 6.0);
        let two = T::lit(2.0);
        let half = h / two;
        let fx = f.value(x)? * two;
        let d_h = (f.value(x + h)? - fx + f.value(x - h)?) / (h * h);
        let d_half = (f.value(x + half)? - fx + f.value(x - half)?) / (half * half);
        Ok((d_half * T::lit(4.0) - d_h) / T::lit(3.0))
    }

    /// `f'''(0)` by central differences; only enters the expansion at the
    /// origin multiplied by `|x| < x_switch`.
    fn d3_at_zero<F: EvaluableFunction<T>>(&self, f: &F) -> Result<Complex<T>> {
        if !self.finite_differences {
            // third derivative from the derivative callbacks when available
            let h = fd_step(T::zero(), 1.0 / 3.0);
            let (Some(a), Some(b)) = (f.second_derivative(h), f.second_derivative(-h)) else {
                return Err(Error::DerivativeUnavailable);
            };
            return Ok((a? - b?) / (h + h));
        }
        let h = fd_step(T::zero(), 0.2) * T::lit(4.0);
        let two = T::lit(2.0);
        let v = f.value(two * h)? - f.value(h)? * two + f.value(-h)? * two - f.value(-two * h)?;
        Ok(v / (two * h * h * h))
    }

    /// `f''''(0)` by differences; only enters multiplied by `x² < x_switch²`.
    fn d4_at_zero<F: EvaluableFunction<T>>(&self, f: &F) -> Result<Complex<T>> {
        let h = T::lit(1e-2);
        let two = T::lit(2.0);
        if !self.finite_differences {
            let (Some(a), Some(b), Some(c)) = (
                f.second_derivative(h),
                f.second_derivative(T::zero()),
                f.second_derivative(-h),
            ) else {
                return Err(Error::DerivativeUnavailable);
            };
            return Ok((a? - b? * two + c?) / (h * h));
        }
        let v = f.value(two * h)? + f.value(-two * h)? - (f.value(h)? + f.value(-h)?) * T::lit(4.0)
            + f.value(T::zero())? * T::lit(6.0);
        Ok(v / (h * h * h * h))
    }

    /// `Mf(x)/x = (f(x) - f(-x))/(2x)`, by Simpson's rule on `f'` near the origin.
    fn mf_over_x<F: EvaluableFunction<T>>(&self, f: &F, x: T, fx: Complex<T>, fmx: Complex<T>) -> Result<Complex<T>> {
        if f.parity() == Parity::Even {
            return Ok(real(T::zero()));
        }
        if x.abs() >= self.x_switch {
            return Ok((fx - fmx) / (x + x));
        }
        let d0 = self.d1(f, T::zero())?;
        if x == T::zero() {
            return Ok(d0);
        }
        let sum = self.d1(f, x)? + self.d1(f, -x)? + d0 * T::lit(4.0);
        Ok(sum / T::lit(6.0))
    }

    /// `T f(x) = f'(x) + (A'/A)(x)(f(x) - f(-x))/2 - ρ f(-x)`.
    pub fn apply_t<F: EvaluableFunction<T>>(&self, f: &F, x: T) -> Result<Complex<T>> {
        let p = &self.params;
        let fx = f.value(x)?;
        let fmx = self.reflect(f, x, fx)?;
        let df = self.d1(f, x)?;
        let m = self.mf_over_x(f, x, fx, fmx)?;
        Ok(df + m * x_log_deriv_a(p, x) - fmx * p.rho())
    }

    /// `T² f(x) = f'' + (A'/A)' Mf + (A'/A) f' + ρ² f`.
    pub fn apply_t2<F: EvaluableFunction<T>>(&self, f: &F, x: T) -> Result<Complex<T>> {
        let p = &self.params;
        let one = T::one();
        let two = T::lit(2.0);
        let rho = p.rho();
        let fx = f.value(x)?;
        let d2 = self.d2(f, x)?;
        if x.abs() < self.x_switch {
            // (A'/A)' Mf + (A'/A) f' = (2α+1) f''(0)
            //   + x [ (4α/3 + 4β + 8/3) f'(0) + (2α+1) f'''(0)/3 ]
            //   + x² [ (2α/3 + 2β + 4/3) f''(0) + (2α+1) f''''(0)/6 ] + O(x³)
            let a2 = two * p.alpha() + one;
            let d2_0 = if x == T::zero() { d2 } else { self.d2(f, T::zero())? };
            let mut singular = d2_0 * a2;
            if x != T::zero() {
                if f.parity() != Parity::Even {
                    let d1_0 = self.d1(f, T::zero())?;
                    let d3_0 = self.d3_at_zero(f)?;
                    let k1 = T::lit(4.0 / 3.0) * p.alpha() + T::lit(4.0) * p.beta() + T::lit(8.0 / 3.0);
                    singular = singular + (d1_0 * k1 + d3_0 * a2 / T::lit(3.0)) * x;
                }
                if f.parity() != Parity::Odd {
                    let d4_0 = self.d4_at_zero(f)?;
                    let k2 = T::lit(2.0 / 3.0) * p.alpha() + two * p.beta() + T::lit(4.0 / 3.0);
                    singular = singular + (d2_0 * k2 + d4_0 * a2 / T::lit(6.0)) * (x * x);
                }
            }
            return Ok(d2 + singular + fx * (rho * rho));
        }
        let fmx = self.reflect(f, x, fx)?;
        let df = self.d1(f, x)?;
        let mf = (fx - fmx) / two;
        let l = log_deriv_a(p, x)?;
        let lp = log_deriv_a_prime(p, x);
        Ok(d2 + mf * lp + df * l + fx * (rho * rho))
    }

    /// `½(T² - ρ²) f(x)`.
    pub fn laplacian<F: EvaluableFunction<T>>(&self, f: &F, x: T) -> Result<Complex<T>> {
        let rho = self.params.rho();
        let t2 = self.apply_t2(f, x)?;
        let fx = f.value(x)?;
        Ok((t2 - fx * (rho * rho)) * T::lit(0.5))
    }

    /// True iff `f''(x0) > 0`, or `f''(x0) ≤ 0` and `f''(x0) + ρ² f(x0) ≤ 0`.
    /// Uses real parts.
    pub fn check_condition_c2rho<F: EvaluableFunction<T>>(&self, f: &F, x0: T) -> Result<bool> {
        let d2 = self.d2(f, x0)?.re;
        if d2 > T::zero() {
            return Ok(true);
        }
        let rho = self.params.rho();
        Ok(d2 + rho * rho * f.value(x0)?.re <= T::zero())
    }

    /// Radial generator of `|X_t|` on even functions, `f'' + (A'/A) f' + ρ² f`
    /// at `x > 0`.
    pub fn radial_generator<F: EvaluableFunction<T>>(&self, f: &F, x: T) -> Result<Complex<T>> {
        let p = &self.params;
        if x <= T::zero() {
            return Err(Error::InvalidInput(format!("radial generator needs x > 0, got {x}")));
        }
        let rho = p.rho();
        let d2 = self.d2(f, x)?;
        let d1 = self.d1(f, x)?;
        Ok(d2 + d1 * log_deriv_a(p, x)? + f.value(x)? * (rho * rho))
    }
}

/// `T f(x)` with default settings.
pub fn apply_t<T: Real, F: EvaluableFunction<T>>(p: &JacobiParams<T>, f: &F, x: T) -> Result<Complex<T>> {
    Operator::new(*p).apply_t(f, x)
}

/// `T² f(x)` with default settings.
pub fn apply_t2<T: Real, F: EvaluableFunction<T>>(p: &JacobiParams<T>, f: &F, x: T) -> Result<Complex<T>> {
    Operator::new(*p).apply_t2(f, x)
}

/// `½(T² - ρ²) f(x)` with default settings.
pub fn laplacian<T: Real, F: EvaluableFunction<T>>(p: &JacobiParams<T>, f: &F, x: T) -> Result<Complex<T>> {
    Operator::new(*p).laplacian(f, x)
}

/// See [`Operator::check_condition_c2rho`].
pub fn check_condition_c2rho<T: Real, F: EvaluableFunction<T>>(p: &JacobiParams<T>, f: &F, x0: T) -> Result<bool> {
    Operator::new(*p).check_condition_c2rho(f, x0)
}

/// `(apply_t2(f)(x), f'' + (A'/A) f' + ρ² f)` for an even `f` and `x > 0`;
/// the two agree because `Mf` vanishes on even functions.
pub fn radial_generator_check<T: Real, F: EvaluableFunction<T>>(
    p: &JacobiParams<T>,
    f_even: &F,
    x: T,
) -> Result<(T, T)> {
    let op = Operator::new(*p);
    Ok((op.apply_t2(f_even, x)?.re, op.radial_generator(f_even, x)?.re))
}

/// The eigenfunction `G_λ` as an evaluable function (values only).
pub fn eigenfunction<T: Real>(p: JacobiParams<T>, lambda: T) -> Func<T> {
    Func::try_new(move |x| crate::specfun::eigenfunction_g(&p, lambda, x))
}

#[cfg(test)]
mod tests;
