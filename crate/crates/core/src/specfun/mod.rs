//! Special functions: complex Gamma, the Jacobi function `φ_λ`, the
//! eigenfunction `G_λ` of the Cherednik operator, the weight `A` and the
//! spectral density.

mod gamma;
mod hypergeometric;

pub use gamma::{gamma_complex, ln_gamma_complex};
pub use hypergeometric::{hyp2f1, SeriesOptions};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::JacobiParams;
use crate::scalar::{cplx, real, Real};

/// `(sinh|x|)^{2α+1} (cosh x)^{2β+1}`.
pub fn weight_a<T: Real>(p: &JacobiParams<T>, x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("weight at non-finite x = {x}")));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let ax = x.abs();
    if ax == T::zero() {
        return Ok(T::zero());
    }
    let ln = (two * p.alpha() + one) * ax.sinh().ln() + (two * p.beta() + one) * ln_cosh(ax);
    let v = ln.exp();
    if !v.is_finite() {
        return Err(Error::Overflow { x: x.as_f64() });
    }
    Ok(v)
}

/// `A'(x)/A(x) = (2α+1) coth x + (2β+1) tanh x`.
pub fn log_deriv_a<T: Real>(p: &JacobiParams<T>, x: T) -> Result<T> {
    if x == T::zero() {
        return Err(Error::SingularAtZero);
    }
    let one = T::one();
    let two = T::lit(2.0);
    Ok((two * p.alpha() + one) / x.tanh() + (two * p.beta() + one) * x.tanh())
}

/// `x · A'(x)/A(x)`, smooth and even, equal to `2α+1` at the origin.
pub(crate) fn x_log_deriv_a<T: Real>(p: &JacobiParams<T>, x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    (two * p.alpha() + one) * x_coth_x(x) + (two * p.beta() + one) * x * x.tanh()
}

/// `(A'/A)'(x) = -(2α+1)/sinh² x + (2β+1)/cosh² x`.
pub(crate) fn log_deriv_a_prime<T: Real>(p: &JacobiParams<T>, x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let sh = x.sinh();
    let ch = x.cosh();
    -(two * p.alpha() + one) / (sh * sh) + (two * p.beta() + one) / (ch * ch)
}

fn x_coth_x<T: Real>(x: T) -> T {
    let x2 = x * x;
    if x.abs() < T::lit(1e-4) {
        T::one() + x2 / T::lit(3.0)
    } else {
        x / x.tanh()
    }
}

/// `ln cosh x` without overflow for large `|x|`.
pub(crate) fn ln_cosh<T: Real>(x: T) -> T {
    let ax = x.abs();
    // cosh x = e^{|x|} (1 + e^{-2|x|}) / 2
    ax + (-(ax + ax)).exp().ln_1p() - T::LN_2()
}

fn oscillation_scale<T: Real>(lambda: T) -> T {
    lambda.abs().max(T::one())
}

/// Complex-valued Jacobi function `φ^{α,β}_λ(x)`; for real `λ` the exact
/// value is real.
pub(crate) fn phi_complex<T: Real>(p: &JacobiParams<T>, lambda: T, x: T) -> Result<Complex<T>> {
    if !(lambda.is_finite() && x.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "phi at non-finite argument lambda = {lambda}, x = {x}"
        )));
    }
    let half = T::lit(0.5);
    let one = T::one();
    let rho = p.rho();
    let a = cplx(rho, lambda) * half;
    let b = cplx(p.alpha() - p.beta() + one, lambda) * half;
    let c = real(p.alpha() + one);
    let th = x.tanh();
    let w = th * th;
    let sech = one / x.cosh();
    let s = sech * sech;
    if s <= T::zero() {
        return Err(Error::Overflow { x: x.as_f64() });
    }
    let f = hyp2f1(a, b, c, w, s, oscillation_scale(lambda), &SeriesOptions::default())?;
    // (1 - z)^{-a} with 1 - z = cosh² x
    let pref = (-(a + a) * ln_cosh(x)).exp();
    Ok(pref * f)
}

/// Size of `φ` used to judge imaginary rounding residue.
fn phi_scale<T: Real>(p: &JacobiParams<T>, x: T) -> T {
    (-(p.rho() * ln_cosh(x))).exp()
}

/// `φ^{α,β}_λ(x) = ₂F₁((ρ+iλ)/2, (ρ-iλ)/2; α+1; -sinh² x)` for real `λ`, `x`.
pub fn phi<T: Real>(p: &JacobiParams<T>, lambda: T, x: T) -> Result<T> {
    let v = phi_complex(p, lambda, x)?;
    let rel = T::lit(1e-10).max(T::epsilon() * T::lit(1e4));
    let bound = rel * (phi_scale(p, x) + v.re.abs());
    if v.im.abs() > bound {
        return Err(Error::ImaginaryResidue {
            at: x.as_f64(),
            residue: v.im.as_f64(),
            bound: bound.as_f64(),
        });
    }
    Ok(v.re)
}

/// The eigenfunction `G_λ(x) = φ^{α,β}_λ(x) + (ρ+iλ)/(4(α+1)) sinh(2x) φ^{α+1,β+1}_λ(x)`
/// of the Cherednik operator with eigenvalue `iλ`, normalized by `G_λ(0) = 1`.
///
/// For real `λ ≠ 0` the value is genuinely complex; `G_{-λ}(x)` is its
/// conjugate.
pub fn eigenfunction_g<T: Real>(p: &JacobiParams<T>, lambda: T, x: T) -> Result<Complex<T>> {
    let even = phi(p, lambda, x)?;
    if x == T::zero() {
        return Ok(real(even));
    }
    let shifted = p.shifted();
    let odd = phi(&shifted, lambda, x)?;
    let coef = cplx(p.rho(), lambda) / (T::lit(4.0) * (p.alpha() + T::one()));
    let v = real(even) + coef * ((x + x).sinh() * odd);
    if !crate::scalar::is_finite_c(v) {
        return Err(Error::Overflow { x: x.as_f64() });
    }
    Ok(v)
}

/// `ln |C_{α,β}(λ)|` for real `λ ≠ 0`, with
/// `C(λ) = 2^{ρ-iλ} Γ(α+1) Γ(iλ) / (Γ((ρ+iλ)/2) Γ((α-β+1+iλ)/2))`.
fn ln_abs_c<T: Real>(p: &JacobiParams<T>, lambda: T) -> Result<T> {
    let half = T::lit(0.5);
    let one = T::one();
    let rho = p.rho();
    let num = rho * T::LN_2()
        + ln_gamma_complex(real(p.alpha() + one))?.re
        + ln_gamma_complex(cplx(T::zero(), lambda))?.re;
    let den = ln_gamma_complex(cplx(rho, lambda) * half)?.re
        + ln_gamma_complex(cplx(p.alpha() - p.beta() + one, lambda) * half)?.re;
    Ok(num - den)
}

/// The Harish-Chandra type coefficient `C_{α,β}(λ)`; fails at `λ = 0` (pole).
pub fn c_function<T: Real>(p: &JacobiParams<T>, lambda: T) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    let one = T::one();
    let rho = p.rho();
    let ln = cplx(rho, -lambda) * T::LN_2()
        + ln_gamma_complex(real(p.alpha() + one))?
        + ln_gamma_complex(cplx(T::zero(), lambda))?
        - ln_gamma_complex(cplx(rho, lambda) * half)?
        - ln_gamma_complex(cplx(p.alpha() - p.beta() + one, lambda) * half)?;
    Ok(ln.exp())
}

/// Density of the spectral measure `dσ` with respect to `dλ` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelDensityValue<T: Real> {
    pub lambda: T,
    pub value: Complex<T>,
}

/// Spectral density `4^ρ (1 + iρ/λ) / (8π |C(λ)|²)` for the weight `A`.
///
/// The factor `4^ρ` converts the classical normalization (weight
/// `(2 sinh|x|)^{2α+1} (2 cosh x)^{2β+1}`) to the weight `A`; without it the
/// inversion formula is off by exactly that factor. Equals 0 at `λ = 0`.
pub fn plancherel_density<T: Real>(
    p: &JacobiParams<T>,
    lambda: T,
) -> Result<PlancherelDensityValue<T>> {
    if !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("density at lambda = {lambda}")));
    }
    if lambda == T::zero() {
        return Ok(PlancherelDensityValue {
            lambda,
            value: real(T::zero()),
        });
    }
    let rho = p.rho();
    let two = T::lit(2.0);
    let eight_pi = T::lit(8.0) * T::PI();
    let ln_mag = two * rho * T::LN_2() - two * ln_abs_c(p, lambda)? - eight_pi.ln();
    let mag = ln_mag.exp();
    let value = cplx(mag, mag * rho / lambda);
    Ok(PlancherelDensityValue { lambda, value })
}

#[cfg(test)]
mod tests;
