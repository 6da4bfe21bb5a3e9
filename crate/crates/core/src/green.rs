//! The Green operator `𝒢f = 2 ℋ⁻¹(ℋf / (λ² + ρ²))`, which solves the
//! modified Poisson equation `½(T² - ρ²) u = -f`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat::heat_multiplier;
use crate::operator::{EvaluableFunction, Operator};
use crate::params::JacobiParams;
use crate::quadrature::{self, Decay, QuadratureConfig};
use crate::scalar::Real;
use crate::specfun::plancherel_density;
use crate::transform::{
    check_converged, inverse, synthesize, with_guards, OutputKind, Reconstruction, SampledFunction, SpectralFn, Spectrum,
    Transformer,
};

/// Smallest time of the geometric grid of the time-integral route.
pub const TIME_GRID_START: f64 = 1e-3;
/// Ratio of consecutive times of that grid.
pub const TIME_GRID_RATIO: f64 = 1.3;

fn output_kind<T: Real>(f: &SampledFunction<T>) -> OutputKind {
    if f.values().iter().all(|v| v.im == T::zero()) {
        OutputKind::Real
    } else {
        OutputKind::Complex
    }
}

/// `𝒢f` at each of `xs`; callback-backed so the operator can be applied to it.
pub fn green_apply<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    xs: &[T],
    cfg: &QuadratureConfig,
) -> Result<Reconstruction<T>> {
    let hf = Transformer::new(p, f, cfg)?;
    let two = T::lit(2.0);
    let rho2 = p.rho() * p.rho();
    // ρ > 0, so the divisor never vanishes
    let spectrum = SpectralFn::new(hf.decay(), |l: T| Ok(hf.eval(l)? * (two / (l * l + rho2))));
    inverse(p, &spectrum, xs, output_kind(f), cfg)
}

/// `½(T² - ρ²) u + f` at each of `xs`, in parallel over the points.
pub fn poisson_residual<T: Real, F, U>(p: &JacobiParams<T>, f: &F, u: &U, xs: &[T]) -> Result<Vec<Complex<T>>>
where
    F: EvaluableFunction<T> + Sync,
    U: EvaluableFunction<T> + Sync,
{
    let op = Operator::new(*p);
    xs.par_iter()
        .map(|&x| Ok(op.laplacian(u, x)? + f.value(x)?))
        .collect()
}

/// `𝒢f(x) = ∫_0^∞ P_t f(x) dt` by quadrature in `t`, independent of the
/// spectral division.
///
/// The integral over `[t₀, T_max]` is the trapezoid rule in `ln t` on the
/// geometric grid `t₀ 1.3^k`, with an end correction at `t₀`; `[0, t₀]`
/// is a single trapezoid with `P_0 f = f`.
/// `T_max = 2 ln(1/abs_tol)/ρ²` makes the neglected tail (bounded by
/// `‖f‖ e^{-tρ²/2}`) fall below tolerance.
pub fn green_time_integral<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    xs: &[T],
    cfg: &QuadratureConfig,
) -> Result<Vec<Complex<T>>> {
    let rho2 = (p.rho() * p.rho()).as_f64();
    let t_max = 2.0 * (1.0 / cfg.abs_tol).ln().max(1.0) / rho2;
    let h = TIME_GRID_RATIO.ln();
    let n = ((t_max / TIME_GRID_START).ln() / h).ceil() as usize;
    let t0 = T::lit(TIME_GRID_START);
    let hf = Transformer::new(p, f, cfg)?;
    let decay = match hf.decay() {
        Decay::Gaussian(tau) => Decay::Gaussian(tau + TIME_GRID_START),
        other => other,
    };
    let base = SpectralFn::new(decay, |l: T| Ok(hf.eval(l)? * heat_multiplier(p, t0, l)));
    let (expansion, _) = synthesize(p, &base, &with_guards(xs, None), OutputKind::Complex, cfg)?;
    let mut acc = vec![Complex::new(T::zero(), T::zero()); xs.len()];
    for k in 0..=n {
        let t = TIME_GRID_START * (h * k as f64).exp();
        // trapezoid in s = ln t: dt = t ds, half weight at both ends
        let w = if k == 0 || k == n { 0.5 * h * t } else { h * t };
        let dt = T::lit(t - TIME_GRID_START);
        let e = expansion.map_coefficients(|l| Complex::new(heat_multiplier(p, dt, l), T::zero()));
        for (a, &x) in acc.iter_mut().zip(xs) {
            *a = *a + e.eval(x)? * T::lit(w);
        }
    }
    // Euler–Maclaurin end correction at t₀, where d/ds (t P_t f) ≈ t₀ P_{t₀} f
    let corr = T::lit(h * h / 12.0) * t0;
    let half_t0 = t0 * T::lit(0.5);
    for (a, &x) in acc.iter_mut().zip(xs) {
        let u0 = expansion.eval(x)?;
        *a = *a + (f.value(x)? + u0) * half_t0 + u0 * corr;
    }
    Ok(acc)
}

/// `2 ∫ |ℋf(λ)| / (λ² + ρ²) |σ'(λ)| dλ`, an upper bound for `sup |𝒢f|`.
pub fn green_bound<T: Real>(p: &JacobiParams<T>, f: &SampledFunction<T>, cfg: &QuadratureConfig) -> Result<T> {
    let hf = Transformer::new(p, f, cfg)?;
    let rho2 = p.rho() * p.rho();
    let r = quadrature::integrate_line(
        |l: T| {
            let v = hf.eval(l)?;
            if v.norm() == T::zero() {
                return Ok(Complex::new(T::zero(), T::zero()));
            }
            let d = plancherel_density(p, l)?.value.norm();
            Ok(Complex::new(T::lit(2.0) * v.norm() * d / (l * l + rho2), T::zero()))
        },
        &hf.decay(),
        cfg,
    )?;
    check_converged(&[T::zero()], &[r])?;
    if !r.value.re.is_finite() {
        return Err(Error::NonFiniteIntegrand { node: 0.0 });
    }
    Ok(r.value.re)
}

#[cfg(test)]
mod tests;
