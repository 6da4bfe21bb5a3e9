//! The fundamental solution `F_t`, the heat kernel `p_t(x, y)` and the heat
//! semigroup `P_t` generated by `½(T² - ρ²)`, all through the spectral
//! multiplier `e^{-t(λ²+ρ²)/2}`.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{EvaluableFunction, Operator};
use crate::params::JacobiParams;
use crate::quadrature::{self, Decay, QuadratureConfig, VecFn};
use crate::scalar::{real, Real};
use crate::specfun::{eigenfunction_g, plancherel_density, weight_a};
use crate::transform::{
    check_converged, direct_integral, inverse, real_part, synthesize, with_guards, OutputKind, SampledFunction,
    SpectralExpansion, SpectralFn, Spectrum, Transformer,
};

/// A computed value with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate<T: Real> {
    pub value: T,
    pub error: T,
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("time must be positive and finite, got {t}")))
    }
}

/// `λ² + ρ²`.
#[inline]
pub(crate) fn spectral_energy<T: Real>(p: &JacobiParams<T>, lambda: T) -> T {
    let rho = p.rho();
    lambda * lambda + rho * rho
}

/// `e^{-t(λ²+ρ²)/2}`.
#[inline]
pub fn heat_multiplier<T: Real>(p: &JacobiParams<T>, t: T, lambda: T) -> T {
    (-(t * spectral_energy(p, lambda)) * T::lit(0.5)).exp()
}

/// The multiplier `e^{-t(λ²+ρ²)/2}` as a spectrum.
pub fn gaussian_spectrum<T: Real>(p: JacobiParams<T>, t: T) -> SpectralFn<impl Fn(T) -> Result<Complex<T>>> {
    SpectralFn::new(Decay::Gaussian(t.as_f64()), move |l: T| Ok(real(heat_multiplier(&p, t, l))))
}

/// Decay of `m(λ) e^{-t(λ²+ρ²)/2}` given the decay of `m`.
fn damped(decay: Decay, t: f64) -> Decay {
    match decay {
        Decay::Gaussian(tau) => Decay::Gaussian(tau + t),
        other => other,
    }
}

/// `∫ e^{-t(λ²+ρ²)/2} a(λ) dσ(λ)` for a scalar amplitude, checked real.
fn spectral_scalar<T: Real>(
    p: &JacobiParams<T>,
    t: T,
    at: T,
    amplitude: impl Fn(T) -> Result<Complex<T>>,
    cfg: &QuadratureConfig,
) -> Result<Estimate<T>> {
    let r = quadrature::integrate_line(
        |l: T| {
            let m = heat_multiplier(p, t, l);
            if m == T::zero() {
                return Ok(real(T::zero()));
            }
            Ok(amplitude(l)? * plancherel_density(p, l)?.value * m)
        },
        &Decay::Gaussian(t.as_f64()),
        cfg,
    )?;
    check_converged(&[at], &[r])?;
    Ok(Estimate {
        value: real_part(at, r.value, cfg)?,
        error: r.error_estimate,
    })
}

/// `F_t(x) = ℋ⁻¹(e^{-t(λ²+ρ²)/2})(x)`.
pub fn fundamental_solution<T: Real>(p: &JacobiParams<T>, t: T, x: T, cfg: &QuadratureConfig) -> Result<Estimate<T>> {
    check_time(t)?;
    spectral_scalar(p, t, x, |l| eigenfunction_g(p, l, x), cfg)
}

/// `F_t` on `grid`, callback-backed so it can be evaluated anywhere.
pub fn fundamental_solution_fn<T: Real>(
    p: &JacobiParams<T>,
    t: T,
    grid: &[T],
    cfg: &QuadratureConfig,
) -> Result<SampledFunction<T>> {
    check_time(t)?;
    Ok(inverse(p, &gaussian_spectrum(*p, t), grid, OutputKind::Real, cfg)?.function)
}

/// `p_t(x, y) = ∫ e^{-t(λ²+ρ²)/2} G_λ(x) G_λ(-y) dσ(λ)`.
pub fn heat_kernel<T: Real>(p: &JacobiParams<T>, t: T, x: T, y: T, cfg: &QuadratureConfig) -> Result<Estimate<T>> {
    check_time(t)?;
    spectral_scalar(
        p,
        t,
        x,
        |l| Ok(eigenfunction_g(p, l, x)? * eigenfunction_g(p, l, -y)?),
        cfg,
    )
}

/// One argument of `p_t` frozen: `z ↦ p_t(x, z)` or `z ↦ p_t(z, y)`, as a
/// frozen spectral expansion resolved for `|z| ≤ reach`.
#[derive(Debug, Clone)]
pub struct KernelSlice<T: Real> {
    expansion: SpectralExpansion<T>,
    // evaluate the expansion at -z
    flip: bool,
}

impl<T: Real> KernelSlice<T> {
    fn build(
        p: &JacobiParams<T>,
        t: T,
        fixed: T,
        flip: bool,
        reach: T,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        check_time(t)?;
        let amp = |l: T| -> Result<Complex<T>> {
            let m = heat_multiplier(p, t, l);
            if m == T::zero() {
                return Ok(real(T::zero()));
            }
            // p_t(x, z): amplitude G_λ(x), evaluated at -z
            // p_t(z, y): amplitude G_λ(-y), evaluated at z
            let g = if flip {
                eigenfunction_g(p, l, fixed)?
            } else {
                eigenfunction_g(p, l, -fixed)?
            };
            Ok(g * m)
        };
        let spectrum = SpectralFn::new(Decay::Gaussian(t.as_f64()), amp);
        let probes = with_guards(&[], Some(reach));
        let probes: Vec<T> = probes
            .iter()
            .copied()
            .chain([T::lit(0.25), T::lit(0.75)].iter().flat_map(|&k| [reach * k, -reach * k]))
            .collect();
        let (expansion, results) = synthesize(p, &spectrum, &probes, OutputKind::Real, cfg)?;
        for (&z, r) in probes.iter().zip(&results) {
            real_part(z, r.value, cfg)?;
        }
        Ok(Self { expansion, flip })
    }

    pub fn eval(&self, z: T) -> Result<T> {
        let arg = if self.flip { -z } else { z };
        Ok(self.expansion.eval(arg)?.re)
    }
}

impl<T: Real> EvaluableFunction<T> for KernelSlice<T> {
    fn value(&self, z: T) -> Result<Complex<T>> {
        Ok(real(self.eval(z)?))
    }
}

/// `z ↦ p_t(x, z)`.
pub fn kernel_slice_second<T: Real>(p: &JacobiParams<T>, t: T, x: T, reach: T, cfg: &QuadratureConfig) -> Result<KernelSlice<T>> {
    KernelSlice::build(p, t, x, true, reach, cfg)
}

/// `z ↦ p_t(z, y)`.
pub fn kernel_slice_first<T: Real>(p: &JacobiParams<T>, t: T, y: T, reach: T, cfg: &QuadratureConfig) -> Result<KernelSlice<T>> {
    KernelSlice::build(p, t, y, false, reach, cfg)
}

/// Radius containing all but a fraction `tol` of the mass of `p_t(x, ·) A`:
/// the kernel drifts by about `ρt` and spreads like `e^{-z²/(2t)}`.
///
/// Beyond it the spectral evaluation of `p_t(x, z)` loses its relative
/// accuracy (the exact value is smaller than the oscillating integrand by
/// `e^{-z²/(2t)}`) while `A(z)` grows like `e^{2ρ|z|}`, so the truncation
/// must not be widened by tail probing.
pub fn mass_radius<T: Real>(p: &JacobiParams<T>, t: T, x: T, tol: f64) -> T {
    let l = T::lit((1.0 / tol).ln().max(1.0));
    x.abs() + p.rho() * t + (T::lit(2.0) * t * l).sqrt()
}

/// `∫ p_t(x, y) A(y) dy` over `|y| ≤ mass_radius`.
pub fn kernel_mass<T: Real>(p: &JacobiParams<T>, t: T, x: T, cfg: &QuadratureConfig) -> Result<Estimate<T>> {
    check_time(t)?;
    let r = mass_radius(p, t, x, cfg.abs_tol).min(T::lit(cfg.max_radius));
    let slice = kernel_slice_second(p, t, x, r, cfg)?;
    let half = r * T::lit(0.5);
    let breaks = [-r, -half, T::zero(), half, r];
    let mut integrand = VecFn::new(1, |y: T, out: &mut [Complex<T>]| {
        out[0] = real(slice.eval(y)? * weight_a(p, y)?);
        Ok(())
    });
    let res = quadrature::integrate_breaks_vec(&mut integrand, &breaks, cfg)?;
    check_converged(&[x], &res)?;
    Ok(Estimate {
        value: res[0].value.re,
        error: res[0].error_estimate,
    })
}

/// `p_t(x_i, y_j)` on a grid with per-cell error estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernelField<T: Real> {
    pub t: T,
    pub params: JacobiParams<T>,
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    /// `values[i][j] = p_t(xs[i], ys[j])`.
    pub values: Vec<Vec<T>>,
    pub errors: Vec<Vec<T>>,
}

impl<T: Real> HeatKernelField<T> {
    /// One adaptive `λ`-integral for all cells, with `G_λ(x_i)` and
    /// `G_λ(-y_j)` evaluated once per spectral node.
    pub fn compute(p: &JacobiParams<T>, t: T, xs: &[T], ys: &[T], cfg: &QuadratureConfig) -> Result<Self> {
        check_time(t)?;
        let (nx, ny) = (xs.len(), ys.len());
        let mut gx = vec![real(T::zero()); nx];
        let mut gy = vec![real(T::zero()); ny];
        let mut integrand = VecFn::new(nx * ny, |l: T, out: &mut [Complex<T>]| {
            let m = heat_multiplier(p, t, l);
            if m == T::zero() {
                out.fill(real(T::zero()));
                return Ok(());
            }
            let w = plancherel_density(p, l)?.value * m;
            for (g, &x) in gx.iter_mut().zip(xs) {
                *g = eigenfunction_g(p, l, x)? * w;
            }
            for (g, &y) in gy.iter_mut().zip(ys) {
                *g = eigenfunction_g(p, l, -y)?;
            }
            for i in 0..nx {
                for j in 0..ny {
                    out[i * ny + j] = gx[i] * gy[j];
                }
            }
            Ok(())
        });
        let res = quadrature::integrate_line_vec(&mut integrand, &Decay::Gaussian(t.as_f64()), cfg)?;
        let mut values = vec![vec![T::zero(); ny]; nx];
        let mut errors = vec![vec![T::zero(); ny]; nx];
        for i in 0..nx {
            for j in 0..ny {
                let r = &res[i * ny + j];
                check_converged(&[xs[i]], std::slice::from_ref(r))?;
                values[i][j] = real_part(xs[i], r.value, cfg)?;
                errors[i][j] = r.error_estimate;
            }
        }
        Ok(Self {
            t,
            params: *p,
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            values,
            errors,
        })
    }

    /// Smallest value on the grid.
    pub fn min_value(&self) -> T {
        self.values.iter().flatten().fold(T::infinity(), |m, &v| m.min(v))
    }
}

#[derive(Serialize, Deserialize)]
struct HeatKernelFieldDto {
    t: f64,
    alpha: f64,
    beta: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    values: Vec<Vec<f64>>,
    err: Vec<Vec<f64>>,
}

impl HeatKernelField<f64> {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let dto = HeatKernelFieldDto {
            t: self.t,
            alpha: self.params.alpha(),
            beta: self.params.beta(),
            xs: self.xs.clone(),
            ys: self.ys.clone(),
            values: self.values.clone(),
            err: self.errors.clone(),
        };
        serde_json::to_writer_pretty(w, &dto)?;
        Ok(())
    }

    pub fn read_json<R: std::io::Read>(r: R) -> Result<Self> {
        let dto: HeatKernelFieldDto = serde_json::from_reader(r)?;
        if dto.values.len() != dto.xs.len() || dto.values.iter().any(|row| row.len() != dto.ys.len()) {
            return Err(Error::Format("values must be an xs-by-ys matrix".into()));
        }
        check_time(dto.t)?;
        Ok(Self {
            t: dto.t,
            params: JacobiParams::new(dto.alpha, dto.beta)?,
            xs: dto.xs,
            ys: dto.ys,
            values: dto.values,
            errors: dto.err,
        })
    }
}

/// How `P_t f` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemigroupRoute {
    /// `ℋ⁻¹(e^{-t(λ²+ρ²)/2} ℋf)`.
    #[default]
    Spectral,
    /// `∫ p_t(x, y) f(y) A(y) dy = (f * F_t)(x)`, with the kernel frozen on
    /// a spectral rule and the `y`-integral cut where `f` decays.
    Convolution,
}

/// `P_t f` on a grid.
#[derive(Debug, Clone)]
pub struct HeatSemigroupResult<T: Real> {
    pub t: T,
    pub input: SampledFunction<T>,
    pub output: SampledFunction<T>,
    pub route: SemigroupRoute,
    pub errors: Vec<T>,
}

fn output_kind<T: Real>(f: &SampledFunction<T>) -> OutputKind {
    if f.values().iter().all(|v| v.im == T::zero()) {
        OutputKind::Real
    } else {
        OutputKind::Complex
    }
}

/// `P_t f` at each of `xs`; `t = 0` returns `f` itself.
pub fn semigroup_apply<T: Real>(
    p: &JacobiParams<T>,
    t: T,
    f: &SampledFunction<T>,
    xs: &[T],
    route: SemigroupRoute,
    cfg: &QuadratureConfig,
) -> Result<HeatSemigroupResult<T>> {
    if t == T::zero() {
        return Ok(HeatSemigroupResult {
            t,
            input: f.clone(),
            output: f.resample(xs.to_vec())?,
            route,
            errors: vec![T::zero(); xs.len()],
        });
    }
    check_time(t)?;
    let kind = output_kind(f);
    let rec = match route {
        SemigroupRoute::Spectral => {
            let hf = Transformer::new(p, f, cfg)?;
            let spectrum = SpectralFn::new(damped(hf.decay(), t.as_f64()), |l: T| {
                let m = heat_multiplier(p, t, l);
                if m == T::zero() {
                    return Ok(real(T::zero()));
                }
                Ok(hf.eval(l)? * m)
            });
            inverse(p, &spectrum, xs, kind, cfg)?
        }
        SemigroupRoute::Convolution => {
            let reach = crate::transform::x_radius_plain(p, f, cfg)?;
            let mut probes = with_guards(xs, Some(reach));
            probes.extend(xs.iter().map(|&x| -x));
            let (expansion, _) = synthesize(p, &gaussian_spectrum(*p, t), &probes, OutputKind::Complex, cfg)?;
            let mut rec = direct_integral(p, f, &expansion, xs, cfg)?;
            if kind == OutputKind::Real {
                let vals = xs
                    .iter()
                    .zip(rec.function.values())
                    .map(|(&x, &v)| Ok(real(real_part(x, v, cfg)?)))
                    .collect::<Result<Vec<_>>>()?;
                rec.function = SampledFunction::tabulated(xs.to_vec(), vals)?;
            }
            rec
        }
    };
    Ok(HeatSemigroupResult {
        t,
        input: f.clone(),
        output: rec.function,
        route,
        errors: rec.errors,
    })
}

/// The function `u(·, t)` whose heat-equation residual is measured.
#[derive(Debug, Clone, Copy)]
pub enum HeatSource<'a, T: Real> {
    /// `u = F_t`.
    Fundamental,
    /// `u = p_t(·, y)`.
    Kernel { y: T },
    /// `u = P_t f`.
    Semigroup(&'a SampledFunction<T>),
}

/// Residual of the heat equation at one space–time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatResidual<T: Real> {
    /// `∂_t u - ½(T² - ρ²) u`.
    pub residual: T,
    pub u: T,
}

/// `∂_t u - ½(T² - ρ²) u` at `(x, t)`, with `∂_t` by central differences
/// (step `10⁻⁴ t`, one Richardson level) and the spatial part by the
/// operator module, applied to `u` frozen on one spectral rule for all
/// the times involved.
pub fn heat_residual<T: Real>(
    p: &JacobiParams<T>,
    t: T,
    x: T,
    source: HeatSource<'_, T>,
    cfg: &QuadratureConfig,
) -> Result<HeatResidual<T>> {
    check_time(t)?;
    let h = t * T::lit(1e-4);
    let t_lo = t - h;
    let transformer = match source {
        HeatSource::Semigroup(f) => Some(Transformer::new(p, f, cfg)?),
        _ => None,
    };
    let base_decay = transformer.as_ref().map_or(Decay::Gaussian(0.0), |tr| tr.decay());
    let decay = match base_decay {
        Decay::Gaussian(tau) => Decay::Gaussian(tau + t_lo.as_f64()),
        other => other,
    };
    let spectrum = SpectralFn::new(decay, |l: T| {
        let m = heat_multiplier(p, t_lo, l);
        if m == T::zero() {
            return Ok(real(T::zero()));
        }
        let a = match source {
            HeatSource::Fundamental => real(T::one()),
            HeatSource::Kernel { y } => eigenfunction_g(p, l, -y)?,
            HeatSource::Semigroup(_) => transformer.as_ref().expect("built above").eval(l)?,
        };
        Ok(a * m)
    });
    let reach = x.abs() + T::one();
    let probes = with_guards(&[x, -x], Some(reach));
    let (base, _) = synthesize(p, &spectrum, &probes, OutputKind::Real, cfg)?;
    let at = |dt: T| base.map_coefficients(|l| real(heat_multiplier(p, dt, l)));
    let u_at = |dt: T| -> Result<T> { Ok(at(dt).eval(x)?.re) };
    let two = T::lit(2.0);
    let half = h / two;
    // u(t ± k) with t = t_lo + h
    let d_h = (u_at(h + h)? - u_at(T::zero())?) / (two * h);
    let d_half = (u_at(h + half)? - u_at(h - half)?) / (two * half);
    let dt_u = (d_half * T::lit(4.0) - d_h) / T::lit(3.0);
    let now = at(h);
    let lu = Operator::new(*p).laplacian(&now, x)?.re;
    Ok(HeatResidual {
        residual: dt_u - lu,
        u: now.eval(x)?.re,
    })
}

/// Both sides of the kernel form of the semigroup law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChapmanKolmogorov<T: Real> {
    /// `p_{t+s}(x, y)`.
    pub lhs: T,
    /// `∫ p_t(x, z) p_s(z, y) A(z) dz`.
    pub rhs: T,
}

/// Computes `p_{t+s}(x, y)` and `∫ p_t(x, z) p_s(z, y) A(z) dz`
/// independently; the `z`-integral is truncated by tail probing.
pub fn chapman_kolmogorov_check<T: Real>(
    p: &JacobiParams<T>,
    t: T,
    s: T,
    x: T,
    y: T,
    cfg: &QuadratureConfig,
) -> Result<ChapmanKolmogorov<T>> {
    check_time(t)?;
    check_time(s)?;
    let lhs = heat_kernel(p, t + s, x, y, cfg)?.value;
    let decay = Decay::Gaussian(1.0 / (t + s).as_f64());
    let r0 = T::lit(decay.initial_radius(cfg.abs_tol)) + x.abs().max(y.abs());
    let reach = (r0 * T::lit(1.5)).min(T::lit(cfg.max_radius));
    let left = kernel_slice_second(p, t, x, reach, cfg)?;
    let right = kernel_slice_first(p, s, y, reach, cfg)?;
    let r = quadrature::integrate_line(
        |z: T| {
            let a = left.eval(z)?;
            if a == T::zero() {
                return Ok(real(T::zero()));
            }
            Ok(real(a * right.eval(z)? * weight_a(p, z)?))
        },
        &decay,
        cfg,
    )?;
    Ok(ChapmanKolmogorov { lhs, rhs: r.value.re })
}

#[cfg(test)]
mod tests;
