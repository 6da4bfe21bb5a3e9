//! The image `P_t(L²(A))` of the heat semigroup as a reproducing-kernel
//! Hilbert space with kernel `K_t(z, u) = p_{2t}(-z, u)` on the real axis.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat::{
    heat_kernel, heat_multiplier, kernel_slice_second, mass_radius, semigroup_apply, Estimate, HeatKernelField,
    SemigroupRoute,
};
use crate::operator::Func;
use crate::params::JacobiParams;
use crate::quadrature::{self, Decay, QuadratureConfig, VecFn};
use crate::scalar::Real;
use crate::specfun::{eigenfunction_g, plancherel_density};
use crate::transform::{check_converged, real_part, x_breaks, x_radius, DecayHint, SampledFunction, Spectrum, Transformer};

/// `F = P_t f`, represented by its preimage `f`.
#[derive(Debug, Clone)]
pub struct ImageFunction<T: Real> {
    preimage: SampledFunction<T>,
    t: T,
    params: JacobiParams<T>,
}

impl<T: Real> ImageFunction<T> {
    pub fn new(params: JacobiParams<T>, t: T, preimage: SampledFunction<T>) -> Result<Self> {
        if !(t > T::zero() && t.is_finite()) {
            return Err(Error::InvalidInput(format!("time must be positive and finite, got {t}")));
        }
        preimage.require_decay()?;
        Ok(Self { preimage, t, params })
    }

    pub fn preimage(&self) -> &SampledFunction<T> {
        &self.preimage
    }

    pub fn t(&self) -> T {
        self.t
    }

    pub fn params(&self) -> &JacobiParams<T> {
        &self.params
    }

    /// `F(u) = P_t f(u)` at each of `us` (strictly increasing).
    pub fn values(&self, us: &[T], cfg: &QuadratureConfig) -> Result<Vec<Complex<T>>> {
        let r = semigroup_apply(&self.params, self.t, &self.preimage, us, SemigroupRoute::Spectral, cfg)?;
        Ok(r.output.values().to_vec())
    }
}

/// `K_t(z, u) = p_{2t}(-z, u)`.
pub fn kernel_k<T: Real>(p: &JacobiParams<T>, t: T, z: T, u: T, cfg: &QuadratureConfig) -> Result<Estimate<T>> {
    heat_kernel(p, t + t, -z, u, cfg)
}

/// `∫ e^{-t(λ²+ρ²)} G_λ(-z) G_λ(-u) dσ(λ)`, the spectral form of `K_t(z, u)`
/// computed without going through the heat kernel.
pub fn kernel_k_spectral<T: Real>(p: &JacobiParams<T>, t: T, z: T, u: T, cfg: &QuadratureConfig) -> Result<Estimate<T>> {
    if !(t > T::zero() && t.is_finite()) {
        return Err(Error::InvalidInput(format!("time must be positive and finite, got {t}")));
    }
    let r = quadrature::integrate_line(
        |l: T| {
            let m = (-(t * (l * l + p.rho() * p.rho()))).exp();
            if m == T::zero() {
                return Ok(Complex::new(T::zero(), T::zero()));
            }
            Ok(eigenfunction_g(p, l, -z)? * eigenfunction_g(p, l, -u)? * plancherel_density(p, l)?.value * m)
        },
        &Decay::Gaussian(2.0 * t.as_f64()),
        cfg,
    )?;
    check_converged(&[z], &[r])?;
    Ok(Estimate {
        value: real_part(z, r.value, cfg)?,
        error: r.error_estimate,
    })
}

/// Radius beyond which `f` contributes nothing to its `x`-integrals.
fn own_radius<T: Real>(p: &JacobiParams<T>, f: &SampledFunction<T>, cfg: &QuadratureConfig) -> Result<T> {
    match f.require_decay()? {
        DecayHint::Support(r) => Ok(r),
        DecayHint::Schwartz(_) => {
            let mut probe = VecFn::new(1, |x: T, out: &mut [Complex<T>]| {
                out[0] = crate::transform::weighted(p, f, x)?;
                Ok(())
            });
            x_radius(p, f, &mut probe, cfg)
        }
    }
}

/// `⟨f, g⟩ = ∫ f conj(g) A dx`, truncated where the faster-decaying
/// factor says.
pub fn l2_inner<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    cfg: &QuadratureConfig,
) -> Result<Complex<T>> {
    cfg.validate()?;
    let r = own_radius(p, f, cfg)?.min(own_radius(p, g, cfg)?);
    let mut breaks = x_breaks(f, r);
    breaks.extend(x_breaks(g, r));
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    breaks.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * (T::one() + b.abs()));
    let zero = Complex::new(T::zero(), T::zero());
    let mut integrand = VecFn::new(1, |x: T, out: &mut [Complex<T>]| {
        let fa = crate::transform::weighted(p, f, x)?;
        out[0] = if fa == zero {
            zero
        } else {
            fa * crate::operator::EvaluableFunction::value(g, x)?.conj()
        };
        Ok(())
    });
    let res = quadrature::integrate_breaks_vec(&mut integrand, &breaks, cfg)?;
    check_converged(&[T::zero()], &res)?;
    Ok(res[0].value)
}

/// `⟨F, G⟩ = ⟨f, g⟩_{L²(A)}` for `F = P_t f`, `G = P_t g`.
pub fn image_inner<T: Real>(
    f: &ImageFunction<T>,
    g: &ImageFunction<T>,
    cfg: &QuadratureConfig,
) -> Result<T> {
    if f.t != g.t || f.params != g.params {
        return Err(Error::Mismatch(format!(
            "image functions at t = {} and t = {} with parameters {:?} and {:?}",
            f.t, g.t, f.params, g.params
        )));
    }
    Ok(l2_inner(&f.params, &f.preimage, &g.preimage, cfg)?.re)
}

/// `K_t(·, u)` as an image function: its preimage is `z ↦ p_t(-u, -z)`,
/// frozen on a spectral rule and supported where the kernel has mass.
pub fn kernel_section(p: &JacobiParams<f64>, t: f64, u: f64, cfg: &QuadratureConfig) -> Result<ImageFunction<f64>> {
    let reach = mass_radius(p, t, u, cfg.abs_tol).min(cfg.max_radius);
    let slice = kernel_slice_second(p, t, -u, reach, cfg)?;
    let func = Func::try_new(move |z: f64| Ok(Complex::new(slice.eval(-z)?, 0.0)));
    let grid = vec![-reach, 0.0, reach];
    let pre = SampledFunction::from_func(grid, func, Some(DecayHint::Support(reach)))?;
    ImageFunction::new(*p, t, pre)
}

/// Both sides of the reproducing property at `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproducingCheck {
    /// `F(u) = P_t f(u)`.
    pub value: f64,
    /// `⟨f, p_t(-u, -·)⟩_{L²(A)}`.
    pub inner: f64,
}

/// `F(u)` against `⟨F, K_t(·, u)⟩` for `F = P_t f`.
pub fn reproducing_check(f: &ImageFunction<f64>, u: f64, cfg: &QuadratureConfig) -> Result<ReproducingCheck> {
    let value = f.values(&[u], cfg)?[0].re;
    let section = kernel_section(f.params(), f.t(), u, cfg)?;
    let inner = image_inner(f, &section, cfg)?;
    Ok(ReproducingCheck { value, inner })
}

/// `M_ij = K_t(u_i, u_j)` on distinct nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T: Real> {
    pub nodes: Vec<T>,
    pub matrix: DMatrix<T>,
}

impl<T: Real> GramMatrix<T> {
    /// Eigenvalues of the symmetric part, ascending, in double precision.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = self.matrix.map(|v| v.as_f64());
        let sym = (&m + m.transpose()) * 0.5;
        let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        ev
    }

    /// Largest entry in absolute value.
    pub fn norm_max(&self) -> T {
        self.matrix.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Largest `|M_ij - M_ji|`.
    pub fn asymmetry(&self) -> T {
        let n = self.nodes.len();
        let mut m = T::zero();
        for i in 0..n {
            for j in 0..i {
                m = m.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        m
    }
}

impl GramMatrix<f64> {
    /// CSV with the nodes as header row, one matrix row per line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(self.nodes.iter().map(|u| u.to_string()))?;
        for i in 0..self.matrix.nrows() {
            out.write_record(self.matrix.row(i).iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `M_ij = K_t(u_i, u_j) = p_{2t}(-u_i, u_j)`, filled row by row in parallel.
pub fn gram_matrix<T: Real>(p: &JacobiParams<T>, t: T, us: &[T], cfg: &QuadratureConfig) -> Result<GramMatrix<T>> {
    gram_fill(p, t, us, -T::one(), cfg)
}

/// `M_ij = ⟨k_{u_i}, k_{u_j}⟩_{L²(A)} = p_{2t}(u_i, u_j)` for the kernel
/// sections `k_u = p_t(-u, -·)` of [`kernel_section`]; positive
/// semidefinite by construction.
pub fn section_gram_matrix<T: Real>(p: &JacobiParams<T>, t: T, us: &[T], cfg: &QuadratureConfig) -> Result<GramMatrix<T>> {
    gram_fill(p, t, us, T::one(), cfg)
}

fn gram_fill<T: Real>(p: &JacobiParams<T>, t: T, us: &[T], sign: T, cfg: &QuadratureConfig) -> Result<GramMatrix<T>> {
    for (i, a) in us.iter().enumerate() {
        if !a.is_finite() || us[..i].contains(a) {
            return Err(Error::InvalidInput("Gram nodes must be finite and distinct".into()));
        }
    }
    let rows = us
        .par_iter()
        .map(|&u| HeatKernelField::compute(p, t + t, &[sign * u], us, cfg).map(|f| f.values[0].clone()))
        .collect::<Result<Vec<_>>>()?;
    let n = us.len();
    let matrix = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(GramMatrix {
        nodes: us.to_vec(),
        matrix,
    })
}

/// Norms attached to `F = P_t f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageNormCheck<T: Real> {
    /// `‖F‖² = ‖f‖²_{L²(A)}`, the transferred norm.
    pub transferred: T,
    /// `‖P_t f‖²_{L²(A)}` by quadrature in `x`.
    pub direct: T,
    /// `Re ∫ e^{-t(λ²+ρ²)} ℋf(λ) conj(ℋf̌(-λ)) dσ(λ)`, equal to `direct`.
    pub spectral: T,
}

pub fn image_norm_check<T: Real>(f: &ImageFunction<T>, cfg: &QuadratureConfig) -> Result<ImageNormCheck<T>> {
    let (p, t) = (&f.params, f.t);
    let transferred = image_inner(f, f, cfg)?;
    let pf = semigroup_apply(p, t, &f.preimage, f.preimage.grid(), SemigroupRoute::Spectral, cfg)?.output;
    let direct = l2_inner(p, &pf, &pf, cfg)?.re;
    let hf = Transformer::new(p, &f.preimage, cfg)?;
    let hr = Transformer::new(p, &f.preimage.reflected()?, cfg)?;
    let decay = match hf.decay() {
        Decay::Gaussian(tau) => Decay::Gaussian(tau + 2.0 * t.as_f64()),
        other => other,
    };
    let r = quadrature::integrate_line(
        |l: T| {
            let m = heat_multiplier(p, t + t, l);
            if m == T::zero() {
                return Ok(Complex::new(T::zero(), T::zero()));
            }
            Ok(hf.eval(l)? * hr.eval(-l)?.conj() * plancherel_density(p, l)?.value * m)
        },
        &decay,
        cfg,
    )?;
    Ok(ImageNormCheck {
        transferred,
        direct,
        spectral: r.value.re,
    })
}
