//! The Opdam–Cherednik transform `ℋf(λ) = ∫ f(x) G_λ(-x) A(x) dx`, its
//! inverse against the complex spectral measure `dσ`, the Plancherel
//! identity, the translation `τ_x` and the convolution `*`.
//!
//! Composite operations avoid nested adaptive quadrature: a function's
//! transform is represented by a [`Transformer`] (a frozen `x`-rule with
//! weights `w_j f(x_j) A(x_j)`), and an inverse transform by a
//! [`SpectralExpansion`] (a frozen `λ`-rule with weights
//! `w_k g(λ_k) σ'(λ_k)`). Both rules are adapted to probe integrands first.

mod io;
mod sampled;
pub(crate) mod spline;

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex;

pub use io::{read_sampled_csv, read_spectral_json, write_sampled_csv, write_spectral_json, SpectralFunctionDto};
pub use sampled::{DecayHint, SampledFunction, DEFAULT_SPECTRAL_DECAY};
pub(crate) use sampled::weaker_spectral;

use crate::error::{Error, Result};
use crate::operator::{EvaluableFunction, Func};
use crate::params::JacobiParams;
use crate::quadrature::{self, Decay, FixedRule, IntegralResult, QuadratureConfig, VecFn};
use crate::scalar::{real, Real};
use crate::specfun::{eigenfunction_g, plancherel_density, weight_a};
use spline::CubicSpline;

/// A function of the spectral variable with known decay.
pub trait Spectrum<T: Real> {
    fn eval(&self, lambda: T) -> Result<Complex<T>>;
    fn decay(&self) -> Decay;
}

impl<T: Real, S: Spectrum<T> + ?Sized> Spectrum<T> for &S {
    fn eval(&self, lambda: T) -> Result<Complex<T>> {
        (**self).eval(lambda)
    }
    fn decay(&self) -> Decay {
        (**self).decay()
    }
}

/// Closure-backed [`Spectrum`].
pub struct SpectralFn<F> {
    f: F,
    decay: Decay,
}

impl<F> SpectralFn<F> {
    pub fn new(decay: Decay, f: F) -> Self {
        Self { f, decay }
    }
}

impl<T: Real, F: Fn(T) -> Result<Complex<T>>> Spectrum<T> for SpectralFn<F> {
    fn eval(&self, lambda: T) -> Result<Complex<T>> {
        (self.f)(lambda)
    }
    fn decay(&self) -> Decay {
        self.decay
    }
}

/// Values of a transform on a grid of spectral nodes.
#[derive(Debug, Clone)]
pub struct SpectralFunction<T: Real> {
    params: JacobiParams<T>,
    lambdas: Vec<T>,
    values: Vec<Complex<T>>,
    errors: Option<Vec<T>>,
    spline: Option<CubicSpline<T>>,
}

impl<T: Real> SpectralFunction<T> {
    pub fn new(params: JacobiParams<T>, lambdas: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if lambdas.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} spectral nodes but {} values",
                lambdas.len(),
                values.len()
            )));
        }
        if lambdas.iter().any(|l| !l.is_finite()) || lambdas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("spectral nodes must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !crate::scalar::is_finite_c(*v)) {
            return Err(Error::InvalidInput("spectral values must be finite".into()));
        }
        let spline = if lambdas.len() >= 2 {
            Some(CubicSpline::new(lambdas.clone(), values.clone())?)
        } else {
            None
        };
        Ok(Self {
            params,
            lambdas,
            values,
            errors: None,
            spline,
        })
    }

    pub fn with_errors(mut self, errors: Vec<T>) -> Result<Self> {
        if errors.len() != self.lambdas.len() {
            return Err(Error::InvalidInput("one error estimate per node required".into()));
        }
        self.errors = Some(errors);
        Ok(self)
    }

    pub fn params(&self) -> &JacobiParams<T> {
        &self.params
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn errors(&self) -> Option<&[T]> {
        self.errors.as_deref()
    }

    /// True when the nodes are symmetric about 0 (the recommended layout).
    pub fn is_symmetric(&self) -> bool {
        let n = self.lambdas.len();
        let tol = T::lit(1e-12);
        (0..n).all(|i| {
            let (a, b) = (self.lambdas[i], self.lambdas[n - 1 - i]);
            (a + b).abs() <= tol * (T::one() + a.abs())
        })
    }
}

impl<T: Real> Spectrum<T> for SpectralFunction<T> {
    /// Cubic interpolation inside the node range, zero outside.
    fn eval(&self, lambda: T) -> Result<Complex<T>> {
        match &self.spline {
            Some(s) => Ok(s.eval3(lambda)[0]),
            None => Ok(if lambda == self.lambdas[0] {
                self.values[0]
            } else {
                real(T::zero())
            }),
        }
    }

    fn decay(&self) -> Decay {
        let r = self
            .lambdas
            .iter()
            .fold(T::zero(), |m, l| m.max(l.abs()))
            .max(T::lit(1e-3));
        Decay::Radius(r.as_f64())
    }
}

/// Memoizes a scalar function of one real variable by bit pattern; the
/// adaptive rules and the frozen rules built from them share node
/// coordinates exactly, so values computed during adaptation are reused.
pub(crate) struct Memo<T: Real> {
    map: RefCell<HashMap<u64, Complex<T>>>,
}

impl<T: Real> Memo<T> {
    pub(crate) fn new() -> Self {
        Self {
            map: RefCell::new(HashMap::new()),
        }
    }

    pub(crate) fn get_or(&self, x: T, f: impl FnOnce(T) -> Result<Complex<T>>) -> Result<Complex<T>> {
        let key = x.as_f64().to_bits();
        if let Some(v) = self.map.borrow().get(&key) {
            return Ok(*v);
        }
        let v = f(x)?;
        self.map.borrow_mut().insert(key, v);
        Ok(v)
    }
}

pub(crate) fn check_converged<T: Real>(nodes: &[T], results: &[IntegralResult<T>]) -> Result<()> {
    for (x, r) in nodes.iter().zip(results) {
        if !r.converged {
            return Err(Error::QuadratureNotConverged {
                node: x.as_f64(),
                error: r.error_estimate.as_f64(),
            });
        }
    }
    Ok(())
}

pub(crate) fn check_nodes<T: Real>(nodes: &[T], what: &str) -> Result<()> {
    if nodes.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{what} must be finite")));
    }
    Ok(())
}

/// Breakpoints of the `x`-integral for `f`: the symmetric line partition,
/// refined by the knots of grid data so the spline's kinks in `f''` sit on
/// panel ends.
pub(crate) fn x_breaks<T: Real>(f: &SampledFunction<T>, radius: T) -> Vec<T> {
    let quarter = radius / T::lit(4.0);
    let mut b: Vec<T> = (-4..=4).map(|i| quarter * T::lit(i as f64)).collect();
    if let Some(knots) = f.knots() {
        b.extend(knots.iter().copied().filter(|k| k.abs() < radius));
    }
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    b.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * (T::one() + y.abs()));
    b
}

/// Truncation radius of the `x`-integral for `f` against the given integrand.
pub(crate) fn x_radius<T: Real, I: quadrature::Integrand<T>>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    probe: &mut I,
    cfg: &QuadratureConfig,
) -> Result<T> {
    let decay = f.require_decay()?.line_decay(p);
    quadrature::line_radius(probe, &decay, cfg)
}

/// `f(x) A(x)`, skipping the weight where `f` vanishes.
pub(crate) fn weighted<T: Real, F: EvaluableFunction<T>>(p: &JacobiParams<T>, f: &F, x: T) -> Result<Complex<T>> {
    let v = f.value(x)?;
    if v == real(T::zero()) {
        return Ok(v);
    }
    Ok(v * weight_a(p, x)?)
}

/// `ℋf(λ)` at each of `lambdas`, by one adaptive `x`-integral per node
/// (vectorized over the nodes), with the decay descriptor of `f`'s hint.
pub fn forward<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    lambdas: &[T],
    cfg: &QuadratureConfig,
) -> Result<SpectralFunction<T>> {
    let results = forward_results(p, f, lambdas, cfg)?;
    check_converged(lambdas, &results)?;
    let values = results.iter().map(|r| r.value).collect();
    let errors = results.iter().map(|r| r.error_estimate).collect();
    SpectralFunction::new(*p, lambdas.to_vec(), values)?.with_errors(errors)
}

/// Raw per-node results of [`forward`].
pub fn forward_results<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    lambdas: &[T],
    cfg: &QuadratureConfig,
) -> Result<Vec<IntegralResult<T>>> {
    cfg.validate()?;
    check_nodes(lambdas, "spectral nodes")?;
    if lambdas.is_empty() {
        return Ok(Vec::new());
    }
    let zero = real(T::zero());
    let mut integrand = VecFn::new(lambdas.len(), |x: T, out: &mut [Complex<T>]| {
        let fa = weighted(p, f, x)?;
        if fa == zero {
            out.fill(zero);
            return Ok(());
        }
        for (o, &l) in out.iter_mut().zip(lambdas) {
            *o = fa * eigenfunction_g(p, l, -x)?;
        }
        Ok(())
    });
    let r = x_radius(p, f, &mut integrand, cfg)?;
    quadrature::integrate_breaks_vec(&mut integrand, &x_breaks(f, r), cfg)
}

/// Spectral nodes at which a [`Transformer`] is adapted.
fn probe_lambdas<T: Real>(radius: f64) -> Vec<T> {
    let r = T::lit(radius);
    (-4..=4).map(|i| r * T::lit(i as f64 / 4.0)).collect()
}

/// Width `τ` of the Gaussian decay whose initial truncation radius is `r`.
fn gaussian_width_for_radius(r: f64, abs_tol: f64) -> f64 {
    let l = (1.0 / abs_tol).ln().max(1.0);
    let g = (r / 1.5 - 2.0).max(1e-3);
    2.0 * l / (g * g)
}

/// `ℋf` as a callable of `λ`: a frozen `x`-rule with coefficients
/// `c_j = w_j f(x_j) A(x_j)`, so `ℋf(λ) = Σ_j c_j G_λ(-x_j)`.
///
/// The rule resolves `|λ| ≤ radius` only; beyond it the transform is
/// below tolerance (checked at construction) and evaluates to zero.
#[derive(Debug, Clone)]
pub struct Transformer<T: Real> {
    params: JacobiParams<T>,
    nodes: Vec<T>,
    coef: Vec<Complex<T>>,
    spectral_decay: Decay,
    radius: T,
}

impl<T: Real> Transformer<T> {
    /// Adapts the `x`-rule so that `ℋf` is resolved at spectral nodes out to
    /// the decay radius of `f`'s transform, widening the radius while the
    /// transform at its edge is still above tolerance.
    pub fn new(p: &JacobiParams<T>, f: &SampledFunction<T>, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let mut decay = f.spectral_decay();
        let mut radius = decay.initial_radius(cfg.abs_tol).min(cfg.max_radius);
        let memo = Memo::new();
        loop {
            let (nodes, coef) = Self::adapt(p, f, &probe_lambdas(radius), &memo, cfg)?;
            let mut this = Self {
                params: *p,
                nodes,
                coef,
                spectral_decay: decay,
                radius: T::lit(radius),
            };
            let edge = [this.radius, -this.radius]
                .iter()
                .map(|&l| Ok(this.eval_unbounded(l)?.norm() * plancherel_density(p, l)?.value.norm()))
                .collect::<Result<Vec<T>>>()?
                .into_iter()
                .fold(T::zero(), T::max);
            if edge <= T::lit(cfg.abs_tol) {
                return Ok(this);
            }
            if radius >= cfg.max_radius {
                return Err(Error::TruncationNotConverged {
                    radius,
                    tail: edge.as_f64(),
                });
            }
            radius = (radius * 1.5).min(cfg.max_radius);
            if let Decay::Gaussian(_) = decay {
                decay = Decay::Gaussian(gaussian_width_for_radius(radius, cfg.abs_tol));
            } else {
                decay = Decay::Radius(radius);
            }
            this.spectral_decay = decay;
        }
    }

    fn adapt(
        p: &JacobiParams<T>,
        f: &SampledFunction<T>,
        lambdas: &[T],
        memo: &Memo<T>,
        cfg: &QuadratureConfig,
    ) -> Result<(Vec<T>, Vec<Complex<T>>)> {
        let zero = real(T::zero());
        let mut integrand = VecFn::new(lambdas.len(), |x: T, out: &mut [Complex<T>]| {
            let fa = memo.get_or(x, |x| weighted(p, f, x))?;
            if fa == zero {
                out.fill(zero);
                return Ok(());
            }
            for (o, &l) in out.iter_mut().zip(lambdas) {
                *o = fa * eigenfunction_g(p, l, -x)?;
            }
            Ok(())
        });
        let r = x_radius(p, f, &mut integrand, cfg)?;
        let (rule, results) = FixedRule::adapt_breaks(&mut integrand, &x_breaks(f, r), cfg)?;
        drop(integrand);
        check_converged(lambdas, &results)?;
        let mut nodes = Vec::with_capacity(rule.len());
        let mut coef = Vec::with_capacity(rule.len());
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            let fa = memo.get_or(x, |x| weighted(p, f, x))?;
            if fa != zero {
                nodes.push(x);
                coef.push(fa * w);
            }
        }
        Ok((nodes, coef))
    }

    fn eval_unbounded(&self, lambda: T) -> Result<Complex<T>> {
        let mut acc = real(T::zero());
        for (&x, &c) in self.nodes.iter().zip(&self.coef) {
            acc = acc + c * eigenfunction_g(&self.params, lambda, -x)?;
        }
        Ok(acc)
    }

    /// Largest `|λ|` the rule resolves.
    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn params(&self) -> &JacobiParams<T> {
        &self.params
    }

    /// Number of `x`-nodes carrying a nonzero coefficient.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Transform on a list of spectral nodes.
    pub fn spectral_function(&self, lambdas: &[T]) -> Result<SpectralFunction<T>> {
        let values = lambdas.iter().map(|&l| self.eval(l)).collect::<Result<Vec<_>>>()?;
        SpectralFunction::new(self.params, lambdas.to_vec(), values)
    }
}

impl<T: Real> Spectrum<T> for Transformer<T> {
    fn eval(&self, lambda: T) -> Result<Complex<T>> {
        if lambda.abs() > self.radius {
            return Ok(real(T::zero()));
        }
        self.eval_unbounded(lambda)
    }

    fn decay(&self) -> Decay {
        self.spectral_decay
    }
}

/// Whether a reconstruction is known to be real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    /// Imaginary residue checked against `100·max(abs_tol, rel_tol·|v|)`, then dropped.
    Real,
    Complex,
}

/// `u(x) = Σ_k c_k G_{λ_k}(x)`: an inverse transform frozen on a `λ`-rule,
/// with `c_k = w_k g(λ_k) σ'(λ_k)`.
#[derive(Debug, Clone)]
pub struct SpectralExpansion<T: Real> {
    params: JacobiParams<T>,
    lambdas: Vec<T>,
    coef: Vec<Complex<T>>,
    kind: OutputKind,
    decay: Decay,
}

impl<T: Real> SpectralExpansion<T> {
    pub fn params(&self) -> &JacobiParams<T> {
        &self.params
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    /// Coefficients `w_k g(λ_k) σ'(λ_k)`.
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coef
    }

    /// Decay of the synthesized spectrum.
    pub fn spectral_decay(&self) -> Decay {
        self.decay
    }

    /// Same nodes with coefficients multiplied by `m(λ_k)`.
    pub fn map_coefficients(&self, m: impl Fn(T) -> Complex<T>) -> Self {
        let coef = self.lambdas.iter().zip(&self.coef).map(|(&l, &c)| c * m(l)).collect();
        Self {
            coef,
            ..self.clone()
        }
    }

    /// `Σ_k c_k G_{λ_k}(x)`, projected to the real axis for real outputs.
    pub fn eval(&self, x: T) -> Result<Complex<T>> {
        let mut acc = real(T::zero());
        for (&l, &c) in self.lambdas.iter().zip(&self.coef) {
            acc = acc + c * eigenfunction_g(&self.params, l, x)?;
        }
        Ok(match self.kind {
            OutputKind::Real => real(acc.re),
            OutputKind::Complex => acc,
        })
    }

    /// The expansion as a callback-backed function on `grid`. Its decay
    /// hint is the radius beyond which the synthesized function is below
    /// tolerance (see [`synthesis_radius`]).
    pub fn into_sampled(self, grid: Vec<T>, cfg: &QuadratureConfig) -> Result<SampledFunction<T>> {
        let hint = match synthesis_radius(&self.params, self.decay, cfg) {
            Some(r) => DecayHint::Support(r),
            None => DecayHint::Schwartz(T::one()),
        };
        let spectral = self.decay;
        let this = Arc::new(self);
        let f = Func::try_new(move |x: T| this.eval(x));
        Ok(SampledFunction::from_func(grid, f, Some(hint))?.with_spectral_decay(spectral))
    }
}

impl<T: Real> EvaluableFunction<T> for SpectralExpansion<T> {
    fn value(&self, x: T) -> Result<Complex<T>> {
        self.eval(x)
    }
}

/// Radius beyond which the inverse transform of a spectrum with Gaussian
/// decay `e^{-τλ²/2}` contributes less than `abs_tol` to `x`-integrals
/// against `G_λ(-x) A(x)`: the synthesized function decays like
/// `e^{-ρ|x|} e^{-x²/(2τ)}` while `|G_λ(-x)| A(x)` grows at most like
/// `e^{ρ|x|}`. `None` for other decay kinds.
pub fn synthesis_radius<T: Real>(p: &JacobiParams<T>, decay: Decay, cfg: &QuadratureConfig) -> Option<T> {
    let Decay::Gaussian(tau) = decay else {
        return None;
    };
    let l = (1.0 / cfg.abs_tol).ln().max(1.0);
    let r = p.rho().as_f64() * tau + (2.0 * tau * l).sqrt() + 2.0;
    Some(T::lit(r.min(cfg.max_radius)))
}

/// Output points plus guard points out to `guard`, so the frozen `λ`-rule
/// also resolves the oscillation of `G_λ(x)` where the expansion is later
/// evaluated off-grid.
pub(crate) fn with_guards<T: Real>(xs: &[T], guard: Option<T>) -> Vec<T> {
    let mut v = xs.to_vec();
    v.push(T::zero());
    if let Some(g) = guard {
        for k in [0.5, 1.0] {
            v.push(g * T::lit(k));
            v.push(-g * T::lit(k));
        }
    }
    v
}

/// Adapts a `λ`-rule to `∫ g(λ) G_λ(x) dσ(λ)` at every probe point and
/// freezes it; returns the expansion and the per-probe results.
pub fn synthesize<T: Real, S: Spectrum<T>>(
    p: &JacobiParams<T>,
    g: &S,
    probe_xs: &[T],
    kind: OutputKind,
    cfg: &QuadratureConfig,
) -> Result<(SpectralExpansion<T>, Vec<IntegralResult<T>>)> {
    cfg.validate()?;
    check_nodes(probe_xs, "evaluation points")?;
    let memo = Memo::new();
    let weight = |l: T| -> Result<Complex<T>> {
        let v = g.eval(l)?;
        if v == real(T::zero()) {
            return Ok(v);
        }
        Ok(v * plancherel_density(p, l)?.value)
    };
    let zero = real(T::zero());
    let mut integrand = VecFn::new(probe_xs.len(), |l: T, out: &mut [Complex<T>]| {
        let gw = memo.get_or(l, weight)?;
        if gw == zero {
            out.fill(zero);
            return Ok(());
        }
        for (o, &x) in out.iter_mut().zip(probe_xs) {
            *o = gw * eigenfunction_g(p, l, x)?;
        }
        Ok(())
    });
    let (rule, results) = FixedRule::adapt_line(&mut integrand, &g.decay(), cfg)?;
    drop(integrand);
    check_converged(probe_xs, &results)?;
    let mut lambdas = Vec::with_capacity(rule.len());
    let mut coef = Vec::with_capacity(rule.len());
    for (&l, &w) in rule.nodes().iter().zip(rule.weights()) {
        let gw = memo.get_or(l, weight)?;
        if gw != zero {
            lambdas.push(l);
            coef.push(gw * w);
        }
    }
    let expansion = SpectralExpansion {
        params: *p,
        lambdas,
        coef,
        kind,
        decay: g.decay(),
    };
    Ok((expansion, results))
}

/// Checks the imaginary residue of a reconstruction known to be real.
pub(crate) fn real_part<T: Real>(at: T, v: Complex<T>, cfg: &QuadratureConfig) -> Result<T> {
    let bound = T::lit(100.0) * T::lit(cfg.abs_tol).max(T::lit(cfg.rel_tol) * v.re.abs());
    if v.im.abs() > bound {
        return Err(Error::ImaginaryResidue {
            at: at.as_f64(),
            residue: v.im.as_f64(),
            bound: bound.as_f64(),
        });
    }
    Ok(v.re)
}

/// Inverse transform with per-point error estimates.
#[derive(Debug, Clone)]
pub struct Reconstruction<T: Real> {
    pub function: SampledFunction<T>,
    pub errors: Vec<T>,
}

/// `ℋ⁻¹g(x) = ∫ g(λ) G_λ(x) dσ(λ)` at each of `xs` (strictly increasing).
///
/// The result is callback-backed by the frozen expansion, so it can be
/// evaluated off-grid and fed to further transforms.
pub fn inverse<T: Real, S: Spectrum<T>>(
    p: &JacobiParams<T>,
    g: &S,
    xs: &[T],
    kind: OutputKind,
    cfg: &QuadratureConfig,
) -> Result<Reconstruction<T>> {
    let guard = synthesis_radius(p, g.decay(), cfg);
    let probes = with_guards(xs, guard);
    let (expansion, results) = synthesize(p, g, &probes, kind, cfg)?;
    let mut values = Vec::with_capacity(xs.len());
    for (&x, r) in xs.iter().zip(&results) {
        values.push(match kind {
            OutputKind::Real => real(real_part(x, r.value, cfg)?),
            OutputKind::Complex => r.value,
        });
    }
    let errors = results.iter().take(xs.len()).map(|r| r.error_estimate).collect();
    let function = expansion.into_sampled(xs.to_vec(), cfg)?;
    debug_assert_eq!(function.values().len(), values.len());
    Ok(Reconstruction { function, errors })
}

/// Both sides of the Plancherel identity for `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelCheck<T: Real> {
    /// `∫ |f|² A dx`.
    pub lhs: T,
    /// `Re ∫ |ℋf(λ)|² dσ(λ)`.
    pub rhs: T,
    /// `Im ∫ |ℋf(λ)|² dσ(λ)`; vanishes for real `f`.
    pub rhs_imag: T,
    /// `Re ∫ ℋf(λ) conj(ℋf̌(-λ)) dσ(λ)` with `f̌(x) = f(-x)`, which equals
    /// `lhs` for every `f`; `rhs` equals `lhs` only for even `f`.
    pub paired: T,
}

/// Computes both sides of the Plancherel identity independently.
pub fn plancherel_check<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    cfg: &QuadratureConfig,
) -> Result<PlancherelCheck<T>> {
    cfg.validate()?;
    let decay = f.require_decay()?.line_decay(p);
    let zero = real(T::zero());
    let lhs = quadrature::integrate_line(
        |x: T| {
            let v = f.value(x)?;
            if v == zero {
                return Ok(zero);
            }
            Ok(real(v.norm_sqr() * weight_a(p, x)?))
        },
        &decay,
        cfg,
    )?;
    let hf = Transformer::new(p, f, cfg)?;
    let hf_check = Transformer::new(p, &f.reflected()?, cfg)?;
    let spectral = f.spectral_decay();
    let mut integrand = VecFn::new(2, |l: T, out: &mut [Complex<T>]| {
        let d = plancherel_density(p, l)?.value;
        let h = hf.eval(l)?;
        out[0] = d * h.norm_sqr();
        out[1] = d * h * hf_check.eval(-l)?.conj();
        Ok(())
    });
    let rhs = quadrature::integrate_line_vec(&mut integrand, &spectral, cfg)?;
    Ok(PlancherelCheck {
        lhs: lhs.value.re,
        rhs: rhs[0].value.re,
        rhs_imag: rhs[0].value.im,
        paired: rhs[1].value.re,
    })
}

/// `τ_x f(y) = ∫ ℋf(λ) G_λ(x) G_λ(y) dσ(λ)` at each of `ys`.
///
/// With this pairing `τ_0` is the identity and `τ_{-x} F_t(y) = p_t(x, y)`.
pub fn translate<T: Real>(
    p: &JacobiParams<T>,
    x: T,
    f: &SampledFunction<T>,
    ys: &[T],
    cfg: &QuadratureConfig,
) -> Result<Reconstruction<T>> {
    let hf = Transformer::new(p, f, cfg)?;
    let spectrum = SpectralFn::new(hf.decay(), |l: T| Ok(hf.eval(l)? * eigenfunction_g(p, l, x)?));
    inverse(p, &spectrum, ys, OutputKind::Complex, cfg)
}

/// Route used to evaluate a convolution or a semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Multiplication of transforms followed by the inverse transform.
    #[default]
    Spectral,
    /// The defining `y`-integral against the translated kernel.
    Direct,
}

/// Kernel `k(x, y) = Σ_k c_k G_{λ_k}(x) G_{λ_k}(-y)` of a frozen expansion
/// of `g`, evaluated as a `y`-integrand for all `xs` at once.
struct BilinearKernel<T: Real> {
    params: JacobiParams<T>,
    lambdas: Vec<T>,
    // c_k G_{λ_k}(x_j), row-major in j
    left: Vec<Complex<T>>,
    n_x: usize,
}

impl<T: Real> BilinearKernel<T> {
    fn new(expansion: &SpectralExpansion<T>, xs: &[T]) -> Result<Self> {
        let p = expansion.params;
        let mut left = Vec::with_capacity(xs.len() * expansion.lambdas.len());
        for &x in xs {
            for (&l, &c) in expansion.lambdas.iter().zip(&expansion.coef) {
                left.push(c * eigenfunction_g(&p, l, x)?);
            }
        }
        Ok(Self {
            params: p,
            lambdas: expansion.lambdas.clone(),
            left,
            n_x: xs.len(),
        })
    }

    /// `k(x_j, y)` for every `j`, each scaled by `s`.
    fn row(&self, y: T, s: Complex<T>, out: &mut [Complex<T>]) -> Result<()> {
        let right = self
            .lambdas
            .iter()
            .map(|&l| eigenfunction_g(&self.params, l, -y))
            .collect::<Result<Vec<_>>>()?;
        let n = self.lambdas.len();
        for j in 0..self.n_x {
            let row = &self.left[j * n..(j + 1) * n];
            let v = row.iter().zip(&right).fold(real(T::zero()), |a, (l, r)| a + *l * *r);
            out[j] = v * s;
        }
        Ok(())
    }
}

/// `(f * g)(x) = ∫ f(y) τ_x g(-y) A(y) dy` at each of `xs`.
///
/// The direct route freezes `ℋg` on a `λ`-rule (so `τ_x g(-y)` is a finite
/// sum) and integrates over `y` with `f`'s decay; the spectral route is
/// `ℋ⁻¹(ℋf · ℋg)`.
pub fn convolve<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    g: &SampledFunction<T>,
    xs: &[T],
    route: Route,
    cfg: &QuadratureConfig,
) -> Result<Reconstruction<T>> {
    check_nodes(xs, "evaluation points")?;
    match route {
        Route::Spectral => {
            let hf = Transformer::new(p, f, cfg)?;
            let hg = Transformer::new(p, g, cfg)?;
            let decay = weaker_spectral(hf.decay(), hg.decay());
            let product = SpectralFn::new(decay, |l: T| Ok(hf.eval(l)? * hg.eval(l)?));
            let first = inverse(p, &product, xs, OutputKind::Complex, cfg)?;
            // the spectral width says nothing about how far translation spreads
            // f * g, so its support is probed on the synthesized function
            let cap = (x_radius_plain(p, f, cfg)? + x_radius_plain(p, g, cfg)?).min(T::lit(cfg.max_radius));
            let support = probe_support(p, &first.function, cap, cfg)?;
            let (expansion, results) = synthesize(p, &product, &with_guards(xs, Some(support)), OutputKind::Complex, cfg)?;
            let errors = results.iter().take(xs.len()).map(|r| r.error_estimate).collect();
            let function = expansion
                .into_sampled(xs.to_vec(), cfg)?
                .with_decay_hint(DecayHint::Support(support));
            Ok(Reconstruction { function, errors })
        }
        Route::Direct => {
            let hg = Transformer::new(p, g, cfg)?;
            let f_radius = x_radius_plain(p, f, cfg)?;
            let mut probes = with_guards(xs, Some(f_radius));
            probes.extend(xs.iter().map(|&x| -x));
            let (expansion, _) = synthesize(p, &hg, &probes, OutputKind::Complex, cfg)?;
            direct_integral(p, f, &expansion, xs, cfg)
        }
    }
}

/// Smallest `r ≤ cap` on a 1/2-step ladder beyond which `|u| A G_0` stays
/// below `abs_tol` for two consecutive rungs on both sides.
fn probe_support<T: Real>(p: &JacobiParams<T>, u: &SampledFunction<T>, cap: T, cfg: &QuadratureConfig) -> Result<T> {
    let step = T::lit(0.5);
    let tol = T::lit(cfg.abs_tol);
    let small = |r: T| -> Result<bool> {
        for x in [r, -r] {
            let v = u.value(x)?.norm() * weight_a(p, x)? * eigenfunction_g(p, T::zero(), -x)?.norm();
            if !(v < tol) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut r = step;
    while r < cap {
        if small(r)? && small(r + step)? {
            return Ok(r + step);
        }
        r = r + step;
    }
    Ok(cap)
}

/// Radius of `f`'s own `x`-integrals (`∫ |f| A`-type integrands).
pub(crate) fn x_radius_plain<T: Real>(p: &JacobiParams<T>, f: &SampledFunction<T>, cfg: &QuadratureConfig) -> Result<T> {
    let zero = real(T::zero());
    let mut probe = VecFn::new(1, |x: T, out: &mut [Complex<T>]| {
        out[0] = weighted(p, f, x)?;
        if out[0] != zero {
            out[0] = out[0] * eigenfunction_g(p, T::zero(), -x)?;
        }
        Ok(())
    });
    x_radius(p, f, &mut probe, cfg)
}

/// `∫ f(y) k(x_j, y) A(y) dy` for the kernel of `expansion`.
pub(crate) fn direct_integral<T: Real>(
    p: &JacobiParams<T>,
    f: &SampledFunction<T>,
    expansion: &SpectralExpansion<T>,
    xs: &[T],
    cfg: &QuadratureConfig,
) -> Result<Reconstruction<T>> {
    let kernel = BilinearKernel::new(expansion, xs)?;
    let zero = real(T::zero());
    let mut integrand = VecFn::new(xs.len(), |y: T, out: &mut [Complex<T>]| {
        let fa = weighted(p, f, y)?;
        if fa == zero {
            out.fill(zero);
            return Ok(());
        }
        kernel.row(y, fa, out)
    });
    let r = x_radius(p, f, &mut integrand, cfg)?;
    let results = quadrature::integrate_breaks_vec(&mut integrand, &x_breaks(f, r), cfg)?;
    check_converged(xs, &results)?;
    let values: Vec<Complex<T>> = results.iter().map(|r| r.value).collect();
    let errors = results.iter().map(|r| r.error_estimate).collect();
    let function = SampledFunction::tabulated(xs.to_vec(), values)?;
    Ok(Reconstruction { function, errors })
}

#[cfg(test)]
mod tests;
