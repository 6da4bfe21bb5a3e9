//! Adaptive Gauss–Legendre integration on finite intervals and on the real
//! line, for vector-valued complex integrands.
//!
//! Each panel is integrated with `panel_order` nodes and with `panel_order/2`
//! nodes; the difference is the panel's error estimate. Panels are bisected
//! in order of decreasing weighted error until every component meets
//! `max(abs_tol, rel_tol·|value|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerances and limits shared by every integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections of an initial panel.
    pub max_depth: usize,
    /// Hard cap on the truncation radius of integrals over the line.
    pub max_radius: f64,
    /// Nodes per panel; even, so no node sits at a panel midpoint.
    pub panel_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 30,
            max_radius: 60.0,
            panel_order: 20,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad("rel_tol must be positive");
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return bad("abs_tol must be positive");
        }
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1");
        }
        if !(self.max_radius > 0.0 && self.max_radius.is_finite()) {
            return bad("max_radius must be positive");
        }
        if self.panel_order < 2 || self.panel_order % 2 != 0 {
            return bad("panel_order must be even and at least 2");
        }
        Ok(())
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }
}

/// Decay information used to pick the truncation radius of a line integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    /// Integrand dominated by `e^{-t λ²/2}` times polynomial growth.
    Gaussian(f64),
    /// Integrand dominated by `e^{-rate |x|}`.
    Exponential(f64),
    /// Integrand vanishes outside `[-r, r]`.
    Radius(f64),
}

const GAUSSIAN_GUARD: f64 = 2.0;
const SAFETY: f64 = 1.5;

impl Decay {
    /// Initial truncation radius for absolute tolerance `abs_tol`.
    pub fn initial_radius(&self, abs_tol: f64) -> f64 {
        let l = (1.0 / abs_tol).ln().max(1.0);
        match *self {
            Decay::Gaussian(t) => SAFETY * (GAUSSIAN_GUARD + (2.0 * l / t).sqrt()),
            Decay::Exponential(rate) => SAFETY * l / rate,
            Decay::Radius(r) => r,
        }
    }

    fn validate(&self) -> Result<()> {
        let v = match *self {
            Decay::Gaussian(v) | Decay::Exponential(v) | Decay::Radius(v) => v,
        };
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("decay parameter must be positive, got {self:?}")))
        }
    }
}

/// Value of one integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult<T: Real> {
    pub value: Complex<T>,
    pub error_estimate: T,
    pub truncation_radius: T,
    pub converged: bool,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = -z;
        xs[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// The pair of rules applied on each panel, scaled to the scalar type.
struct PanelRules<T: Real> {
    hi: (Vec<T>, Vec<T>),
    lo: (Vec<T>, Vec<T>),
}

impl<T: Real> PanelRules<T> {
    fn new(order: usize) -> Self {
        let conv = |(x, w): (Vec<f64>, Vec<f64>)| {
            (x.into_iter().map(T::lit).collect(), w.into_iter().map(T::lit).collect())
        };
        Self {
            hi: conv(gauss_legendre(order)),
            lo: conv(gauss_legendre(order / 2)),
        }
    }
}

/// Vector integrand: writes `f(x)` into the output slice.
pub trait Integrand<T: Real> {
    fn dim(&self) -> usize;
    fn eval(&mut self, x: T, out: &mut [Complex<T>]) -> Result<()>;
}

/// Adapter turning a closure into an [`Integrand`].
pub struct VecFn<F> {
    dim: usize,
    f: F,
}

impl<F> VecFn<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<T: Real, F: FnMut(T, &mut [Complex<T>]) -> Result<()>> Integrand<T> for VecFn<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&mut self, x: T, out: &mut [Complex<T>]) -> Result<()> {
        (self.f)(x, out)
    }
}

#[derive(Debug, Clone)]
struct Panel<T: Real> {
    a: T,
    b: T,
    depth: usize,
    value: Vec<Complex<T>>,
    err: Vec<T>,
}

struct Keyed {
    key: f64,
    seq: usize,
}

impl PartialEq for Keyed {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Keyed {
    fn cmp(&self, o: &Self) -> Ordering {
        // larger error first; earlier panel first on ties
        self.key.total_cmp(&o.key).then_with(|| o.seq.cmp(&self.seq))
    }
}

fn eval_panel<T: Real, I: Integrand<T> + ?Sized>(
    f: &mut I,
    rules: &PanelRules<T>,
    a: T,
    b: T,
    depth: usize,
    buf: &mut [Complex<T>],
) -> Result<Panel<T>> {
    let dim = f.dim();
    let half = T::lit(0.5);
    let mid = (a + b) * half;
    let rad = (b - a) * half;
    let mut hi = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut lo = vec![Complex::new(T::zero(), T::zero()); dim];
    for (rule, acc) in [(&rules.hi, &mut hi), (&rules.lo, &mut lo)] {
        for (&u, &w) in rule.0.iter().zip(rule.1.iter()) {
            let x = mid + rad * u;
            f.eval(x, buf)?;
            for (k, v) in buf.iter().enumerate() {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFiniteIntegrand { node: x.as_f64() });
                }
                acc[k] = acc[k] + *v * (w * rad);
            }
        }
    }
    let err = hi.iter().zip(lo.iter()).map(|(h, l)| (*h - *l).norm()).collect();
    Ok(Panel {
        a,
        b,
        depth,
        value: hi,
        err,
    })
}

/// Outcome of an adaptive run: per-component results plus the final panels.
pub struct Adaptive<T: Real> {
    pub results: Vec<IntegralResult<T>>,
    panels: Vec<(T, T)>,
}

const MAX_PANELS: usize = 4000;

fn tolerance<T: Real>(cfg: &QuadratureConfig, v: Complex<T>) -> T {
    T::lit(cfg.abs_tol).max(T::lit(cfg.rel_tol) * v.norm())
}

/// Adaptive integration over the given initial breakpoints.
fn adapt<T: Real, I: Integrand<T> + ?Sized>(
    f: &mut I,
    breaks: &[T],
    cfg: &QuadratureConfig,
    radius: T,
) -> Result<Adaptive<T>> {
    cfg.validate()?;
    let rules = PanelRules::new(cfg.panel_order);
    let dim = f.dim();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut panels: Vec<Option<Panel<T>>> = Vec::new();
    for w in breaks.windows(2) {
        panels.push(Some(eval_panel(f, &rules, w[0], w[1], 0, &mut buf)?));
    }
    let zero_c = Complex::new(T::zero(), T::zero());
    let totals = |panels: &[Option<Panel<T>>]| {
        let mut v = vec![zero_c; dim];
        let mut e = vec![T::zero(); dim];
        for p in panels.iter().flatten() {
            for k in 0..dim {
                v[k] = v[k] + p.value[k];
                e[k] = e[k] + p.err[k];
            }
        }
        (v, e)
    };
    let weight = |p: &Panel<T>, tol: &[T]| -> f64 {
        p.err
            .iter()
            .zip(tol)
            .map(|(e, t)| (*e / *t).as_f64())
            .fold(0.0, f64::max)
    };

    loop {
        let (v, e) = totals(&panels);
        let tol: Vec<T> = v.iter().map(|x| tolerance(cfg, *x)).collect();
        let converged = e.iter().zip(&tol).all(|(e, t)| *e <= *t);
        if converged || panels.len() >= MAX_PANELS {
            break;
        }
        // bisect the worst panels, up to a batch, re-keyed against current tolerances
        let mut heap = BinaryHeap::new();
        for (i, p) in panels.iter().enumerate() {
            if let Some(p) = p {
                if p.depth < cfg.max_depth {
                    heap.push(Keyed { key: weight(p, &tol), seq: i });
                }
            }
        }
        let Some(top) = heap.pop() else { break };
        if top.key <= 0.0 {
            break;
        }
        let mut batch = vec![top.seq];
        let cut = top.key * 0.25;
        while batch.len() < 16 {
            match heap.pop() {
                Some(k) if k.key > cut && k.key > 1.0 / (panels.len() as f64) => batch.push(k.seq),
                _ => break,
            }
        }
        batch.sort_unstable();
        for i in batch {
            let p = panels[i].take().expect("panel present");
            let mid = (p.a + p.b) * T::lit(0.5);
            let left = eval_panel(f, &rules, p.a, mid, p.depth + 1, &mut buf)?;
            let right = eval_panel(f, &rules, mid, p.b, p.depth + 1, &mut buf)?;
            panels[i] = Some(left);
            panels.push(Some(right));
        }
    }
    let (v, e) = totals(&panels);
    let mut ends: Vec<(T, T)> = panels.iter().flatten().map(|p| (p.a, p.b)).collect();
    ends.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));
    let results = v
        .into_iter()
        .zip(e)
        .map(|(value, error_estimate)| IntegralResult {
            value,
            error_estimate,
            truncation_radius: radius,
            converged: error_estimate <= tolerance(cfg, value),
        })
        .collect();
    Ok(Adaptive { results, panels: ends })
}

fn finite_breaks<T: Real>(a: T, b: T) -> Vec<T> {
    vec![a, (a + b) * T::lit(0.5), b]
}

fn line_breaks<T: Real>(r: T, n_half: usize) -> Vec<T> {
    let n = T::from_usize_lossy(n_half);
    let mut v: Vec<T> = (0..n_half).map(|i| -r + r * T::from_usize_lossy(i) / n).collect();
    v.push(T::zero());
    v.extend((1..=n_half).map(|i| r * T::from_usize_lossy(i) / n));
    v
}

/// `∫_a^b f` for a vector integrand.
pub fn integrate_finite_vec<T: Real, I: Integrand<T> + ?Sized>(
    f: &mut I,
    a: T,
    b: T,
    cfg: &QuadratureConfig,
) -> Result<Vec<IntegralResult<T>>> {
    if !(a < b) {
        return Err(Error::InvalidInput(format!("integration bounds need a < b, got [{a}, {b}]")));
    }
    Ok(adapt(f, &finite_breaks(a, b), cfg, b.abs().max(a.abs()))?.results)
}

/// `∫_a^b f` for a scalar complex integrand.
pub fn integrate_finite<T: Real>(
    mut f: impl FnMut(T) -> Result<Complex<T>>,
    a: T,
    b: T,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>> {
    let mut vf = VecFn::new(1, |x: T, out: &mut [Complex<T>]| {
        out[0] = f(x)?;
        Ok(())
    });
    Ok(integrate_finite_vec(&mut vf, a, b, cfg)?[0])
}

/// Truncation radius for `f` on the line: starts from the decay descriptor
/// and grows in steps of a quarter of the initial radius until both tail
/// panels beyond it contribute less than `abs_tol/4`.
fn probe_radius<T: Real, I: Integrand<T> + ?Sized>(
    f: &mut I,
    decay: &Decay,
    cfg: &QuadratureConfig,
) -> Result<T> {
    decay.validate()?;
    if let Decay::Radius(r) = *decay {
        return Ok(T::lit(r.min(cfg.max_radius)));
    }
    let r0 = decay.initial_radius(cfg.abs_tol).min(cfg.max_radius);
    let step = T::lit(r0 / 4.0);
    let mut r = T::lit(r0);
    let rules = PanelRules::new(cfg.panel_order);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); f.dim()];
    let quarter = T::lit(cfg.abs_tol / 4.0);
    let cap = T::lit(cfg.max_radius);
    loop {
        let right = eval_panel(f, &rules, r, r + step, 0, &mut buf)?;
        let left = eval_panel(f, &rules, -r - step, -r, 0, &mut buf)?;
        let tail = right
            .value
            .iter()
            .zip(&left.value)
            .map(|(a, b)| a.norm() + b.norm())
            .fold(T::zero(), T::max);
        if tail < quarter {
            return Ok(r);
        }
        if r >= cap {
            return Err(Error::TruncationNotConverged {
                radius: r.as_f64(),
                tail: tail.as_f64(),
            });
        }
        r = (r + step).min(cap);
    }
}

/// `∫ f` over `[breaks[0], breaks[last]]`, starting from the given breakpoints.
pub fn integrate_breaks_vec<T: Real, I: Integrand<T> + ?Sized>(
    f: &mut I,
    breaks: &[T],
    cfg: &QuadratureConfig,
) -> Result<Vec<IntegralResult<T>>> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
    }
    let r = breaks[0].abs().max(breaks[breaks.len() - 1].abs());
    Ok(adapt(f, breaks, cfg, r)?.results)
}

/// Truncation radius chosen for `f` by the decay descriptor and tail probing.
pub fn line_radius<T: Real, I: Integrand<T> + ?Sized>(
    f: &mut I,
    decay: &Decay,
    cfg: &QuadratureConfig,
) -> Result<T> {
    cfg.validate()?;
    probe_radius(f, decay, cfg)
}

/// `∫_ℝ f` for a vector integrand with the given decay.
pub fn integrate_line_vec<T: Real, I: Integrand<T> + ?Sized>(
    f: &mut I,
    decay: &Decay,
    cfg: &QuadratureConfig,
) -> Result<Vec<IntegralResult<T>>> {
    cfg.validate()?;
    let r = probe_radius(f, decay, cfg)?;
    Ok(adapt(f, &line_breaks(r, 4), cfg, r)?.results)
}

/// `∫_ℝ f` for a scalar complex integrand with the given decay.
pub fn integrate_line<T: Real>(
    mut f: impl FnMut(T) -> Result<Complex<T>>,
    decay: &Decay,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult<T>> {
    let mut vf = VecFn::new(1, |x: T, out: &mut [Complex<T>]| {
        out[0] = f(x)?;
        Ok(())
    });
    Ok(integrate_line_vec(&mut vf, decay, cfg)?[0])
}

/// A frozen composite rule: the panels an adaptive run settled on, flattened
/// to nodes and weights so the same discretization can be reused for many
/// related integrands.
#[derive(Debug, Clone)]
pub struct FixedRule<T: Real> {
    nodes: Vec<T>,
    weights: Vec<T>,
    radius: T,
}

impl<T: Real> FixedRule<T> {
    fn from_panels(panels: &[(T, T)], order: usize, radius: T) -> Self {
        let (u, w) = gauss_legendre(order);
        let half = T::lit(0.5);
        let mut nodes = Vec::with_capacity(panels.len() * order);
        let mut weights = Vec::with_capacity(panels.len() * order);
        for &(a, b) in panels {
            let mid = (a + b) * half;
            let rad = (b - a) * half;
            for (&ui, &wi) in u.iter().zip(&w) {
                nodes.push(mid + rad * T::lit(ui));
                weights.push(rad * T::lit(wi));
            }
        }
        Self { nodes, weights, radius }
    }

    /// Adapts to a probe integrand on `[a, b]`.
    pub fn adapt_finite<I: Integrand<T> + ?Sized>(
        probe: &mut I,
        a: T,
        b: T,
        cfg: &QuadratureConfig,
    ) -> Result<(Self, Vec<IntegralResult<T>>)> {
        if !(a < b) {
            return Err(Error::InvalidInput(format!("integration bounds need a < b, got [{a}, {b}]")));
        }
        let run = adapt(probe, &finite_breaks(a, b), cfg, a.abs().max(b.abs()))?;
        let rule = Self::from_panels(&run.panels, cfg.panel_order, a.abs().max(b.abs()));
        Ok((rule, run.results))
    }

    /// Adapts to a probe integrand starting from the given breakpoints.
    pub fn adapt_breaks<I: Integrand<T> + ?Sized>(
        probe: &mut I,
        breaks: &[T],
        cfg: &QuadratureConfig,
    ) -> Result<(Self, Vec<IntegralResult<T>>)> {
        if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        let r = breaks[0].abs().max(breaks[breaks.len() - 1].abs());
        let run = adapt(probe, breaks, cfg, r)?;
        let rule = Self::from_panels(&run.panels, cfg.panel_order, r);
        Ok((rule, run.results))
    }

    /// Adapts to a probe integrand on the line.
    pub fn adapt_line<I: Integrand<T> + ?Sized>(
        probe: &mut I,
        decay: &Decay,
        cfg: &QuadratureConfig,
    ) -> Result<(Self, Vec<IntegralResult<T>>)> {
        cfg.validate()?;
        let r = probe_radius(probe, decay, cfg)?;
        let run = adapt(probe, &line_breaks(r, 4), cfg, r)?;
        let rule = Self::from_panels(&run.panels, cfg.panel_order, r);
        Ok((rule, run.results))
    }

    /// Uniform rule: `panels` equal panels of `order` nodes on `[a, b]`.
    pub fn uniform(a: T, b: T, panels: usize, order: usize) -> Self {
        let n = T::from_usize_lossy(panels.max(1));
        let ends: Vec<(T, T)> = (0..panels.max(1))
            .map(|i| {
                let i0 = T::from_usize_lossy(i);
                (a + (b - a) * i0 / n, a + (b - a) * (i0 + T::one()) / n)
            })
            .collect();
        Self::from_panels(&ends, order, a.abs().max(b.abs()))
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(T) -> Result<Complex<T>>) -> Result<Complex<T>> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand { node: x.as_f64() });
            }
            acc = acc + v * w;
        }
        Ok(acc)
    }

    /// `Σ w_i v_i` for values already evaluated at the nodes.
    pub fn sum(&self, values: &[Complex<T>]) -> Complex<T> {
        self.weights
            .iter()
            .zip(values)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&w, &v)| acc + v * w)
    }
}
