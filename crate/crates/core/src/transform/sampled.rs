use num_complex::Complex;

use super::spline::CubicSpline;
use crate::error::{Error, Result};
use crate::operator::{EvaluableFunction, Func, Parity};
use crate::params::JacobiParams;
use crate::quadrature::Decay;
use crate::scalar::Real;

/// Decay of a function in `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayHint<T: Real> {
    /// Member of `(cosh x)^{-ρ/r} 𝒮(ℝ)` with `r ∈ (0, 1]`.
    Schwartz(T),
    /// Vanishes outside `[-radius, radius]`.
    Support(T),
}

impl<T: Real> DecayHint<T> {
    fn validate(&self) -> Result<()> {
        match *self {
            DecayHint::Schwartz(r) if r > T::zero() && r <= T::one() => Ok(()),
            DecayHint::Support(r) if r > T::zero() && r.is_finite() => Ok(()),
            _ => Err(Error::InvalidInput(format!("invalid decay hint {self:?}"))),
        }
    }

    /// Decay descriptor for integrands `f(x) G_λ(±x) A(x)`: the exponential
    /// rate `ρ(1/r - 1) + 1` under-estimates the net decay.
    pub fn line_decay(&self, p: &JacobiParams<T>) -> Decay {
        match *self {
            DecayHint::Schwartz(r) => {
                let rate = p.rho() * (T::one() / r - T::one()) + T::one();
                Decay::Exponential(rate.as_f64())
            }
            DecayHint::Support(r) => Decay::Radius(r.as_f64()),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr<T: Real> {
    Callback(Func<T>),
    Cubic(CubicSpline<T>),
}

/// A function on a strictly increasing grid, with a decay hint in `x`, a
/// decay descriptor for its transform in `λ`, and a way to evaluate it
/// between (and beyond) the grid nodes.
#[derive(Clone, Debug)]
pub struct SampledFunction<T: Real> {
    grid: Vec<T>,
    values: Vec<Complex<T>>,
    decay: Option<DecayHint<T>>,
    spectral_decay: Decay,
    repr: Repr<T>,
}

/// Decay assumed for transforms of smooth rapidly decreasing functions
/// unless the caller states otherwise; always confirmed by tail probing.
pub const DEFAULT_SPECTRAL_DECAY: Decay = Decay::Gaussian(0.5);

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("grid nodes must be finite".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    Ok(())
}

impl<T: Real> SampledFunction<T> {
    /// Callback-backed function sampled on `grid`.
    pub fn from_func(grid: Vec<T>, f: Func<T>, decay: Option<DecayHint<T>>) -> Result<Self> {
        check_grid(&grid)?;
        if let Some(d) = &decay {
            d.validate()?;
        }
        let values = grid.iter().map(|&x| f.value(x)).collect::<Result<Vec<_>>>()?;
        if values.iter().any(|v| !crate::scalar::is_finite_c(*v)) {
            return Err(Error::InvalidInput("function values must be finite".into()));
        }
        Ok(Self {
            grid,
            values,
            decay,
            spectral_decay: DEFAULT_SPECTRAL_DECAY,
            repr: Repr::Callback(f),
        })
    }

    /// Grid data interpolated by a natural cubic spline and taken to be zero
    /// outside the grid, so its decay hint is the grid's support.
    pub fn from_samples(grid: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        check_grid(&grid)?;
        if grid.len() < 2 {
            return Err(Error::InvalidInput("grid data needs at least two nodes".into()));
        }
        if values.iter().any(|v| !crate::scalar::is_finite_c(*v)) {
            return Err(Error::InvalidInput("function values must be finite".into()));
        }
        let support = grid[0].abs().max(grid[grid.len() - 1].abs());
        let spline = CubicSpline::new(grid.clone(), values.clone())?;
        Ok(Self {
            grid,
            values,
            decay: Some(DecayHint::Support(support)),
            spectral_decay: DEFAULT_SPECTRAL_DECAY,
            repr: Repr::Cubic(spline),
        })
    }

    /// Tabulated values: grid data for two or more nodes, otherwise a
    /// single point value (zero elsewhere).
    pub(crate) fn tabulated(grid: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if grid.len() != 1 {
            return Self::from_samples(grid, values);
        }
        let (x0, v0) = (grid[0], values[0]);
        let f = Func::try_new(move |x: T| Ok(if x == x0 { v0 } else { Complex::new(T::zero(), T::zero()) }));
        let support = x0.abs().max(T::lit(1e-3));
        Self::from_func(grid, f, Some(DecayHint::Support(support)))
    }

    pub fn with_spectral_decay(mut self, decay: Decay) -> Self {
        self.spectral_decay = decay;
        self
    }

    pub fn with_decay(mut self, decay: DecayHint<T>) -> Result<Self> {
        decay.validate()?;
        self.decay = Some(decay);
        Ok(self)
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn decay(&self) -> Option<DecayHint<T>> {
        self.decay
    }

    /// Decay hint, required by every integral over the line.
    pub fn require_decay(&self) -> Result<DecayHint<T>> {
        self.decay
            .ok_or_else(|| Error::InvalidInput("function has no decay hint".into()))
    }

    pub fn spectral_decay(&self) -> Decay {
        self.spectral_decay
    }

    pub fn is_grid_data(&self) -> bool {
        matches!(self.repr, Repr::Cubic(_))
    }

    /// Knots of grid data; `None` for callback-backed functions.
    pub(crate) fn knots(&self) -> Option<&[T]> {
        match &self.repr {
            Repr::Cubic(s) => Some(s.nodes()),
            Repr::Callback(_) => None,
        }
    }

    /// Same function with another `x`-decay hint.
    pub(crate) fn with_decay_hint(self, decay: DecayHint<T>) -> Self {
        Self {
            decay: Some(decay),
            ..self
        }
    }

    /// Same function with values resampled on another grid.
    pub fn resample(&self, grid: Vec<T>) -> Result<Self> {
        check_grid(&grid)?;
        let values = grid.iter().map(|&x| self.value(x)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid,
            values,
            ..self.clone()
        })
    }

    /// `f(-x)`.
    pub fn reflected(&self) -> Result<Self> {
        let inner = self.clone();
        let f = Func::try_new(move |x: T| inner.value(-x));
        let grid: Vec<T> = self.grid.iter().rev().map(|&x| -x).collect();
        let mut out = Self::from_func(grid, f, self.decay)?;
        out.spectral_decay = self.spectral_decay;
        Ok(out)
    }

    /// `Σ c_k f_k`, callback-backed.
    pub fn linear_combination(terms: &[(Complex<T>, &SampledFunction<T>)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidInput("empty linear combination".into()));
        };
        let parts: Vec<(Complex<T>, SampledFunction<T>)> =
            terms.iter().map(|(c, f)| (*c, (*f).clone())).collect();
        let decay = terms
            .iter()
            .map(|(_, f)| f.decay)
            .try_fold(None::<DecayHint<T>>, |acc, d| match (acc, d) {
                (_, None) => None,
                (None, Some(d)) => Some(Some(d)),
                (Some(a), Some(b)) => Some(Some(weaker(a, b))),
            })
            .flatten();
        let spectral = terms
            .iter()
            .map(|(_, f)| f.spectral_decay)
            .fold(first.spectral_decay, weaker_spectral);
        let f = Func::try_new(move |x: T| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (c, f) in &parts {
                acc = acc + *c * f.value(x)?;
            }
            Ok(acc)
        });
        let mut out = Self::from_func(first.grid.clone(), f, decay)?;
        out.spectral_decay = spectral;
        Ok(out)
    }
}

fn weaker<T: Real>(a: DecayHint<T>, b: DecayHint<T>) -> DecayHint<T> {
    match (a, b) {
        (DecayHint::Support(x), DecayHint::Support(y)) => DecayHint::Support(x.max(y)),
        (DecayHint::Schwartz(x), DecayHint::Schwartz(y)) => DecayHint::Schwartz(x.max(y)),
        (DecayHint::Schwartz(x), _) | (_, DecayHint::Schwartz(x)) => DecayHint::Schwartz(x),
    }
}

pub(crate) fn weaker_spectral(a: Decay, b: Decay) -> Decay {
    match (a, b) {
        (Decay::Gaussian(x), Decay::Gaussian(y)) => Decay::Gaussian(x.min(y)),
        (Decay::Exponential(x), Decay::Exponential(y)) => Decay::Exponential(x.min(y)),
        (Decay::Radius(x), Decay::Radius(y)) => Decay::Radius(x.max(y)),
        (Decay::Exponential(x), _) | (_, Decay::Exponential(x)) => Decay::Exponential(x),
        (Decay::Gaussian(x), Decay::Radius(_)) | (Decay::Radius(_), Decay::Gaussian(x)) => Decay::Gaussian(x),
    }
}

impl<T: Real> EvaluableFunction<T> for SampledFunction<T> {
    fn value(&self, x: T) -> Result<Complex<T>> {
        match &self.repr {
            Repr::Callback(f) => f.value(x),
            Repr::Cubic(s) => Ok(s.eval3(x)[0]),
        }
    }

    fn derivative(&self, x: T) -> Option<Result<Complex<T>>> {
        match &self.repr {
            Repr::Callback(f) => f.derivative(x),
            Repr::Cubic(s) => Some(Ok(s.eval3(x)[1])),
        }
    }

    fn second_derivative(&self, x: T) -> Option<Result<Complex<T>>> {
        match &self.repr {
            Repr::Callback(f) => f.second_derivative(x),
            Repr::Cubic(s) => Some(Ok(s.eval3(x)[2])),
        }
    }

    fn parity(&self) -> Parity {
        match &self.repr {
            Repr::Callback(f) => f.parity(),
            Repr::Cubic(_) => Parity::None,
        }
    }
}
