//! The process with transition kernels `p_t(x, y) A(y) dy`: tabulated
//! transition laws, inverse-CDF sampling with killing, and path simulation.
//!
//! Sampling works in `f64`; the tables are built from the generic heat
//! kernel instantiated at `f64`.

use std::io::Write;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::heat::{kernel_slice_second, mass_radius, HeatKernelField};
use crate::params::JacobiParams;
use crate::quadrature::{self, QuadratureConfig, VecFn};
use crate::specfun::weight_a;
use crate::transform::spline::CubicSpline;

pub use crate::operator::radial_generator_check;

/// Largest tolerated mass of negative density values clipped to zero.
pub const CLIP_TOLERANCE: f64 = 1e-8;
/// Kernel mass neglected outside each node's window.
pub const WINDOW_TOLERANCE: f64 = 1e-10;
/// Relative tolerance of the per-node mass checks.
pub const MASS_TOLERANCE: f64 = 1e-5;

/// What the per-step survival probability of a table is taken to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassReference {
    /// The measured kernel mass, which must not depend on `x`.
    #[default]
    Measured,
    /// `e^{-tρ²/2}`; building fails unless every node's mass matches it.
    Formula,
}

/// Per-node transition laws on a fixed `y`-grid.
#[derive(Debug, Clone)]
pub struct TransitionTable {
    t_step: f64,
    params: JacobiParams<f64>,
    x_nodes: Vec<f64>,
    y_grid: Vec<f64>,
    // per x node: normalized density and CDF on y_grid
    density: Vec<Vec<f64>>,
    cdf: Vec<Vec<f64>>,
    masses: Vec<f64>,
    survival: f64,
    clip_mass: f64,
}

fn check_increasing(v: &[f64], what: &str, min_len: usize) -> Result<()> {
    if v.len() < min_len || v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!(
            "{what} must be finite, strictly increasing and have at least {min_len} entries"
        )));
    }
    Ok(())
}

/// `e^{-tρ²/2}`.
pub fn formula_mass(p: &JacobiParams<f64>, t: f64) -> f64 {
    (-0.5 * t * p.rho() * p.rho()).exp()
}

impl TransitionTable {
    /// Tabulates `p_t(x, ·) A(·)` for every `x` node (in parallel chunks),
    /// integrates it to a CDF through its cubic spline, and checks the mass.
    pub fn build(
        p: &JacobiParams<f64>,
        t_step: f64,
        x_nodes: &[f64],
        y_grid: &[f64],
        reference: MassReference,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        if !(t_step > 0.0 && t_step.is_finite()) {
            return Err(Error::InvalidInput(format!("time step must be positive, got {t_step}")));
        }
        check_increasing(x_nodes, "x nodes", 1)?;
        check_increasing(y_grid, "y grid", 3)?;
        let (y_lo, y_hi) = (y_grid[0], y_grid[y_grid.len() - 1]);
        for &x in x_nodes {
            let r = mass_radius(p, t_step, x, 1e-6 * formula_mass(p, t_step));
            if y_lo > -r || y_hi < r {
                return Err(Error::InvalidInput(format!(
                    "y grid [{y_lo}, {y_hi}] truncates the kernel at x = {x}; need [-{r}, {r}]"
                )));
            }
        }
        let weights = y_grid.iter().map(|&y| weight_a(p, y)).collect::<Result<Vec<_>>>()?;
        let chunk = x_nodes.len().div_ceil(rayon::current_num_threads()).max(1);
        let rows: Vec<Vec<f64>> = x_nodes
            .par_chunks(chunk)
            .map(|xs| HeatKernelField::compute(p, t_step, xs, y_grid, cfg).map(|f| f.values))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let mut density = Vec::with_capacity(x_nodes.len());
        let mut cdf = Vec::with_capacity(x_nodes.len());
        let mut masses = Vec::with_capacity(x_nodes.len());
        let mut clip_mass = 0.0f64;
        for (row, &x) in rows.iter().zip(x_nodes) {
            // beyond the node's own mass radius the tabulated values are
            // rounding noise amplified by A(y) ~ e^{2ρ|y|}
            let reach = mass_radius(p, t_step, x, WINDOW_TOLERANCE);
            let mut d: Vec<f64> = row
                .iter()
                .zip(&weights)
                .zip(y_grid)
                .map(|((v, a), y)| if y.abs() <= reach { v * a } else { 0.0 })
                .collect();
            let mut clipped = 0.0;
            for (i, v) in d.iter_mut().enumerate() {
                if *v < 0.0 {
                    let lo = y_grid[i.saturating_sub(1)];
                    let hi = y_grid[(i + 1).min(y_grid.len() - 1)];
                    clipped += -*v * (hi - lo) * 0.5;
                    *v = 0.0;
                }
            }
            let c = cumulative(y_grid, &d)?;
            let mass = *c.last().expect("nonempty grid");
            if clipped > CLIP_TOLERANCE * mass {
                return Err(Error::NegativeDensity { x, mass: clipped });
            }
            clip_mass = clip_mass.max(clipped);
            density.push(d.iter().map(|v| v / mass).collect());
            cdf.push(c.iter().map(|v| v / mass).collect());
            masses.push(mass);
        }
        let mean = masses.iter().sum::<f64>() / masses.len() as f64;
        let expected = match reference {
            MassReference::Measured => mean,
            MassReference::Formula => formula_mass(p, t_step),
        };
        for (&m, &x) in masses.iter().zip(x_nodes) {
            if (m - expected).abs() > MASS_TOLERANCE * expected {
                return Err(Error::MassMismatch { x, measured: m, expected });
            }
        }
        Ok(Self {
            t_step,
            params: *p,
            x_nodes: x_nodes.to_vec(),
            y_grid: y_grid.to_vec(),
            density,
            cdf,
            masses,
            survival: expected.clamp(f64::MIN_POSITIVE, 1.0),
            clip_mass,
        })
    }

    /// Table whose `y`-grid (spacing at most `0.05` and `√t/20`) covers every
    /// `x` node's kernel up to a relative mass of `1e-8`.
    pub fn with_auto_grid(
        p: &JacobiParams<f64>,
        t_step: f64,
        x_nodes: &[f64],
        reference: MassReference,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        check_increasing(x_nodes, "x nodes", 1)?;
        let tol = 1e-8 * formula_mass(p, t_step);
        let r = x_nodes
            .iter()
            .map(|&x| mass_radius(p, t_step, x, tol))
            .fold(0.0f64, f64::max);
        let h = 0.05f64.min(t_step.sqrt() / 20.0);
        let n = (r / h).ceil() as usize;
        let y_grid: Vec<f64> = (-(n as i64)..=n as i64).map(|k| k as f64 * h).collect();
        Self::build(p, t_step, x_nodes, &y_grid, reference, cfg)
    }

    pub fn t_step(&self) -> f64 {
        self.t_step
    }

    pub fn params(&self) -> &JacobiParams<f64> {
        &self.params
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }

    pub fn y_grid(&self) -> &[f64] {
        &self.y_grid
    }

    /// Unnormalized kernel mass at each `x` node.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Normalized CDF of node `i` on the `y`-grid.
    pub fn cdf(&self, i: usize) -> &[f64] {
        &self.cdf[i]
    }

    pub fn survival(&self) -> f64 {
        self.survival
    }

    /// Largest clipped negative mass over the nodes.
    pub fn clip_mass(&self) -> f64 {
        self.clip_mass
    }

    /// Inverse of node `i`'s CDF at `u ∈ [0, 1)` through its monotone cubic
    /// Hermite interpolant, whose knot slopes are the tabulated densities.
    fn quantile(&self, i: usize, u: f64) -> f64 {
        let (c, d, y) = (&self.cdf[i], &self.density[i], &self.y_grid);
        let j = c.partition_point(|&v| v <= u).clamp(1, c.len() - 1) - 1;
        let h = y[j + 1] - y[j];
        let dc = c[j + 1] - c[j];
        if dc <= 0.0 {
            return y[j];
        }
        let s = dc / h;
        let (mut m0, mut m1) = (d[j], d[j + 1]);
        // Fritsch–Carlson limiter keeps the interpolant monotone
        let (a, b) = (m0 / s, m1 / s);
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m0 *= tau;
            m1 *= tau;
        }
        let hermite = |v: f64| {
            let q = (v - y[j]) / h;
            let q2 = q * q;
            let q3 = q2 * q;
            c[j] * (2.0 * q3 - 3.0 * q2 + 1.0)
                + h * m0 * (q3 - 2.0 * q2 + q)
                + c[j + 1] * (3.0 * q2 - 2.0 * q3)
                + h * m1 * (q3 - q2)
        };
        let (mut lo, mut hi) = (y[j], y[j + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if hermite(mid) <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// One transition from `x`: `None` when the path is killed.
    ///
    /// Between two `x` nodes the law of the nearer-weighted node is used,
    /// choosing node `i + 1` with probability `(x - x_i)/(x_{i+1} - x_i)`.
    pub fn sample_step<R: Rng + ?Sized>(&self, x: f64, rng: &mut R) -> Result<Option<f64>> {
        let n = self.x_nodes.len();
        let (lo, hi) = (self.x_nodes[0], self.x_nodes[n - 1]);
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        if rng.gen::<f64>() >= self.survival {
            return Ok(None);
        }
        let node = if n == 1 {
            0
        } else {
            let i = self.x_nodes.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
            let w = (x - self.x_nodes[i]) / (self.x_nodes[i + 1] - self.x_nodes[i]);
            if w > 0.0 && rng.gen::<f64>() < w {
                i + 1
            } else {
                i
            }
        };
        Ok(Some(self.quantile(node, rng.gen::<f64>())))
    }
}

/// Cumulative integral of the natural cubic spline through `(ys, d)`.
fn cumulative(ys: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let spline = CubicSpline::new(ys.to_vec(), d.iter().map(|&v| Complex::new(v, 0.0)).collect())?;
    let m: Vec<f64> = ys.iter().map(|&y| spline.eval3(y)[2].re).collect();
    let mut c = vec![0.0; ys.len()];
    for j in 0..ys.len() - 1 {
        let h = ys[j + 1] - ys[j];
        let cell = 0.5 * h * (d[j] + d[j + 1]) - h * h * h * (m[j] + m[j + 1]) / 24.0;
        c[j + 1] = c[j] + cell.max(0.0);
    }
    Ok(c)
}

/// `x` nodes with the given spacing covering where paths of `n_steps`
/// transitions from `x0` can be expected: `|X|` drifts outward at speed at
/// most `ρ` with Brownian fluctuations, so the range is
/// `|x0| + ρT + 4√T + 1` for the horizon `T`.
pub fn simulation_nodes(p: &JacobiParams<f64>, t_step: f64, n_steps: usize, x0: f64, spacing: f64) -> Vec<f64> {
    let horizon = t_step * n_steps as f64;
    let r = x0.abs() + p.rho() * horizon + 4.0 * horizon.sqrt() + 1.0;
    let n = (r / spacing).ceil() as i64;
    (-n..=n).map(|k| k as f64 * spacing).collect()
}

/// One simulated path; `None` marks the killed state, absorbing from the
/// first killing onward.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub states: Vec<Option<f64>>,
    /// Seed of the generator; the stream is the path index.
    pub seed: u64,
}

impl PathSample {
    pub fn is_killed(&self) -> bool {
        self.states.last().is_some_and(Option::is_none)
    }
}

/// Simulates `n_paths` paths of `n_steps` transitions from `x0`, each with
/// its own ChaCha stream `(seed, path index)`.
pub fn simulate_paths(
    table: &TransitionTable,
    x0: f64,
    n_steps: usize,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<PathSample>> {
    (0..n_paths)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut times = Vec::with_capacity(n_steps + 1);
            let mut states = Vec::with_capacity(n_steps + 1);
            let mut state = Some(x0);
            times.push(0.0);
            states.push(state);
            for step in 1..=n_steps {
                if let Some(x) = state {
                    state = table.sample_step(x, &mut rng)?;
                }
                times.push(step as f64 * table.t_step);
                states.push(state);
            }
            Ok(PathSample { times, states, seed })
        })
        .collect()
}

/// CSV with columns `path_id, step, state`; the state is empty once killed.
pub fn write_paths_csv<W: Write>(paths: &[PathSample], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["path_id", "step", "state"])?;
    for (k, path) in paths.iter().enumerate() {
        for (step, s) in path.states.iter().enumerate() {
            let state = s.map(|v| v.to_string()).unwrap_or_default();
            out.write_record([k.to_string(), step.to_string(), state])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `∫ p_t(x, y) A(y) dy` and the conditioned expectations
/// `∫ h(y) p_t(x, y) A(y) dy / ∫ p_t(x, y) A(y) dy`, by adaptive quadrature
/// of the kernel slice (independent of any table).
pub fn kernel_expectations(
    p: &JacobiParams<f64>,
    t: f64,
    x: f64,
    hs: &[&dyn Fn(f64) -> f64],
    cfg: &QuadratureConfig,
) -> Result<(f64, Vec<f64>)> {
    let r = mass_radius(p, t, x, cfg.abs_tol).min(cfg.max_radius);
    let slice = kernel_slice_second(p, t, x, r, cfg)?;
    let mut integrand = VecFn::new(hs.len() + 1, |y: f64, out: &mut [Complex<f64>]| {
        let k = slice.eval(y)? * weight_a(p, y)?;
        out[0] = Complex::new(k, 0.0);
        for (o, h) in out[1..].iter_mut().zip(hs) {
            *o = Complex::new(k * h(y), 0.0);
        }
        Ok(())
    });
    let breaks = [-r, -0.5 * r, 0.0, 0.5 * r, r];
    let res = quadrature::integrate_breaks_vec(&mut integrand, &breaks, cfg)?;
    let mass = res[0].value.re;
    Ok((mass, res[1..].iter().map(|v| v.value.re / mass).collect()))
}

/// Sample mean and its standard error.
pub fn mean_and_standard_error(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    if v.len() < 2 {
        return (v.first().copied().unwrap_or(f64::NAN), f64::INFINITY);
    }
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
