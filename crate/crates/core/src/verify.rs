//! Property suites: each property measures the largest deviation from an
//! identity over a fixed set of inputs and compares it with a tolerance.
//!
//! Everything is deterministic given [`VerifyOptions::seed`], so reports are
//! reproducible byte for byte.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::green::{green_apply, green_bound, green_time_integral, poisson_residual};
use crate::heat::{
    chapman_kolmogorov_check, heat_residual, kernel_mass, semigroup_apply, HeatKernelField, HeatSource, SemigroupRoute,
};
use crate::markov::{
    formula_mass, kernel_expectations, mean_and_standard_error, simulate_paths, MassReference, TransitionTable,
};
use crate::operator::{eigenfunction, radial_generator_check, EvaluableFunction, Func, Operator};
use crate::params::JacobiParams;
use crate::quadrature::QuadratureConfig;
use crate::rkhs::{
    gram_matrix, image_inner, image_norm_check, kernel_k, l2_inner, kernel_section, section_gram_matrix,
    ImageFunction,
};
use crate::specfun::{eigenfunction_g, phi};
use crate::transform::{
    convolve, forward, inverse, plancherel_check, DecayHint, OutputKind, Route, SampledFunction, Spectrum, Transformer,
};

/// Settings shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub cfg: QuadratureConfig,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            cfg: QuadratureConfig::default(),
            seed: 1,
        }
    }
}

/// Outcome of one property.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Property {
    pub name: String,
    /// Largest measured deviation; `null` when the computation itself failed.
    pub max_err: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Property {
    pub fn new(name: &str, tol: f64, measured: Result<f64>) -> Self {
        match measured {
            Ok(e) => Self {
                name: name.to_string(),
                max_err: Some(e),
                tol,
                pass: e.is_finite() && e <= tol,
                error: None,
            },
            Err(err) => Self {
                name: name.to_string(),
                max_err: None,
                tol,
                pass: false,
                error: Some(err.to_string()),
            },
        }
    }
}

/// A suite's properties in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub properties: Vec<Property>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The property suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Specfun,
    Operator,
    Transform,
    Heat,
    Rkhs,
    Green,
    Markov,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Specfun,
        Suite::Operator,
        Suite::Transform,
        Suite::Heat,
        Suite::Rkhs,
        Suite::Green,
        Suite::Markov,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Operator => "operator",
            Suite::Transform => "transform",
            Suite::Heat => "heat",
            Suite::Rkhs => "rkhs",
            Suite::Green => "green",
            Suite::Markov => "markov",
            Suite::All => "all",
        }
    }

    fn properties(self, o: &VerifyOptions) -> Vec<Property> {
        match self {
            Suite::Specfun => vec![
                g_normalization(o),
                g_homogeneity(o),
                phi_closed_form(o),
                g_conjugate_symmetry(o),
                g_dominated_by_g0(o),
            ],
            Suite::Operator => vec![t_eigen_relation(o), t2_eigen_relation(o), radial_generator_even(o)],
            Suite::Transform => vec![
                transform_t2_identity(o),
                plancherel(o),
                plancherel_paired(o),
                inverse_round_trip(o),
                reflection_identity(o),
                convolution_theorem(o),
            ],
            Suite::Heat => vec![
                kernel_mass_formula(o),
                kernel_mass_unit(o),
                kernel_symmetry(o),
                kernel_positivity(o),
                semigroup_law(o),
                chapman_kolmogorov(o),
                heat_equation(o),
                semigroup_routes(o),
                l2_contraction(o),
            ],
            Suite::Rkhs => vec![
                kernel_k_routes(o),
                kernel_k_symmetry(o),
                reproducing_property(o),
                gram_psd(o),
                section_gram_psd(o),
                image_isometry(o),
                g_bounded_by_one(o),
            ],
            Suite::Green => vec![poisson_equation(o), green_routes(o), green_bounded(o), green_linearity(o)],
            Suite::Markov => vec![
                kill_rate(o),
                conditioned_moments(o),
                generator_even(o),
                mass_x_independence(o),
                chapman_kolmogorov_sampled(o),
                path_determinism(o),
            ],
            Suite::All => Suite::EACH
                .iter()
                .flat_map(|s| {
                    s.properties(o).into_iter().map(move |mut p| {
                        p.name = format!("{}.{}", s.name(), p.name);
                        p
                    })
                })
                .collect(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s}")))
    }
}

/// Runs a suite.
pub fn run(suite: Suite, o: &VerifyOptions) -> Report {
    Report {
        suite: suite.name().to_string(),
        properties: suite.properties(o),
    }
}

/// Test functions `q(x) e^{-a(x-c)²}` with exact first and second derivatives.
pub mod battery {
    use super::*;

    /// `q(x) e^{-a(x-c)²}` for the polynomial `q` (ascending coefficients).
    pub fn gauss_poly(q: &[f64], a: f64, c: f64) -> Func<f64> {
        let q0 = q.to_vec();
        let q1: Vec<f64> = q.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
        let q2: Vec<f64> = q1.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect();
        let poly = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, v| acc * x + v);
        let (p0, p1, p2) = (q0.clone(), q1.clone(), q2.clone());
        let f = move |x: f64| poly(&p0, x) * (-a * (x - c) * (x - c)).exp();
        let (p0, p1b) = (q0.clone(), q1.clone());
        let df = move |x: f64| {
            let u = -2.0 * a * (x - c);
            (poly(&p1b, x) + u * poly(&p0, x)) * (-a * (x - c) * (x - c)).exp()
        };
        let d2f = move |x: f64| {
            let u = -2.0 * a * (x - c);
            let (v0, v1, v2) = (poly(&q0, x), poly(&p1, x), poly(&p2, x));
            (v2 + 2.0 * u * v1 + (u * u - 2.0 * a) * v0) * (-a * (x - c) * (x - c)).exp()
        };
        Func::real(f).with_derivative(df).with_second_derivative(d2f)
    }

    /// Five functions of mixed parity: even, odd, mixed, shifted, even.
    pub fn functions() -> Vec<(&'static str, Func<f64>)> {
        vec![
            ("gauss", gauss_poly(&[1.0], 1.0, 0.0)),
            ("odd", gauss_poly(&[0.0, 1.0], 1.0, 0.0)),
            ("mixed", gauss_poly(&[1.0, 0.5], 1.0, 0.0)),
            ("shifted", gauss_poly(&[1.0], 1.0, 0.5)),
            ("hermite", gauss_poly(&[1.0, 0.0, -1.0], 1.0, 0.0)),
        ]
    }

    /// `f` as a sampled function with Schwartz decay.
    pub fn sampled(f: Func<f64>) -> Result<SampledFunction<f64>> {
        SampledFunction::from_func(grid(9, 2.0), f, Some(DecayHint::Schwartz(1.0)))
    }

    /// `n` equispaced points on `[-r, r]`.
    pub fn grid(n: usize, r: f64) -> Vec<f64> {
        (0..n).map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64).collect()
    }
}

use battery::{grid, sampled};

/// Parameter pairs: the closed-form case and a generic pair with the same `ρ`.
pub fn parameter_pairs() -> [JacobiParams<f64>; 2] {
    [
        JacobiParams::new(0.5, -0.5).expect("valid"),
        JacobiParams::new(0.3, -0.3).expect("valid"),
    ]
}

fn rng(o: &VerifyOptions, salt: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(o.seed);
    r.set_stream(salt);
    r
}

fn random_params(r: &mut ChaCha8Rng) -> JacobiParams<f64> {
    let beta: f64 = r.gen_range(-0.5..1.5);
    let alpha = beta + r.gen_range(0.0..1.5);
    JacobiParams::new(alpha.max(-0.49), beta).expect("drawn inside the parameter range")
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m = 0.0f64;
    for v in it {
        let v = v?;
        m = if v.is_nan() { f64::NAN } else { m.max(v) };
    }
    Ok(m)
}

// ---------------------------------------------------------------- specfun

const DRAWS: usize = 200;

pub fn g_normalization(o: &VerifyOptions) -> Property {
    let mut r = rng(o, 1);
    let err = max_of((0..DRAWS).map(|_| {
        let p = random_params(&mut r);
        let l = r.gen_range(-5.0..5.0);
        Ok((eigenfunction_g(&p, l, 0.0)? - 1.0).norm())
    }));
    Property::new("g_normalization", 1e-9, err)
}

pub fn g_homogeneity(o: &VerifyOptions) -> Property {
    let mut r = rng(o, 2);
    let err = max_of((0..DRAWS).map(|_| {
        let p = random_params(&mut r);
        let l = r.gen_range(-3.0..3.0);
        let t = r.gen_range(0.2..2.0);
        let x = r.gen_range(-2.0..2.0);
        Ok((eigenfunction_g(&p, l, t * x)? - eigenfunction_g(&p, l * t, x)?).norm())
    }));
    Property::new("g_homogeneity", 1e-9, err)
}

pub fn phi_closed_form(_: &VerifyOptions) -> Property {
    let p = JacobiParams::new(0.5, -0.5).expect("valid");
    let pts: Vec<f64> = (0..30).map(|i| 0.1 + 2.9 * i as f64 / 29.0).collect();
    let err = max_of(
        pts.iter()
            .flat_map(|&l| pts.iter().map(move |&x| (l, x)))
            .map(|(l, x)| Ok((phi(&p, l, x)? * l * x.sinh() - (l * x).sin()).abs())),
    );
    Property::new("phi_closed_form", 1e-10, err)
}

pub fn g_conjugate_symmetry(o: &VerifyOptions) -> Property {
    let mut r = rng(o, 3);
    let err = max_of((0..DRAWS).map(|_| {
        let p = random_params(&mut r);
        let l = r.gen_range(-5.0..5.0);
        let x = r.gen_range(-3.0..3.0);
        Ok((eigenfunction_g(&p, -l, x)? - eigenfunction_g(&p, l, x)?.conj()).norm())
    }));
    Property::new("g_conjugate_symmetry", 1e-12, err)
}

pub fn g_dominated_by_g0(o: &VerifyOptions) -> Property {
    let mut r = rng(o, 4);
    let err = max_of((0..DRAWS).map(|_| {
        let p = random_params(&mut r);
        let l = r.gen_range(-5.0..5.0);
        let x = r.gen_range(-3.0..3.0);
        let g0 = eigenfunction_g(&p, 0.0, x)?.re;
        Ok((eigenfunction_g(&p, l, x)?.norm() - g0).max(0.0) / g0)
    }));
    Property::new("g_dominated_by_g0", 1e-10, err)
}

// ---------------------------------------------------------------- operator

fn eigen_points() -> Vec<(f64, f64)> {
    let xs = grid(81, 3.0);
    [0.5, 1.0, 2.0]
        .iter()
        .flat_map(|&l| xs.iter().map(move |&x| (l, x)))
        .collect()
}

pub fn t_eigen_relation(_: &VerifyOptions) -> Property {
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        let op = Operator::new(*p);
        eigen_points().into_iter().map(move |(l, x)| {
            let g = eigenfunction(*p, l);
            let gx = g.value(x)?;
            let lhs = op.apply_t(&g, x)?;
            Ok((lhs - Complex::new(0.0, l) * gx).norm() / (l * gx.norm()))
        })
    }));
    Property::new("t_eigen_relation", 1e-6, err)
}

pub fn t2_eigen_relation(_: &VerifyOptions) -> Property {
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        let op = Operator::new(*p);
        eigen_points().into_iter().map(move |(l, x)| {
            let g = eigenfunction(*p, l);
            let gx = g.value(x)?;
            let lhs = op.apply_t2(&g, x)?;
            Ok((lhs + gx * (l * l)).norm() / (l * l * gx.norm()))
        })
    }));
    Property::new("t2_eigen_relation", 1e-5, err)
}

type Real1 = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Even test functions as `(f, f', f'')`.
fn even_functions(p: &JacobiParams<f64>) -> Vec<[Real1; 3]> {
    let rho = p.rho();
    let e = |x: f64| (-x * x).exp();
    vec![
        [
            Box::new(e),
            Box::new(move |x| -2.0 * x * e(x)),
            Box::new(move |x| (4.0 * x * x - 2.0) * e(x)),
        ],
        [
            Box::new(move |x: f64| x.cosh().powf(-rho)),
            Box::new(move |x| -rho * x.tanh() * x.cosh().powf(-rho)),
            Box::new(move |x| {
                let (t, s) = (x.tanh(), 1.0 / x.cosh());
                (rho * rho * t * t - rho * s * s) * x.cosh().powf(-rho)
            }),
        ],
        [Box::new(|_| 2.0), Box::new(|_| 0.0), Box::new(|_| 0.0)],
    ]
}

/// `T² f` from values only against `f'' + ((2α+1) coth x + (2β+1) tanh x) f' + ρ² f`
/// with exact derivatives, for even `f` and `x > 0`.
pub fn radial_generator_even(_: &VerifyOptions) -> Property {
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        let (a, b, rho) = (2.0 * p.alpha() + 1.0, 2.0 * p.beta() + 1.0, p.rho());
        even_functions(p).into_iter().flat_map(move |[f0, f1, f2]| {
            let f0 = std::sync::Arc::new(f0);
            [0.5, 1.0, 2.0].into_iter().map(move |x| {
                let g = f0.clone();
                let values_only = Func::real(move |x| g(x));
                let (lhs, _) = radial_generator_check(p, &values_only, x)?;
                let rhs = f2(x) + (a / x.tanh() + b * x.tanh()) * f1(x) + rho * rho * f0(x);
                Ok((lhs - rhs).abs())
            })
        })
    }));
    Property::new("radial_generator_even", 1e-8, err)
}

// ---------------------------------------------------------------- transform

const SPOT_LAMBDAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

pub fn transform_t2_identity(o: &VerifyOptions) -> Property {
    let cfg = o.cfg;
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        battery::functions().into_iter().map(move |(_, f)| {
            let op = Operator::new(*p);
            let t2 = {
                let f = f.clone();
                Func::try_new(move |x| op.apply_t2(&f, x))
            };
            let hf = forward(p, &sampled(f)?, &SPOT_LAMBDAS, &cfg)?;
            let ht2 = forward(p, &sampled(t2)?, &SPOT_LAMBDAS, &cfg)?;
            let scale = hf.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
            max_of(
                SPOT_LAMBDAS
                    .iter()
                    .zip(hf.values().iter().zip(ht2.values()))
                    .map(|(&l, (h, h2))| Ok((h2 + h * (l * l)).norm() / (scale * (1.0 + l * l)))),
            )
        })
    }));
    Property::new("transform_t2_identity", 1e-5, err)
}

fn plancherel_errors(o: &VerifyOptions, paired: bool) -> Result<f64> {
    max_of(parameter_pairs().iter().flat_map(|p| {
        battery::functions().into_iter().map(move |(_, f)| {
            let c = plancherel_check(p, &sampled(f)?, &o.cfg)?;
            let rhs = if paired { c.paired } else { c.rhs };
            Ok((c.lhs - rhs).abs() / c.lhs)
        })
    }))
}

/// `‖f‖² = ∫ |ℋf|² dσ` over the battery.
pub fn plancherel(o: &VerifyOptions) -> Property {
    Property::new("plancherel", 1e-5, plancherel_errors(o, false))
}

/// `‖f‖² = ∫ ℋf(λ) conj(ℋf̌(-λ)) dσ` over the battery.
pub fn plancherel_paired(o: &VerifyOptions) -> Property {
    Property::new("plancherel_paired", 1e-5, plancherel_errors(o, true))
}

pub fn inverse_round_trip(o: &VerifyOptions) -> Property {
    let cfg = o.cfg;
    let xs = grid(9, 2.0);
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        let xs = xs.clone();
        battery::functions().into_iter().map(move |(_, f)| {
            let s = sampled(f.clone())?;
            let hf = Transformer::new(p, &s, &cfg)?;
            let back = inverse(p, &hf, &xs, OutputKind::Complex, &cfg)?;
            max_of(
                xs.iter()
                    .zip(back.function.values())
                    .map(|(&x, v)| Ok((v - f.value(x)?).norm())),
            )
        })
    }));
    Property::new("inverse_round_trip", 1e-6, err)
}

/// `ℋf̌(-λ) = ℋf(λ)`, relative to `max |ℋf|`.
pub fn reflection_identity(o: &VerifyOptions) -> Property {
    let cfg = o.cfg;
    let neg: Vec<f64> = SPOT_LAMBDAS.iter().rev().map(|l| -l).collect();
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        let neg = neg.clone();
        battery::functions().into_iter().map(move |(_, f)| {
            let s = sampled(f)?;
            let hf = forward(p, &s, &SPOT_LAMBDAS, &cfg)?;
            let hr = forward(p, &s.reflected()?, &neg, &cfg)?;
            let scale = hf.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
            max_of(
                hf.values()
                    .iter()
                    .zip(hr.values().iter().rev())
                    .map(|(a, b)| Ok((a - b).norm() / scale)),
            )
        })
    }));
    Property::new("reflection_identity", 1e-8, err)
}

/// `ℋ(f * g) = ℋf ℋg`, with `f * g` checked against its defining integral.
pub fn convolution_theorem(o: &VerifyOptions) -> Property {
    let cfg = o.cfg;
    let xs = [-1.0, 0.0, 0.5, 1.5];
    let err = max_of(parameter_pairs().iter().map(|p| {
        let f = sampled(battery::gauss_poly(&[1.0, 0.5], 1.0, 0.0))?;
        let g = sampled(battery::gauss_poly(&[1.0], 2.0, 0.0))?;
        let spectral = convolve(p, &f, &g, &xs, Route::Spectral, &cfg)?;
        let direct = convolve(p, &f, &g, &xs, Route::Direct, &cfg)?;
        let routes = max_of(
            spectral
                .function
                .values()
                .iter()
                .zip(direct.function.values())
                .map(|(a, b)| Ok((a - b).norm())),
        )?;
        let conv = spectral.function.resample(grid(9, 2.0))?;
        let (hfg, hf, hg) = (
            Transformer::new(p, &conv, &cfg)?,
            Transformer::new(p, &f, &cfg)?,
            Transformer::new(p, &g, &cfg)?,
        );
        let product = max_of(
            SPOT_LAMBDAS
                .iter()
                .map(|&l| Ok((hfg.eval(l)? - hf.eval(l)? * hg.eval(l)?).norm())),
        )?;
        Ok(routes.max(product))
    }));
    Property::new("convolution_theorem", 1e-5, err)
}

// ---------------------------------------------------------------- heat

const MASS_TIMES: [f64; 3] = [0.5, 1.0, 2.0];
const MASS_POINTS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn masses(o: &VerifyOptions) -> Result<Vec<(JacobiParams<f64>, f64, f64)>> {
    let mut out = Vec::new();
    for p in parameter_pairs() {
        for t in MASS_TIMES {
            for x in MASS_POINTS {
                out.push((p, t, kernel_mass(&p, t, x, &o.cfg)?.value));
            }
        }
    }
    Ok(out)
}

/// `∫ p_t(x, y) A(y) dy = e^{-tρ²/2}`.
pub fn kernel_mass_formula(o: &VerifyOptions) -> Property {
    let err = masses(o).map(|ms| {
        ms.iter()
            .map(|(p, t, m)| (m - formula_mass(p, *t)).abs())
            .fold(0.0, f64::max)
    });
    Property::new("kernel_mass_formula", 1e-6, err)
}

/// `∫ p_t(x, y) A(y) dy = 1`.
pub fn kernel_mass_unit(o: &VerifyOptions) -> Property {
    let err = masses(o).map(|ms| ms.iter().map(|(_, _, m)| (m - 1.0).abs()).fold(0.0, f64::max));
    Property::new("kernel_mass_unit", 1e-6, err)
}

fn scan_fields(o: &VerifyOptions) -> Result<Vec<HeatKernelField<f64>>> {
    let xs = grid(9, 2.0);
    let mut out = Vec::new();
    for p in parameter_pairs() {
        for t in [0.5, 1.0] {
            out.push(HeatKernelField::compute(&p, t, &xs, &xs, &o.cfg)?);
        }
    }
    Ok(out)
}

/// `p_t(x, y) = p_t(-y, -x)` on a symmetric 9×9 grid.
pub fn kernel_symmetry(o: &VerifyOptions) -> Property {
    let err = scan_fields(o).map(|fields| {
        let mut m = 0.0f64;
        for f in &fields {
            let n = f.xs.len();
            for i in 0..n {
                for j in 0..n {
                    // xs is symmetric, so -ys[j] = xs[n-1-j]
                    m = m.max((f.values[i][j] - f.values[n - 1 - j][n - 1 - i]).abs());
                }
            }
        }
        m
    });
    Property::new("kernel_symmetry", 1e-8, err)
}

/// `p_t > 0` on the scan grid; the deviation is `max(0, -min p_t)`.
pub fn kernel_positivity(o: &VerifyOptions) -> Property {
    let err = scan_fields(o).map(|fields| {
        let min = fields.iter().map(|f| f.min_value()).fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            0.0
        } else {
            -min + f64::MIN_POSITIVE
        }
    });
    Property::new("kernel_positivity", 0.0, err)
}

fn mixed_input() -> Result<SampledFunction<f64>> {
    sampled(battery::gauss_poly(&[1.0, 0.5], 1.0, 0.0))
}

/// `‖P_{t+s} f - P_t P_s f‖∞` on the evaluation grid.
pub fn semigroup_law(o: &VerifyOptions) -> Property {
    let cfg = o.cfg;
    let xs = grid(9, 2.0);
    let err = max_of(parameter_pairs().iter().map(|p| {
        let f = mixed_input()?;
        let whole = semigroup_apply(p, 0.8, &f, &xs, SemigroupRoute::Spectral, &cfg)?;
        let first = semigroup_apply(p, 0.3, &f, &xs, SemigroupRoute::Spectral, &cfg)?;
        let second = semigroup_apply(p, 0.5, &first.output, &xs, SemigroupRoute::Spectral, &cfg)?;
        max_of(
            whole
                .output
                .values()
                .iter()
                .zip(second.output.values())
                .map(|(a, b)| Ok((a - b).norm())),
        )
    }));
    Property::new("semigroup_law", 1e-5, err)
}

/// `p_{t+s}(x, y) = ∫ p_t(x, z) p_s(z, y) A(z) dz`, relative.
pub fn chapman_kolmogorov(o: &VerifyOptions) -> Property {
    let spots = [(0.4, 0.6, 0.3, -0.5), (0.5, 0.5, -1.0, 0.8), (0.3, 0.7, 1.2, 1.0)];
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        spots.iter().map(move |&(t, s, x, y)| {
            let c = chapman_kolmogorov_check(p, t, s, x, y, &o.cfg)?;
            Ok((c.lhs - c.rhs).abs() / c.lhs.abs())
        })
    }));
    Property::new("chapman_kolmogorov", 1e-4, err)
}

/// `|∂_t u - ½(T² - ρ²) u| / (1 + |u|)` at 12 seeded space–time points for
/// each of `F_t`, `p_t(·, y)` and `P_t f`.
pub fn heat_equation(o: &VerifyOptions) -> Property {
    let mut r = rng(o, 5);
    let f = mixed_input();
    let points: Vec<(usize, f64, f64, f64)> = (0..12)
        .map(|k| (k % 2, r.gen_range(0.3..1.5), r.gen_range(-2.0..2.0), r.gen_range(-1.5..1.5)))
        .collect();
    let err = f.and_then(|f| {
        let pairs = parameter_pairs();
        max_of(points.iter().flat_map(|&(pi, t, x, y)| {
            let p = pairs[pi];
            let f = f.clone();
            (0..3).map(move |kind| {
                let source = match kind {
                    0 => HeatSource::Fundamental,
                    1 => HeatSource::Kernel { y },
                    _ => HeatSource::Semigroup(&f),
                };
                let res = heat_residual(&p, t, x, source, &o.cfg)?;
                Ok(res.residual.abs() / (1.0 + res.u.abs()))
            })
        }))
    });
    Property::new("heat_equation", 1e-4, err)
}

/// `P_t f` by the spectral route against `f * F_t` by the direct integral.
pub fn semigroup_routes(o: &VerifyOptions) -> Property {
    let cfg = o.cfg;
    let xs = grid(7, 1.5);
    let err = max_of(parameter_pairs().iter().map(|p| {
        let f = mixed_input()?;
        let a = semigroup_apply(p, 0.8, &f, &xs, SemigroupRoute::Spectral, &cfg)?;
        let b = semigroup_apply(p, 0.8, &f, &xs, SemigroupRoute::Convolution, &cfg)?;
        max_of(
            a.output
                .values()
                .iter()
                .zip(b.output.values())
                .map(|(u, v)| Ok((u - v).norm())),
        )
    }));
    Property::new("semigroup_routes", 1e-6, err)
}

/// `‖P_t f‖ ≤ ‖f‖` in `L²(A)`; the deviation is the relative excess.
pub fn l2_contraction(o: &VerifyOptions) -> Property {
    let xs = grid(9, 2.0);
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        let xs = xs.clone();
        battery::functions().into_iter().map(move |(_, f)| {
            let s = sampled(f)?;
            let u = semigroup_apply(p, 0.5, &s, &xs, SemigroupRoute::Spectral, &o.cfg)?.output;
            let nf = l2_inner(p, &s, &s, &o.cfg)?.re;
            let nu = l2_inner(p, &u, &u, &o.cfg)?.re;
            Ok(((nu - nf) / nf).max(0.0))
        })
    }));
    Property::new("l2_contraction", 1e-8, err)
}

// ---------------------------------------------------------------- rkhs

const RKHS_T: f64 = 0.5;
const GRAM_NODES: [f64; 6] = [-1.2, -0.5, 0.0, 0.4, 0.9, 1.6];

/// `K_t(z, u)` against `∫ p_t(-z, w) p_t(w, u) A(w) dw`.
pub fn kernel_k_routes(o: &VerifyOptions) -> Property {
    let spots = [(0.0, 0.0), (0.4, -0.9), (-1.2, 0.5), (1.0, 1.5)];
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        spots.iter().map(move |&(z, u)| {
            let a = kernel_k(p, RKHS_T, z, u, &o.cfg)?.value;
            let b = chapman_kolmogorov_check(p, RKHS_T, RKHS_T, -z, u, &o.cfg)?.rhs;
            Ok((a - b).abs())
        })
    }));
    Property::new("kernel_k_routes", 1e-8, err)
}

/// `K_t(z, u)` against `K_t(u, z)` computed as a composition integral.
pub fn kernel_k_symmetry(o: &VerifyOptions) -> Property {
    let spots = [(0.4, -0.9), (-1.2, 0.5), (1.0, 1.5)];
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        spots.iter().map(move |&(z, u)| {
            let a = kernel_k(p, RKHS_T, z, u, &o.cfg)?.value;
            let b = chapman_kolmogorov_check(p, RKHS_T, RKHS_T, -u, z, &o.cfg)?.rhs;
            Ok((a - b).abs())
        })
    }));
    Property::new("kernel_k_symmetry", 1e-8, err)
}

/// `|F(u) - ⟨f, p_t(-u, -·)⟩| / (1 + |F(u)|)` for `F = P_t f`.
pub fn reproducing_property(o: &VerifyOptions) -> Property {
    let us = [-1.0, 0.0, 0.7, 2.0];
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        [
            battery::gauss_poly(&[1.0], 1.0, 0.0),
            battery::gauss_poly(&[1.0, 0.5], 1.0, 0.0),
        ]
        .into_iter()
        .map(move |f| {
            let img = ImageFunction::new(*p, RKHS_T, sampled(f)?)?;
            let values = img.values(&us, &o.cfg)?;
            max_of(us.iter().zip(&values).map(|(&u, v)| {
                let section = kernel_section(p, RKHS_T, u, &o.cfg)?;
                let inner = image_inner(&img, &section, &o.cfg)?;
                Ok((v.re - inner).abs() / (1.0 + v.re.abs()))
            }))
        })
    }));
    Property::new("reproducing_property", 1e-6, err)
}

fn psd_deviation(ev: &[f64], scale: f64) -> f64 {
    (-ev[0] / scale).max(0.0)
}

/// `min eig(K_t(u_i, u_j)) ≥ -1e-8 ‖M‖` for the kernel `p_{2t}(-z, u)`.
pub fn gram_psd(o: &VerifyOptions) -> Property {
    let err = max_of(parameter_pairs().iter().map(|p| {
        let g = gram_matrix(p, RKHS_T, &GRAM_NODES, &o.cfg)?;
        Ok(psd_deviation(&g.eigenvalues(), g.norm_max()))
    }));
    Property::new("gram_psd", 1e-8, err)
}

/// The same for the Gram matrix of the kernel sections, `p_{2t}(z, u)`.
pub fn section_gram_psd(o: &VerifyOptions) -> Property {
    let err = max_of(parameter_pairs().iter().map(|p| {
        let g = section_gram_matrix(p, RKHS_T, &GRAM_NODES, &o.cfg)?;
        Ok(psd_deviation(&g.eigenvalues(), g.norm_max()))
    }));
    Property::new("section_gram_psd", 1e-8, err)
}

/// `‖P_t f‖²_{L²(A)}` by quadrature in `x` against its spectral form.
pub fn image_isometry(o: &VerifyOptions) -> Property {
    let err = max_of(parameter_pairs().iter().map(|p| {
        let img = ImageFunction::new(*p, RKHS_T, mixed_input()?)?;
        let n = image_norm_check(&img, &o.cfg)?;
        Ok((n.direct - n.spectral).abs() / n.direct)
    }));
    Property::new("image_isometry", 1e-5, err)
}

/// `|G_λ(x)| ≤ 1`; the deviation is the largest excess over 1.
pub fn g_bounded_by_one(o: &VerifyOptions) -> Property {
    let mut r = rng(o, 6);
    let err = max_of((0..DRAWS).map(|_| {
        let p = random_params(&mut r);
        let l = r.gen_range(-5.0..5.0);
        let x = r.gen_range(-3.0..3.0);
        Ok((eigenfunction_g(&p, l, x)?.norm() - 1.0).max(0.0))
    }));
    Property::new("g_bounded_by_one", 1e-10, err)
}

// ---------------------------------------------------------------- green

/// `‖½(T² - ρ²) 𝒢f + f‖∞` on `[-2, 2]` over the battery.
pub fn poisson_equation(o: &VerifyOptions) -> Property {
    let xs = grid(9, 2.0);
    let err = max_of(parameter_pairs().iter().flat_map(|p| {
        let xs = xs.clone();
        battery::functions().into_iter().map(move |(_, f)| {
            let s = sampled(f)?;
            let u = green_apply(p, &s, &xs, &o.cfg)?;
            let res = poisson_residual(p, &s, &u.function, &xs)?;
            Ok(res.iter().fold(0.0f64, |m, r| m.max(r.norm())))
        })
    }));
    Property::new("poisson_equation", 1e-4, err)
}

/// Spectral route against the time integral of the semigroup.
pub fn green_routes(o: &VerifyOptions) -> Property {
    let xs = grid(9, 2.0);
    let err = max_of(parameter_pairs().iter().map(|p| {
        let s = mixed_input()?;
        let u = green_apply(p, &s, &xs, &o.cfg)?;
        let v = green_time_integral(p, &s, &xs, &o.cfg)?;
        max_of(u.function.values().iter().zip(&v).map(|(a, b)| Ok((a - b).norm())))
    }));
    Property::new("green_routes", 1e-3, err)
}

/// `max |𝒢f| ≤ 2 ∫ |ℋf| / (λ² + ρ²) d|σ|`; the deviation is the excess.
pub fn green_bounded(o: &VerifyOptions) -> Property {
    let xs = grid(9, 2.0);
    let err = max_of(parameter_pairs().iter().map(|p| {
        let s = mixed_input()?;
        let u = green_apply(p, &s, &xs, &o.cfg)?;
        let bound = green_bound(p, &s, &o.cfg)?;
        let sup = u.function.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
        Ok((sup - bound).max(0.0))
    }));
    Property::new("green_bounded", 1e-8, err)
}

/// `𝒢(f - 2g) = 𝒢f - 2𝒢g`.
pub fn green_linearity(o: &VerifyOptions) -> Property {
    let xs = grid(5, 1.5);
    let p = parameter_pairs()[1];
    let err = (|| {
        let f = sampled(battery::gauss_poly(&[1.0], 1.0, 0.0))?;
        let g = sampled(battery::gauss_poly(&[0.0, 1.0], 1.0, 0.0))?;
        let h = sampled(battery::gauss_poly(&[1.0, -2.0], 1.0, 0.0))?;
        let (uf, ug, uh) = (
            green_apply(&p, &f, &xs, &o.cfg)?,
            green_apply(&p, &g, &xs, &o.cfg)?,
            green_apply(&p, &h, &xs, &o.cfg)?,
        );
        max_of((0..xs.len()).map(|i| {
            let lin = uf.function.values()[i] - ug.function.values()[i] * 2.0;
            Ok((uh.function.values()[i] - lin).norm())
        }))
    })();
    Property::new("green_linearity", 1e-9, err)
}

// ---------------------------------------------------------------- markov

const MC_SAMPLES: usize = 100_000;
const MC_T: f64 = 1.0;
const MC_X: f64 = 0.5;

fn mc_table(o: &VerifyOptions) -> Result<TransitionTable> {
    TransitionTable::with_auto_grid(&parameter_pairs()[0], MC_T, &[MC_X], MassReference::Measured, &o.cfg)
}

fn one_step_samples(o: &VerifyOptions, table: &TransitionTable) -> Result<Vec<Option<f64>>> {
    let paths = simulate_paths(table, MC_X, 1, MC_SAMPLES, o.seed)?;
    Ok(paths.into_iter().map(|s| s.states[1]).collect())
}

/// Kill rate against `1 - e^{-tρ²/2}`, in standard errors.
pub fn kill_rate(o: &VerifyOptions) -> Property {
    let err = (|| {
        let table = mc_table(o)?;
        let samples = one_step_samples(o, &table)?;
        let killed = samples.iter().filter(|s| s.is_none()).count() as f64;
        let n = samples.len() as f64;
        let expected = 1.0 - formula_mass(table.params(), MC_T);
        let se = (expected * (1.0 - expected) / n).sqrt();
        Ok((killed / n - expected).abs() / se)
    })();
    Property::new("kill_rate", 3.0, err)
}

/// Moments of `y`, `y²` and `e^{-y²}` over surviving steps against
/// quadrature of the kernel slice, in standard errors.
pub fn conditioned_moments(o: &VerifyOptions) -> Property {
    let err = (|| {
        let table = mc_table(o)?;
        let ys: Vec<f64> = one_step_samples(o, &table)?.into_iter().flatten().collect();
        let hs: [&dyn Fn(f64) -> f64; 3] = [&|y| y, &|y| y * y, &|y| (-y * y).exp()];
        let (_, expect) = kernel_expectations(table.params(), MC_T, MC_X, &hs, &o.cfg)?;
        max_of(hs.iter().zip(expect).map(|(h, e)| {
            let v: Vec<f64> = ys.iter().map(|&y| h(y)).collect();
            let (m, se) = mean_and_standard_error(&v);
            Ok((m - e).abs() / se)
        }))
    })();
    Property::new("conditioned_moments", 3.0, err)
}

/// `T² f = f'' + (A'/A) f' + ρ² f` for even `f`.
pub fn generator_even(o: &VerifyOptions) -> Property {
    let mut p = radial_generator_even(o);
    p.name = "generator_even".into();
    p
}

/// Largest relative spread of the kernel mass over the table's `x` nodes.
pub fn mass_x_independence(o: &VerifyOptions) -> Property {
    let err = (|| {
        let p = parameter_pairs()[1];
        let table = TransitionTable::with_auto_grid(&p, 0.5, &grid(5, 2.0), MassReference::Measured, &o.cfg)?;
        let m = table.masses();
        let mean = m.iter().sum::<f64>() / m.len() as f64;
        Ok(m.iter().map(|v| (v - mean).abs() / mean).fold(0.0, f64::max))
    })();
    Property::new("mass_x_independence", 1e-5, err)
}

const CK_SAMPLES: usize = 20_000;
/// 1% critical value of the scaled two-sample Kolmogorov–Smirnov statistic.
const KS_CRITICAL_1PCT: f64 = 1.628;

fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d * (n * m / (n + m)).sqrt()
}

/// Surviving states after two steps of `t` against one step of `2t`, as the
/// scaled two-sample KS statistic; the tolerance is its 1% critical value.
pub fn chapman_kolmogorov_sampled(o: &VerifyOptions) -> Property {
    let err = (|| {
        let p = parameter_pairs()[0];
        let (t, x0) = (0.25, 0.3);
        let nodes = crate::markov::simulation_nodes(&p, t, 2, x0, 0.1);
        let small = TransitionTable::with_auto_grid(&p, t, &nodes, MassReference::Measured, &o.cfg)?;
        let big = TransitionTable::with_auto_grid(&p, 2.0 * t, &[x0], MassReference::Measured, &o.cfg)?;
        let two: Vec<f64> = simulate_paths(&small, x0, 2, CK_SAMPLES, o.seed)?
            .iter()
            .filter_map(|s| s.states[2])
            .collect();
        let one: Vec<f64> = simulate_paths(&big, x0, 1, CK_SAMPLES, o.seed.wrapping_add(1))?
            .iter()
            .filter_map(|s| s.states[1])
            .collect();
        Ok(ks_statistic(two, one))
    })();
    Property::new("chapman_kolmogorov_sampled", KS_CRITICAL_1PCT, err)
}

/// Two simulations with the same seed agree exactly.
pub fn path_determinism(o: &VerifyOptions) -> Property {
    let err = (|| {
        let table = mc_table(o)?;
        let a = simulate_paths(&table, MC_X, 1, 200, o.seed)?;
        let b = simulate_paths(&table, MC_X, 1, 200, o.seed)?;
        Ok(if a == b { 0.0 } else { 1.0 })
    })();
    Property::new("path_determinism", 0.0, err)
}
