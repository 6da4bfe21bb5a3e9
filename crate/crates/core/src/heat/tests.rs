use approx::assert_relative_eq;
use num_complex::Complex;

use super::*;
use crate::operator::Func;
use crate::transform::DecayHint;

fn p_half() -> JacobiParams<f64> {
    JacobiParams::new(0.5, -0.5).unwrap()
}

fn p_moderate() -> JacobiParams<f64> {
    JacobiParams::new(0.7, -0.2).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_tolerances(1e-10, 1e-12)
}

fn bump() -> SampledFunction<f64> {
    let grid: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
    SampledFunction::from_func(
        grid,
        Func::real(|x: f64| (-x * x).exp() * (1.0 + 0.5 * x)),
        Some(DecayHint::Schwartz(1.0)),
    )
    .unwrap()
}

#[test]
fn fundamental_solution_is_positive() {
    let p = p_half();
    let f0 = fundamental_solution(&p, 1.0, 0.0, &cfg()).unwrap();
    assert_relative_eq!(f0.value, 0.241970724519143, max_relative = 1e-8);
    for x in [-2.0, -0.7, 0.3, 1.5] {
        assert!(fundamental_solution(&p, 0.5, x, &cfg()).unwrap().value > 0.0);
    }
}

#[test]
fn kernel_symmetry_and_field() {
    let c = cfg();
    for p in [p_half(), p_moderate()] {
        let xs = [-1.0, 0.0, 0.6];
        let ys = [-0.8, 0.2, 1.1];
        let field = HeatKernelField::compute(&p, 0.5, &xs, &ys, &c).unwrap();
        assert!(field.min_value() > 0.0);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let v = heat_kernel(&p, 0.5, x, y, &c).unwrap().value;
                let w = heat_kernel(&p, 0.5, -y, -x, &c).unwrap().value;
                assert!((v - w).abs() < 1e-9, "({x}, {y}): {v} vs {w}");
                assert!((v - field.values[i][j]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn kernel_mass_is_one() {
    let c = cfg();
    for p in [p_half(), p_moderate()] {
        for (t, x) in [(0.5, 0.0), (1.0, 1.0)] {
            let m = kernel_mass(&p, t, x, &c).unwrap().value;
            assert!((m - 1.0).abs() < 1e-6, "t {t} x {x}: mass {m}");
            let rho = p.rho();
            assert!((m - (-t * rho * rho / 2.0).exp()).abs() > 0.1);
        }
    }
}

#[test]
fn semigroup_law_and_routes() {
    let p = p_half();
    let c = cfg();
    let f = bump();
    let xs: Vec<f64> = (0..7).map(|i| -1.5 + 0.5 * i as f64).collect();
    let ts = semigroup_apply(&p, 0.8, &f, &xs, SemigroupRoute::Spectral, &c).unwrap();
    let conv = semigroup_apply(&p, 0.8, &f, &xs, SemigroupRoute::Convolution, &c).unwrap();
    for (a, b) in ts.output.values().iter().zip(conv.output.values()) {
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
    }
    let first = semigroup_apply(&p, 0.3, &f, &xs, SemigroupRoute::Spectral, &c).unwrap();
    let second = semigroup_apply(&p, 0.5, &first.output, &xs, SemigroupRoute::Spectral, &c).unwrap();
    for (a, b) in ts.output.values().iter().zip(second.output.values()) {
        assert!((a - b).norm() < 1e-7, "{a} vs {b}");
    }
    let id = semigroup_apply(&p, 0.0, &f, &xs, SemigroupRoute::Spectral, &c).unwrap();
    for (&x, v) in xs.iter().zip(id.output.values()) {
        assert_eq!(*v, Complex::new((-x * x).exp() * (1.0 + 0.5 * x), 0.0));
    }
}

#[test]
fn heat_equation_residuals() {
    let c = cfg();
    let f = bump();
    for p in [p_half(), p_moderate()] {
        for x in [-0.9, 0.4, 1.3] {
            for source in [HeatSource::Fundamental, HeatSource::Kernel { y: 0.5 }, HeatSource::Semigroup(&f)] {
                let r = heat_residual(&p, 0.7, x, source, &c).unwrap();
                assert!(r.residual.abs() < 1e-4 * (1.0 + r.u.abs()), "{source:?} at {x}: {r:?}");
            }
        }
    }
}

#[test]
fn chapman_kolmogorov() {
    let c = cfg();
    for p in [p_half(), p_moderate()] {
        let ck = chapman_kolmogorov_check(&p, 0.4, 0.6, 0.3, -0.5, &c).unwrap();
        assert_relative_eq!(ck.lhs, ck.rhs, max_relative = 1e-6);
    }
}

#[test]
fn field_json_round_trip() {
    let field = HeatKernelField::compute(&p_half(), 1.0, &[0.0, 1.0], &[0.5], &cfg()).unwrap();
    let mut buf = Vec::new();
    field.write_json(&mut buf).unwrap();
    let back = HeatKernelField::read_json(buf.as_slice()).unwrap();
    assert_eq!(back, field);
}
