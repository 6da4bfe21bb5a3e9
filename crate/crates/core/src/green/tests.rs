use super::*;
use crate::operator::{eigenfunction, Func};
use crate::transform::DecayHint;

fn p_half() -> JacobiParams<f64> {
    JacobiParams::new(0.5, -0.5).unwrap()
}

fn p_generic() -> JacobiParams<f64> {
    JacobiParams::new(1.3, 0.4).unwrap()
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_tolerances(1e-10, 1e-12)
}

fn grid(n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|i| -r + 2.0 * r * i as f64 / (n - 1) as f64).collect()
}

fn schwartz(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SampledFunction<f64> {
    SampledFunction::from_func(grid(9, 2.0), Func::real(f), Some(DecayHint::Schwartz(1.0))).unwrap()
}

#[test]
fn poisson_equation_and_routes() {
    let c = cfg();
    let xs = grid(9, 2.0);
    for p in [p_half(), p_generic()] {
        let f = schwartz(|x| (-x * x).exp() * (1.0 + 0.5 * x));
        let u = green_apply(&p, &f, &xs, &c).unwrap();
        let res = poisson_residual(&p, &f, &u.function, &xs).unwrap();
        let worst = res.iter().fold(0.0f64, |m, r| m.max(r.norm()));
        assert!(worst < 1e-6, "residual {worst}");
        let by_time = green_time_integral(&p, &f, &xs, &c).unwrap();
        for (a, b) in u.function.values().iter().zip(&by_time) {
            assert!((a - b).norm() < 1e-6, "{a} vs {b}");
        }
        let bound = green_bound(&p, &f, &c).unwrap();
        assert!(u.function.values().iter().all(|v| v.norm() <= bound));
    }
}

#[test]
fn zero_and_linearity() {
    let c = cfg();
    let p = p_half();
    let xs = grid(5, 1.5);
    let zero = schwartz(|_| 0.0);
    let u0 = green_apply(&p, &zero, &xs, &c).unwrap();
    assert!(u0.function.values().iter().all(|v| v.norm() == 0.0));
    let f = schwartz(|x| (-x * x).exp());
    let g = schwartz(|x| x * (-x * x).exp());
    let h = schwartz(|x| (-x * x).exp() - 2.0 * x * (-x * x).exp());
    let (uf, ug, uh) = (
        green_apply(&p, &f, &xs, &c).unwrap(),
        green_apply(&p, &g, &xs, &c).unwrap(),
        green_apply(&p, &h, &xs, &c).unwrap(),
    );
    for i in 0..xs.len() {
        let lin = uf.function.values()[i] - ug.function.values()[i] * 2.0;
        assert!((uh.function.values()[i] - lin).norm() < 1e-9);
    }
}

#[test]
fn single_mode_residual() {
    let p = p_generic();
    let l0 = 1.3f64;
    let k = 0.5 * (l0 * l0 + p.rho() * p.rho());
    let u = eigenfunction(p, l0);
    let f = Func::try_new(move |x| Ok(crate::specfun::eigenfunction_g(&p, l0, x)? * k));
    let res = poisson_residual(&p, &f, &u, &[-1.5, -0.2, 0.7, 2.0]).unwrap();
    for r in res {
        assert!(r.norm() < 1e-6, "{r}");
    }
}
