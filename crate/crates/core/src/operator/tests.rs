use super::*;
use crate::specfun::eigenfunction_g;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn p(a: f64, b: f64) -> JacobiParams<f64> {
    JacobiParams::new(a, b).unwrap()
}

fn gauss() -> Func<f64> {
    Func::real(|x: f64| (-x * x).exp())
        .with_derivative(|x| -2.0 * x * (-x * x).exp())
        .with_second_derivative(|x| (4.0 * x * x - 2.0) * (-x * x).exp())
        .with_parity(Parity::Even)
}

#[test]
fn constants() {
    for q in [p(0.5, -0.5), p(1.3, 0.4)] {
        let c = Func::real(|_x: f64| 2.5);
        let rho = q.rho();
        for &x in &[-1.0, 0.0, 0.3, 2.0] {
            assert!((apply_t(&q, &c, x).unwrap().re + rho * 2.5).abs() < 1e-9);
            assert!((apply_t2(&q, &c, x).unwrap().re - rho * rho * 2.5).abs() < 1e-8);
            assert!(laplacian(&q, &c, x).unwrap().norm() < 1e-8);
        }
    }
}

#[test]
fn identity_function() {
    let q = p(0.5, -0.5);
    let f = Func::real(|x: f64| x).with_derivative(|_| 1.0).with_second_derivative(|_| 0.0);
    let want = 2.0 + 2.0 / 1.0f64.tanh();
    assert_relative_eq!(apply_t(&q, &f, 1.0).unwrap().re, want, max_relative = 1e-14);
    // without callbacks the finite differences reproduce it
    let g = Func::real(|x: f64| x);
    assert_relative_eq!(apply_t(&q, &g, 1.0).unwrap().re, want, max_relative = 1e-11);
}

#[test]
fn gaussian_at_origin() {
    let q = p(0.5, -0.5);
    let f = gauss();
    assert_relative_eq!(apply_t2(&q, &f, 0.0).unwrap().re, -5.0, max_relative = 1e-14);
    assert_relative_eq!(laplacian(&q, &f, 0.0).unwrap().re, -3.0, max_relative = 1e-14);
    let plain = Func::real(|x: f64| (-x * x).exp());
    assert_relative_eq!(apply_t2(&q, &plain, 0.0).unwrap().re, -5.0, max_relative = 1e-9);
    // crossing x_switch changes the evaluation branch but not the value
    let inside = Operator::new(q).apply_t2(&plain, 0.999e-3).unwrap().re;
    let outside = Operator::new(q).with_x_switch(1e-7).apply_t2(&plain, 0.999e-3).unwrap().re;
    assert!((inside - outside).abs() < 1e-8, "{inside} {outside}");
}

#[test]
fn c2rho_condition() {
    let q = p(0.5, -0.5);
    assert!(check_condition_c2rho(&q, &gauss(), 0.0).unwrap());
    let f = gauss();
    assert_relative_eq!(f.second_derivative(0.0).unwrap().unwrap().re + 1.0, -1.0);
    assert!(!check_condition_c2rho(&q, &Func::real(|_x: f64| 1.0), 0.7).unwrap());
    assert!(check_condition_c2rho(&q, &Func::real(|x: f64| x * x), 0.0).unwrap());
}

#[test]
fn missing_derivatives_are_reported() {
    let q = p(0.5, -0.5);
    let op = Operator::new(q).without_finite_differences();
    let f = Func::real(|x: f64| x.sin());
    assert!(matches!(op.apply_t(&f, 0.3), Err(Error::DerivativeUnavailable)));
    let g = Func::real(|x: f64| x.sin()).with_derivative(|x| x.cos());
    assert!(op.apply_t(&g, 0.3).is_ok());
    assert!(matches!(op.apply_t2(&g, 0.3), Err(Error::DerivativeUnavailable)));
}

#[test]
fn eigenfunction_relations() {
    for q in [p(0.5, -0.5), p(1.3, 0.4)] {
        for &l in &[0.5, 1.0, 2.0] {
            let g = eigenfunction(q, l);
            for i in 0..81 {
                let x = -3.0 + 6.0 * i as f64 / 80.0;
                let gx = eigenfunction_g(&q, l, x).unwrap();
                let t1 = apply_t(&q, &g, x).unwrap();
                let e1 = (t1 - Complex::new(0.0, l) * gx).norm();
                assert!(e1 <= 1e-6 * (1.0 + gx.norm()), "T: lambda={l} x={x} err={e1}");
                let t2 = apply_t2(&q, &g, x).unwrap();
                let e2 = (t2 + gx * (l * l)).norm();
                assert!(e2 <= 1e-5 * (1.0 + gx.norm()), "T2: lambda={l} x={x} err={e2}");
            }
        }
    }
}

#[test]
fn maximum_principle_at_origin() {
    for q in [p(0.5, -0.5), p(1.3, 0.4), p(0.0, 0.0)] {
        let rho = q.rho();
        for k in 0..5 {
            let c = 0.5 * rho * rho * (1.0 + k as f64);
            let f = Func::real(move |x: f64| (-c * x * x).exp())
                .with_derivative(move |x| -2.0 * c * x * (-c * x * x).exp())
                .with_second_derivative(move |x| (4.0 * c * c * x * x - 2.0 * c) * (-c * x * x).exp())
                .with_parity(Parity::Even);
            assert!(check_condition_c2rho(&q, &f, 0.0).unwrap());
            assert!(apply_t2(&q, &f, 0.0).unwrap().re <= 1e-10);
        }
    }
}

#[test]
fn composition_matches_square() {
    let q = p(1.3, 0.4);
    let f = Func::real(|x: f64| (-(x - 0.3) * (x - 0.3)).exp())
        .with_derivative(|x| -2.0 * (x - 0.3) * (-(x - 0.3) * (x - 0.3)).exp())
        .with_second_derivative(|x| (4.0 * (x - 0.3) * (x - 0.3) - 2.0) * (-(x - 0.3) * (x - 0.3)).exp());
    let inner = f.clone();
    let tf = Func::try_new(move |x| apply_t(&q, &inner, x));
    for i in 0..12 {
        let x = 0.25 + 2.75 * i as f64 / 11.0;
        let a = apply_t(&q, &tf, x).unwrap();
        let b = apply_t2(&q, &f, x).unwrap();
        assert!((a - b).norm() <= 1e-8 * (1.0 + b.norm()), "x={x}: {a} {b}");
    }
}

#[test]
fn singular_limit_is_continuous() {
    let q = p(1.3, 0.4);
    let even = Func::real(|x: f64| (-x * x).exp() * (1.0 + 0.3 * x * x));
    let at0 = apply_t2(&q, &even, 0.0).unwrap();
    for &x in &[1e-4, -1e-4] {
        let v = apply_t2(&q, &even, x).unwrap();
        assert!((v - at0).norm() <= 1e-5 * at0.norm(), "{v} {at0}");
    }
    // a function without symmetry has a slope at the origin; the expansion
    // must agree with the direct formula evaluated just outside its range
    let f = Func::real(|x: f64| (-(x - 0.4) * (x - 0.4)).exp() * (1.0 + 0.3 * x));
    let direct = Operator::new(q).with_x_switch(1e-7);
    for &x in &[1e-4, -1e-4, 5e-4, -9e-4] {
        let v = apply_t2(&q, &f, x).unwrap();
        let w = direct.apply_t2(&f, x).unwrap();
        assert!((v - w).norm() <= 1e-7 * w.norm(), "x={x}: {v} {w}");
    }
}

#[test]
fn radial_generator_examples() {
    let q = p(0.5, -0.5);
    let (l, r) = radial_generator_check(&q, &gauss(), 1.0).unwrap();
    assert!((l - r).abs() <= 1e-8 * (1.0 + r.abs()));
    let c = Func::real(|_x: f64| 3.0).with_parity(Parity::Even);
    let (l, r) = radial_generator_check(&q, &c, 0.8).unwrap();
    assert_relative_eq!(l, 3.0, max_relative = 1e-12);
    assert_relative_eq!(r, 3.0, max_relative = 1e-12);
    let rho = q.rho();
    let sech = Func::real(move |x: f64| x.cosh().powf(-rho)).with_parity(Parity::Even);
    for &x in &[0.5, 1.0, 2.0] {
        let (l, r) = radial_generator_check(&q, &sech, x).unwrap();
        assert!((l - r).abs() <= 1e-8 * (1.0 + r.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn even_functions_follow_radial_generator(a in 0.0f64..2.0, d in 0.0f64..1.0, c in 0.2f64..2.0, x in 0.01f64..3.0) {
        let q = JacobiParams::new(a + d, a - 0.5 + d.min(0.5)).unwrap_or_else(|_| JacobiParams::new(a + 0.5, a).unwrap());
        let f = Func::real(move |x: f64| (-c * x * x).exp() * (1.0 + x * x))
            .with_parity(Parity::Even);
        let (l, r) = radial_generator_check(&q, &f, x).unwrap();
        prop_assert!((l - r).abs() <= 1e-8 * (1.0 + r.abs()));
    }

    #[test]
    fn t_is_linear(s in -2.0f64..2.0, x in -2.0f64..2.0) {
        let q = JacobiParams::new(1.1, 0.2).unwrap();
        let f = Func::real(|x: f64| (-(x - 0.2).powi(2)).exp());
        let g = Func::real(|x: f64| x * (-x * x).exp());
        let h = Func::real(move |x: f64| (-(x - 0.2).powi(2)).exp() + s * x * (-x * x).exp());
        let lhs = apply_t(&q, &h, x).unwrap();
        let rhs = apply_t(&q, &f, x).unwrap() + apply_t(&q, &g, x).unwrap() * s;
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }
}
