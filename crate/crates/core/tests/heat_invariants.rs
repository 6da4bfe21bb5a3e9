use jacobi_cherednik::heat::{fundamental_solution, fundamental_solution_fn, heat_kernel, heat_multiplier};
use jacobi_cherednik::quadrature::QuadratureConfig;
use jacobi_cherednik::transform::forward;
use jacobi_cherednik::Params;
use proptest::prelude::*;

fn pairs() -> impl Strategy<Value = Params> {
    prop_oneof![Just(Params::new(0.5, -0.5).unwrap()), Just(Params::new(0.3, -0.3).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kernel_symmetry_and_positivity(p in pairs(), t in 0.3f64..1.5, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let cfg = QuadratureConfig::default();
        let a = heat_kernel(&p, t, x, y, &cfg).unwrap().value;
        let b = heat_kernel(&p, t, -y, -x, &cfg).unwrap().value;
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
    }

    #[test]
    fn kernel_at_origin_is_fundamental_solution(p in pairs(), t in 0.3f64..1.5, x in -2.0f64..2.0) {
        let cfg = QuadratureConfig::default();
        let a = heat_kernel(&p, t, x, 0.0, &cfg).unwrap().value;
        let f = fundamental_solution(&p, t, x, &cfg).unwrap().value;
        prop_assert!((a - f).abs() <= 1e-12);
    }
}

#[test]
fn transform_of_fundamental_solution_is_the_gaussian_multiplier() {
    let p = Params::new(0.5, -0.5).unwrap();
    let cfg = QuadratureConfig::default();
    let grid: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
    let f = fundamental_solution_fn(&p, 1.0, &grid, &cfg).unwrap();
    let lambdas = [0.0, 1.0, 2.0];
    let h = forward(&p, &f, &lambdas, &cfg).unwrap();
    for (&l, v) in lambdas.iter().zip(h.values()) {
        assert!((v.re - heat_multiplier(&p, 1.0, l)).abs() < 1e-7 && v.im.abs() < 1e-7, "{l}: {v}");
    }
    assert!((heat_multiplier(&p, 1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
    assert!((heat_multiplier(&p, 1.0, 0.0) - 0.6065306597126334).abs() < 1e-15);
}

#[test]
fn nonpositive_times_are_rejected() {
    let p = Params::new(0.5, -0.5).unwrap();
    let cfg = QuadratureConfig::default();
    assert!(heat_kernel(&p, 0.0, 0.0, 0.0, &cfg).is_err());
    assert!(fundamental_solution(&p, -1.0, 0.0, &cfg).is_err());
}
