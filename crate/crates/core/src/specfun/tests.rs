use super::*;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn p(a: f64, b: f64) -> JacobiParams<f64> {
    JacobiParams::new(a, b).unwrap()
}

// high-precision reference values (30-digit hypergeometric evaluation at -sinh² x)
const PHI_GOLD: [(f64, f64, f64); 5] = [
    (0.7, 0.5, 0.813_457_561_081_210_9),
    (2.5, 3.0, 1.867_669_308_791_275_9e-4),
    (10.0, 8.0, -2.622_455_953_732_385_1e-11),
    (0.0, -2.0, 0.089_277_242_849_218_12),
    (15.0, 12.0, 2.688_943_246_659_841_9e-16),
];

const G_GOLD: [(f64, f64, f64, f64); 5] = [
    (0.7, 0.5, 1.041_310_944_235_323_9, 0.059_073_099_336_251_5),
    (2.5, 3.0, -1.190_480_936_225_977_1e-4, -2.831_620_597_238_197_2e-4),
    (10.0, 8.0, -4.247_357_450_903_721_5e-12, 8.139_704_476_451_9e-11),
    (0.0, -2.0, 0.024_281_122_757_089_255, 0.0),
    (15.0, 12.0, 4.388_785_766_116_016_2e-16, 9.443_569_552_534_302e-16),
];

#[test]
fn phi_matches_reference_values() {
    let q = p(1.3, 0.4);
    for &(l, x, want) in &PHI_GOLD {
        let got = phi(&q, l, x).unwrap();
        let scale = phi_scale(&q, x);
        assert!((got - want).abs() <= 1e-12 * scale, "lambda={l} x={x}: {got} vs {want}");
    }
}

#[test]
fn g_matches_reference_values() {
    let q = p(1.3, 0.4);
    for &(l, x, re, im) in &G_GOLD {
        let got = eigenfunction_g(&q, l, x).unwrap();
        let scale = phi_scale(&q, x) * (1.0 + l) * (1.0 + x.abs());
        assert!((got.re - re).abs() <= 1e-12 * scale, "lambda={l} x={x}: {got}");
        assert!((got.im - im).abs() <= 1e-12 * scale, "lambda={l} x={x}: {got}");
    }
}

#[test]
fn density_matches_reference_values() {
    let gold = [
        (0.5, -0.5, 1.0, 0.159_154_943_091_895_35, 0.159_154_943_091_895_35),
        (0.5, -0.5, 7.5, 8.952_465_548_919_113, 1.193_662_073_189_215),
        (1.3, 0.4, 0.01, 2.469_878_249_555_215_8e-6, 6.668_671_273_799_083e-4),
        (1.3, 0.4, 1.0, 0.046_572_250_066_357_1, 0.125_745_075_179_164_18),
        (1.3, 0.4, 7.5, 43.197_228_706_823_63, 15.551_002_334_456_507),
        (0.0, 0.0, 1.0, 0.229_288_083_916_818_6, 0.229_288_083_916_818_6),
    ];
    for &(a, b, l, re, im) in &gold {
        let d = plancherel_density(&p(a, b), l).unwrap().value;
        assert_relative_eq!(d.re, re, max_relative = 1e-12);
        assert_relative_eq!(d.im, im, max_relative = 1e-12);
    }
}

#[test]
fn density_is_conjugate_symmetric_and_vanishes_at_zero() {
    let q = p(1.3, 0.4);
    assert_eq!(plancherel_density(&q, 0.0).unwrap().value, Complex::new(0.0, 0.0));
    for &l in &[1e-6, 0.3, 2.0, 11.0] {
        let a = plancherel_density(&q, l).unwrap().value;
        let b = plancherel_density(&q, -l).unwrap().value;
        assert_relative_eq!(a.re, b.re, max_relative = 1e-13);
        assert_relative_eq!(a.im, -b.im, max_relative = 1e-13);
    }
    let tiny = plancherel_density(&q, 1e-8).unwrap().value;
    assert!(tiny.norm() < 1e-7);
}

#[test]
fn weight_and_log_derivative() {
    let q = p(0.5, -0.5);
    assert_eq!(weight_a(&q, 0.0).unwrap(), 0.0);
    assert_relative_eq!(weight_a(&q, 1.0).unwrap(), 1.381_097_845_541_816_6, max_relative = 1e-14);
    assert_eq!(weight_a(&q, 0.7).unwrap(), weight_a(&q, -0.7).unwrap());
    assert_relative_eq!(log_deriv_a(&q, 1.0).unwrap(), 2.626_070_570_998_662_4, max_relative = 1e-14);
    assert_eq!(log_deriv_a(&q, -1.0).unwrap(), -log_deriv_a(&q, 1.0).unwrap());
    assert_relative_eq!(log_deriv_a(&q, 30.0).unwrap(), 2.0, max_relative = 1e-14);
    assert!(matches!(log_deriv_a(&q, 0.0), Err(Error::SingularAtZero)));
    assert!(matches!(weight_a(&p(3.0, 2.0), 400.0), Err(Error::Overflow { .. })));
}

#[test]
fn smooth_coefficients_match_singular_forms() {
    let q = p(1.3, 0.4);
    for &x in &[1e-5, 1e-3, 0.2, 2.0] {
        assert_relative_eq!(x_log_deriv_a(&q, x), x * log_deriv_a(&q, x).unwrap(), max_relative = 1e-12);
        let h = 1e-5 * (1.0 + x);
        let fd = (log_deriv_a(&q, x + h).unwrap() - log_deriv_a(&q, x - h).unwrap()) / (2.0 * h);
        if x > 0.1 {
            assert_relative_eq!(log_deriv_a_prime(&q, x), fd, max_relative = 1e-7);
        }
    }
    assert_relative_eq!(x_log_deriv_a(&q, 0.0), 2.0 * 1.3 + 1.0);
}

#[test]
fn phi_closed_form_for_half_pair() {
    let q = p(0.5, -0.5);
    assert_relative_eq!(phi(&q, 1.0, 1.0).unwrap(), 1.0_f64.sin() / 1.0_f64.sinh(), max_relative = 1e-13);
    for i in 0..30 {
        for j in 0..30 {
            let l = 0.1 + 2.9 * i as f64 / 29.0;
            let x = 0.1 + 2.9 * j as f64 / 29.0;
            let v = phi(&q, l, x).unwrap() * l * x.sinh() - (l * x).sin();
            assert!(v.abs() <= 1e-10, "lambda={l} x={x} residual={v}");
        }
    }
}

#[test]
fn g_agrees_with_derivative_form() {
    // G_λ = φ_λ - φ_λ' / (ρ - iλ)
    for q in [p(0.5, -0.5), p(1.3, 0.4), p(0.0, -0.5)] {
        for &l in &[0.0, 0.5, 2.0] {
            for &x in &[-2.0, -0.4, 0.3, 1.5] {
                let h = 1e-4;
                let d = (phi(&q, l, x + h).unwrap() - phi(&q, l, x - h).unwrap()) / (2.0 * h);
                let want = Complex::new(phi(&q, l, x).unwrap(), 0.0) - Complex::new(d, 0.0) / Complex::new(q.rho(), -l);
                let got = eigenfunction_g(&q, l, x).unwrap();
                assert!((got - want).norm() < 1e-6, "{got} vs {want}");
            }
        }
    }
}

#[test]
fn g_is_complex_for_nonzero_lambda() {
    let g = eigenfunction_g(&p(0.5, -0.5), 1.0, 1.0).unwrap();
    assert!(g.im.abs() > 0.1);
    let gc = eigenfunction_g(&p(0.5, -0.5), -1.0, 1.0).unwrap();
    assert_relative_eq!(g.re, gc.re, max_relative = 1e-14);
    assert_relative_eq!(g.im, -gc.im, max_relative = 1e-14);
}

#[test]
fn single_precision_g() {
    let q = JacobiParams::new(1.3_f32, 0.4).unwrap();
    let g = eigenfunction_g(&q, 0.7_f32, 0.5).unwrap();
    assert!((g.re - 1.041_311).abs() < 1e-4);
    assert!((g.im - 0.059_073).abs() < 1e-4);
}

fn params_strategy() -> impl Strategy<Value = JacobiParams<f64>> {
    (-0.5f64..2.5, 0.0f64..1.0).prop_map(|(b, d)| {
        let a = (b + d).max(-0.49);
        JacobiParams::new(a, b).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalized_at_origin(q in params_strategy(), l in -20.0f64..20.0) {
        let g = eigenfunction_g(&q, l, 0.0).unwrap();
        prop_assert!((g - Complex::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn phi_even_in_lambda_and_x(q in params_strategy(), l in 0.0f64..10.0, x in 0.0f64..6.0) {
        let a = phi(&q, l, x).unwrap();
        let s = phi_scale(&q, x);
        prop_assert!((a - phi(&q, -l, x).unwrap()).abs() <= 1e-13 * s);
        prop_assert!((a - phi(&q, l, -x).unwrap()).abs() <= 1e-13 * s);
    }

    #[test]
    fn dominated_by_g0(q in params_strategy(), l in -8.0f64..8.0, x in -5.0f64..5.0) {
        let g = eigenfunction_g(&q, l, x).unwrap().norm();
        let g0 = eigenfunction_g(&q, 0.0, x).unwrap().re;
        prop_assert!(g <= g0 * (1.0 + 1e-10) + 1e-14, "|G|={} G0={}", g, g0);
    }

    #[test]
    fn decay_envelope(q in params_strategy(), l in -8.0f64..8.0, x in -10.0f64..10.0) {
        let g = eigenfunction_g(&q, l, x).unwrap().norm();
        let env = g * (q.rho() * x.abs()).exp() / (1.0 + x.abs());
        prop_assert!(env < 1e4, "envelope {}", env);
    }
}
