use jacobi_cherednik::operator::Func;
use jacobi_cherednik::quadrature::QuadratureConfig;
use jacobi_cherednik::transform::{forward, plancherel_check, DecayHint, SampledFunction};
use jacobi_cherednik::Params;
use num_complex::Complex;
use proptest::prelude::*;

fn bump(c: f64, s: f64) -> SampledFunction<f64> {
    let grid: Vec<f64> = (0..9).map(|i| -2.0 + 0.5 * i as f64).collect();
    let f = Func::real(move |x: f64| (-s * (x - c) * (x - c)).exp());
    SampledFunction::from_func(grid, f, Some(DecayHint::Schwartz(1.0))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn forward_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -0.5f64..0.5) {
        let p = Params::new(1.3, 0.4).unwrap();
        let cfg = QuadratureConfig::default();
        let (f, g) = (bump(c, 1.0), bump(-c, 2.0));
        let h = SampledFunction::linear_combination(&[(Complex::new(a, 0.0), &f), (Complex::new(b, 0.0), &g)]).unwrap();
        let ls = [-1.5, 0.0, 0.7, 2.0];
        let (hf, hg, hh) = (forward(&p, &f, &ls, &cfg).unwrap(), forward(&p, &g, &ls, &cfg).unwrap(), forward(&p, &h, &ls, &cfg).unwrap());
        for i in 0..ls.len() {
            let lin = hf.values()[i] * a + hg.values()[i] * b;
            prop_assert!((hh.values()[i] - lin).norm() <= 1e-10 * (1.0 + lin.norm()));
        }
    }
}

#[test]
fn paired_plancherel_holds_for_shifted_bumps() {
    let cfg = QuadratureConfig::default();
    for p in [Params::new(0.5, -0.5).unwrap(), Params::new(1.3, 0.4).unwrap()] {
        for c in [0.0, 0.4] {
            let r = plancherel_check(&p, &bump(c, 1.0), &cfg).unwrap();
            assert!((r.lhs - r.paired).abs() < 1e-8 * r.lhs, "{r:?}");
        }
    }
}
