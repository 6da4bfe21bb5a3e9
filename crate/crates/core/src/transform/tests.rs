use approx::assert_relative_eq;
use num_complex::Complex;

use super::*;

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

fn gaussian_multiplier(p: &JacobiParams<f64>, t: f64) -> impl Spectrum<f64> + '_ {
    let rho = p.rho();
    SpectralFn::new(Decay::Gaussian(t), move |l: f64| {
        Ok(Complex::new((-0.5 * t * (l * l + rho * rho)).exp(), 0.0))
    })
}

fn schwartz(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> SampledFunction<f64> {
    SampledFunction::from_func(grid(9, 2.0), Func::real(f), Some(DecayHint::Schwartz(1.0))).unwrap()
}

#[test]
fn fundamental_solution_transforms_back_to_its_multiplier() {
    let p = p_half();
    let c = cfg();
    let ft = inverse(&p, &gaussian_multiplier(&p, 1.0), &[0.0, 1.0], OutputKind::Real, &c).unwrap();
    let f0 = ft.function.values()[0].re;
    assert!(f0 > 0.0);
    assert_relative_eq!(f0, 0.241970724519143, max_relative = 1e-8);
    let h = forward(&p, &ft.function, &[0.0, 1.0, 2.0], &c).unwrap();
    for (l, v) in h.lambdas().iter().zip(h.values()) {
        let expect = (-0.5 * (l * l + 1.0)).exp();
        assert!((v - expect).norm() < 1e-8, "lambda {l}: {v} vs {expect}");
    }
    assert_relative_eq!(h.values()[1].re, (-1.0f64).exp(), max_relative = 1e-8);
}

#[test]
fn zero_spectrum_and_zero_function() {
    let p = p_half();
    let zero = SpectralFn::new(Decay::Gaussian(1.0), |_l: f64| Ok(Complex::new(0.0, 0.0)));
    let r = inverse(&p, &zero, &[-1.0, 0.0, 2.0], OutputKind::Real, &cfg()).unwrap();
    assert!(r.function.values().iter().all(|v| v.norm() == 0.0));
    let f = SampledFunction::from_samples(vec![-1.0, 1.0], vec![Complex::new(0.0, 0.0); 2]).unwrap();
    let pc = plancherel_check(&p, &f, &cfg()).unwrap();
    assert_eq!((pc.lhs, pc.rhs), (0.0, 0.0));
}

#[test]
fn transformer_matches_direct_forward() {
    let p = p_generic();
    let f = schwartz(|x| (-x * x).exp() * (1.0 + 0.5 * x));
    let ls = [-2.0, -0.5, 0.0, 0.7, 3.0];
    let direct = forward(&p, &f, &ls, &cfg()).unwrap();
    let tr = Transformer::new(&p, &f, &cfg()).unwrap();
    for (l, v) in ls.iter().zip(direct.values()) {
        assert!((tr.eval(*l).unwrap() - v).norm() < 1e-10 * (1.0 + v.norm()));
    }
}

#[test]
fn inverse_undoes_forward_for_mixed_parity() {
    for p in [p_half(), p_generic()] {
        let f = schwartz(|x| (-x * x).exp() * (1.0 + 0.5 * x));
        let tr = Transformer::new(&p, &f, &cfg()).unwrap();
        let xs = grid(7, 1.5);
        let back = inverse(&p, &tr, &xs, OutputKind::Real, &cfg()).unwrap();
        for (x, v) in xs.iter().zip(back.function.values()) {
            let expect = (-x * x).exp() * (1.0 + 0.5 * x);
            assert!((v.re - expect).abs() < 1e-7, "x {x}: {} vs {expect}", v.re);
        }
    }
}

#[test]
fn plancherel_holds_for_even_functions_and_paired_form_always() {
    let p = p_generic();
    let even = schwartz(|x| (-x * x).exp());
    let pc = plancherel_check(&p, &even, &cfg()).unwrap();
    assert_relative_eq!(pc.lhs, pc.rhs, max_relative = 1e-7);
    assert!(pc.rhs_imag.abs() < 1e-9);

    let mixed = schwartz(|x| (-x * x).exp() * (1.0 + x));
    let pc = plancherel_check(&p, &mixed, &cfg()).unwrap();
    assert_relative_eq!(pc.lhs, pc.paired, max_relative = 1e-7);
    assert!(pc.rhs_imag.abs() < 1e-9);
    // |ℋf|² against dσ misses a cross term between the even and odd parts
    assert!((pc.lhs - pc.rhs).abs() > 1e-3 * pc.lhs);
}

#[test]
fn reflection_identity_holds_for_even_functions_only() {
    let p = p_generic();
    let ls = [-1.0, 0.5, 2.0];
    let neg: Vec<f64> = ls.iter().map(|l| -l).rev().collect();
    let check = |f: &SampledFunction<f64>| -> f64 {
        let h = forward(&p, f, &ls, &cfg()).unwrap();
        let hr = forward(&p, &f.reflected().unwrap(), &neg, &cfg()).unwrap();
        h.values()
            .iter()
            .zip(hr.values().iter().rev())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    };
    assert!(check(&schwartz(|x| (-x * x).exp())) < 1e-10);
    assert!(check(&schwartz(|x| x * (-x * x).exp())) > 1e-3);
}

#[test]
fn translation_by_zero_is_identity() {
    let p = p_generic();
    let f = schwartz(|x| (-x * x).exp() * (1.0 + 0.5 * x));
    let ys = [-1.0, 0.0, 0.4, 1.3];
    let r = translate(&p, 0.0, &f, &ys, &cfg()).unwrap();
    for (y, v) in ys.iter().zip(r.function.values()) {
        let expect = (-y * y).exp() * (1.0 + 0.5 * y);
        assert!((v - expect).norm() < 1e-7);
    }
}

#[test]
fn convolution_routes_agree_and_multiply_transforms() {
    let p = p_half();
    let c = QuadratureConfig::default().with_tolerances(1e-9, 1e-11);
    let f = schwartz(|x| (-x * x).exp() * (1.0 + 0.5 * x));
    let g = schwartz(|x| (-2.0 * x * x).exp());
    let xs = [-1.0, 0.0, 0.5, 1.5];
    let spectral = convolve(&p, &f, &g, &xs, Route::Spectral, &c).unwrap();
    let direct = convolve(&p, &f, &g, &xs, Route::Direct, &c).unwrap();
    for (a, b) in spectral.function.values().iter().zip(direct.function.values()) {
        assert!((a - b).norm() < 1e-7, "{a} vs {b}");
    }
    let conv = spectral.function.resample(grid(9, 2.0)).unwrap();
    let hfg = Transformer::new(&p, &conv, &c).unwrap();
    let hf = Transformer::new(&p, &f, &c).unwrap();
    let hg = Transformer::new(&p, &g, &c).unwrap();
    for l in [0.0, 0.5, 1.0, 2.0] {
        let lhs = hfg.eval(l).unwrap();
        let rhs = hf.eval(l).unwrap() * hg.eval(l).unwrap();
        assert!((lhs - rhs).norm() < 1e-7, "lambda {l}: {lhs} vs {rhs}");
    }
}

#[test]
fn spectral_function_interpolates_and_checks_layout() {
    let p = p_half();
    let ls = grid(41, 4.0);
    let vs: Vec<Complex<f64>> = ls.iter().map(|l| Complex::new((-l * l).exp(), 0.0)).collect();
    let g = SpectralFunction::new(p, ls, vs).unwrap();
    assert!(g.is_symmetric());
    assert!((g.eval(0.33).unwrap().re - (-0.33f64 * 0.33).exp()).abs() < 1e-4);
    assert_eq!(g.eval(5.0).unwrap(), Complex::new(0.0, 0.0));
    assert!(SpectralFunction::new(p, vec![1.0, 0.0], vec![Complex::new(0.0, 0.0); 2]).is_err());
}
