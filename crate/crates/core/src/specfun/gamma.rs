//! Complex Gamma function via the Lanczos approximation (g = 7, nine terms),
//! with reflection for `Re z < 1/2`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn check_pole<T: Real>(z: Complex<T>) -> Result<()> {
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round() {
        return Err(Error::GammaPole {
            re: z.re.as_f64(),
            im: z.im.as_f64(),
        });
    }
    Ok(())
}

/// `ln Γ(z)` for `Re z >= 1/2`.
fn ln_gamma_right<T: Real>(z: Complex<T>) -> Complex<T> {
    let one = T::one();
    let zm1 = z - one;
    let mut series = cplx(T::lit(LANCZOS_COEF[0]), T::zero());
    for (k, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        series = series + cplx(T::lit(c), T::zero()) / (zm1 + T::from_usize_lossy(k));
    }
    let t = zm1 + T::lit(LANCZOS_G + 0.5);
    let half_ln_2pi = T::lit(0.918_938_533_204_672_8);
    (zm1 + T::lit(0.5)) * t.ln() - t + series.ln() + half_ln_2pi
}

/// `ln sin(πz)` for `Im z >= 0`, stable for large imaginary parts.
fn ln_sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    let pi = T::PI();
    let i = cplx(T::zero(), T::one());
    // sin(πz) = (i/2) e^{-iπz} (1 - e^{2πiz})
    let e2 = (i * z * (pi + pi)).exp();
    (-(i * z * pi)) + cplx(T::zero(), T::lit(0.5)).ln() + (cplx(T::one(), T::zero()) - e2).ln()
}

/// Principal-sheet-free logarithm of the Gamma function: `exp` of the result
/// is `Γ(z)`, and its real part is `ln |Γ(z)|`.
pub fn ln_gamma_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    check_pole(z)?;
    if z.im < T::zero() {
        return ln_gamma_complex(z.conj()).map(|v| v.conj());
    }
    if z.re >= T::lit(0.5) {
        return Ok(ln_gamma_right(z));
    }
    // Γ(z) Γ(1-z) = π / sin(πz)
    let one = cplx(T::one(), T::zero());
    Ok(cplx(T::PI().ln(), T::zero()) - ln_sin_pi(z) - ln_gamma_right(one - z))
}

/// `Γ(z)` for complex `z`; fails at the poles `z = 0, -1, -2, ...`.
pub fn gamma_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    Ok(ln_gamma_complex(z)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classical_values() {
        let g1 = gamma_complex(Complex::new(1.0_f64, 0.0)).unwrap();
        assert_relative_eq!(g1.re, 1.0, epsilon = 1e-14);
        assert!(g1.im.abs() < 1e-14);
        let gh = gamma_complex(Complex::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(gh.re, std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        let g5 = gamma_complex(Complex::new(5.0, 0.0)).unwrap();
        assert_relative_eq!(g5.re, 24.0, max_relative = 1e-13);
    }

    #[test]
    fn modulus_on_imaginary_axis_matches_reflection() {
        // |Γ(iy)|² = π / (y sinh πy)
        for &y in &[1.0_f64, 0.3, 2.5, 7.0, 20.0] {
            let g = gamma_complex(Complex::new(0.0, y)).unwrap();
            let expected = std::f64::consts::PI / (y * (std::f64::consts::PI * y).sinh());
            assert_relative_eq!(g.norm_sqr(), expected, max_relative = 1e-12);
        }
        let gi = gamma_complex(Complex::new(0.0, 1.0)).unwrap();
        assert_relative_eq!(gi.norm_sqr(), 0.272_029_054_982_133_1, max_relative = 1e-12);
    }

    #[test]
    fn recurrence_and_reflection_on_strip() {
        for &(re, im) in &[(-9.3, 4.0), (-0.7, -12.0), (0.2, 33.0), (3.5, -50.0), (48.0, 10.0)] {
            let z: Complex<f64> = Complex::new(re, im);
            let lhs = ln_gamma_complex(z + 1.0).unwrap();
            let rhs = ln_gamma_complex(z).unwrap() + z.ln();
            let d = (lhs - rhs).exp();
            assert_relative_eq!(d.re, 1.0, epsilon = 1e-12);
            assert!(d.im.abs() < 1e-12, "z={z} d={d}");
        }
    }

    #[test]
    fn poles_are_rejected() {
        for &n in &[0.0, -1.0, -7.0] {
            assert!(matches!(
                gamma_complex(Complex::new(n, 0.0)),
                Err(Error::GammaPole { .. })
            ));
        }
        assert!(gamma_complex(Complex::new(-1.0, 1e-9)).is_ok());
    }

    #[test]
    fn single_precision_instantiation() {
        let g = gamma_complex(Complex::new(0.5_f32, 0.0)).unwrap();
        assert!((g.re - std::f32::consts::PI.sqrt()).abs() < 1e-5);
    }
}
