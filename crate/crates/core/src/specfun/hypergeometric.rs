//! Gauss hypergeometric function on `[0, 1)` by power series near the origin
//! and Taylor continuation of the hypergeometric ODE towards `w -> 1`.
//!
//! The continuation works in the complementary variable `s = 1 - w` so that
//! points extremely close to `w = 1` (large `|x|` after `w = tanh² x`) keep
//! full relative precision.

use num_complex::Complex;

use crate::error::{Error, Result};
use super::gamma::ln_gamma_complex;
use crate::scalar::{cplx, Real};

/// Tuning for [`hyp2f1`].
#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    /// Relative size of the last retained term.
    pub term_tol: f64,
    /// Hard cap on terms per series expansion.
    pub max_terms: usize,
    /// Hard cap on continuation steps.
    pub max_steps: usize,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self {
            term_tol: 1e-17,
            max_terms: 4000,
            max_steps: 200_000,
        }
    }
}

/// Value and first derivative of a function at a point.
#[derive(Debug, Clone, Copy)]
struct Jet<T: Real> {
    f: Complex<T>,
    df: Complex<T>,
}

fn gauss_series<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    w: T,
    opts: &SeriesOptions,
) -> Result<Jet<T>> {
    let tol = T::lit(opts.term_tol);
    let one = T::one();
    let mut term = cplx(one, T::zero());
    let mut f = term;
    // derivative series: sum n t_n / w, built from the next term so w = 0 works
    let mut df = cplx(T::zero(), T::zero());
    let mut small_run = 0usize;
    for n in 0..opts.max_terms {
        let nn = T::from_usize_lossy(n);
        let ratio = (a + nn) * (b + nn) / ((c + nn) * (nn + one));
        // t_{n+1}/w contributes (n+1) t_{n+1}/w to the derivative
        df = df + term * ratio * (nn + one);
        term = term * ratio * w;
        f = f + term;
        let scale = f.norm().max(T::min_positive_value());
        if term.norm() <= tol * scale {
            small_run += 1;
            if small_run >= 2 {
                return Ok(Jet { f, df });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::SeriesNotConverged {
        terms: opts.max_terms,
    })
}

/// One Taylor step of the ODE `w(1-w)F'' + [c - (a+b+1)w]F' - abF = 0` from
/// `w0 = 1 - s0` to `w0 + h`.
#[allow(clippy::too_many_arguments)]
fn taylor_step<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    s0: T,
    h: T,
    jet: Jet<T>,
    opts: &SeriesOptions,
) -> Result<Jet<T>> {
    let one = T::one();
    let w0 = one - s0;
    let abp1 = a + b + one;
    let p0 = w0 * s0;
    let p1 = s0 - w0;
    let p2 = -one;
    let q0 = c - abp1 * w0;
    let q1 = -abp1;
    let r = -(a * b);
    let tol = T::lit(opts.term_tol);

    // scaled coefficients g_n = f_n h^n
    let mut g0 = jet.f;
    let mut g1 = jet.df * h;
    let mut val = g0 + g1;
    let mut dval = g1;
    let mut small_run = 0usize;
    for n in 0..opts.max_terms {
        let nf = T::from_usize_lossy(n);
        let k1 = (q0 * (nf + one) + p1 * nf * (nf + one)) * g1 * h;
        let k0 = (r + q1 * nf + p2 * nf * (nf - one)) * g0 * (h * h);
        let g2 = -(k1 + k0) / (p0 * (nf + one) * (nf + T::lit(2.0)));
        val = val + g2;
        dval = dval + g2 * (nf + T::lit(2.0));
        g0 = g1;
        g1 = g2;
        let scale = val.norm().max(T::min_positive_value());
        if n >= 2 && g2.norm() <= tol * scale {
            small_run += 1;
            if small_run >= 3 {
                return Ok(Jet { f: val, df: dval / h });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::SeriesNotConverged {
        terms: opts.max_terms,
    })
}

/// Continues the Gauss series from `w_start` to `w = 1 - s_to`.
#[allow(clippy::too_many_arguments)]
fn continue_to<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    w_start: T,
    s_to: T,
    lam: T,
    opts: &SeriesOptions,
) -> Result<Jet<T>> {
    let zero = T::zero();
    let one = T::one();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut jet = gauss_series(a, b, c, w_start, opts)?;
    let mut s_cur = one - w_start;
    for _ in 0..opts.max_steps {
        let w_cur = one - s_cur;
        let osc = two * w_cur.sqrt() * s_cur / lam;
        let mut h = (half * s_cur).min(half * w_cur).min(osc);
        let last = s_cur - s_to <= h;
        if last {
            h = s_cur - s_to;
        }
        if h > zero {
            jet = taylor_step(a, b, c, s_cur, h, jet, opts)?;
        }
        if last {
            return Ok(jet);
        }
        s_cur = s_cur - h;
    }
    Err(Error::SeriesNotConverged {
        terms: opts.max_steps,
    })
}

/// The two local solutions at `w = 1` in the variable `s = 1 - w`, with
/// `d = c - a - b`: `₂F₁(a, b; 1-d; s)` and `s^d ₂F₁(c-a, c-b; 1+d; s)`,
/// each with its `s`-derivative.
fn local_pair_at_one<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    s: T,
    opts: &SeriesOptions,
) -> Result<(Jet<T>, Jet<T>)> {
    let one = T::one();
    let d = c - a - b;
    let y1 = gauss_series(a, b, -d + one, s, opts)?;
    let g = gauss_series(c - a, c - b, d + one, s, opts)?;
    let sd = (d * s.ln()).exp();
    let y2 = Jet {
        f: sd * g.f,
        df: sd * (g.df + g.f * d / s),
    };
    Ok((y1, y2))
}

/// Largest `s = 1 - w` at which the local solutions at `w = 1` are summed
/// directly; their series then need at most ~140 terms.
const CONNECT_BELOW: f64 = 0.75;

/// Connection coefficients `(A₁, A₂)` with
/// `₂F₁(a,b;c;w) = A₁ ₂F₁(a,b;1-d;s) + A₂ s^d ₂F₁(c-a,c-b;1+d;s)`, `d = c-a-b`.
fn connection_coefficients<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let d = c - a - b;
    let lg_c = ln_gamma_complex(c)?;
    // a pole in a denominator gamma makes the coefficient vanish
    let coef = |num: Complex<T>, den1: Complex<T>, den2: Complex<T>| -> Result<Complex<T>> {
        match (ln_gamma_complex(den1), ln_gamma_complex(den2)) {
            (Err(Error::GammaPole { .. }), _) | (_, Err(Error::GammaPole { .. })) => Ok(cplx(T::zero(), T::zero())),
            (l1, l2) => Ok((lg_c + ln_gamma_complex(num)? - l1? - l2?).exp()),
        }
    };
    let a1 = coef(d, c - a, c - b)?;
    let a2 = coef(-d, a, b)?;
    Ok((a1, a2))
}

type ConnKey = [u64; 6];
type ConnEntry = (ConnKey, Complex<f64>, Complex<f64>);

thread_local! {
    // callers sweep many points at a fixed spectral parameter, alternating
    // between two parameter triples (φ and its shifted companion)
    static CONNECTION_CACHE: std::cell::RefCell<(usize, [Option<ConnEntry>; 4])> =
        const { std::cell::RefCell::new((0, [None; 4])) };
}

fn cached_connection<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let key: ConnKey = [a.re, a.im, b.re, b.im, c.re, c.im].map(|v| v.as_f64().to_bits());
    let to_t = |z: Complex<f64>| Complex::new(T::lit(z.re), T::lit(z.im));
    let hit = CONNECTION_CACHE.with(|cache| {
        cache
            .borrow()
            .1
            .iter()
            .flatten()
            .find(|e| e.0 == key)
            .map(|e| (e.1, e.2))
    });
    if let Some((a1, a2)) = hit {
        return Ok((to_t(a1), to_t(a2)));
    }
    let (a1, a2) = connection_coefficients(a, b, c)?;
    let to_f = |z: Complex<T>| Complex::new(z.re.as_f64(), z.im.as_f64());
    CONNECTION_CACHE.with(|cache| {
        let mut cache = cache.borrow_mut();
        let slot = cache.0;
        cache.1[slot] = Some((key, to_f(a1), to_f(a2)));
        cache.0 = (slot + 1) % 4;
    });
    Ok((a1, a2))
}

/// Evaluation near `w = 1` through the closed-form connection coefficients.
fn connected<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    s: T,
    opts: &SeriesOptions,
) -> Result<Complex<T>> {
    let (a1, a2) = cached_connection(a, b, c)?;
    let (y1, y2) = local_pair_at_one(a, b, c, s, opts)?;
    Ok(a1 * y1.f + a2 * y2.f)
}

/// Smallest distance of the local exponent difference at `w = 1` from an
/// integer below which the two local solutions are not used.
const EXPONENT_GAP: f64 = 0.25;

/// `₂F₁(a, b; c; w)` at `w = 1 - s`, for `0 <= w < 1`.
///
/// Both `w` and `s` are passed so callers can supply each one accurately
/// (for `w = tanh² x`, `s = sech² x`). `scale` is the oscillation scale of the
/// solution, usually `max(1, |Im a| + |Im b|)`; it bounds the step length so
/// the local expansions never suffer large cancellation.
///
/// Away from `w = 0` the value is the combination of the two local solutions
/// at `w = 1` with closed-form connection coefficients, provided their
/// exponent difference `c - a - b` is safely away from the integers;
/// otherwise the Taylor continuation runs all the way.
pub fn hyp2f1<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    w: T,
    s: T,
    scale: T,
    opts: &SeriesOptions,
) -> Result<Complex<T>> {
    let zero = T::zero();
    let one = T::one();
    if !(w >= zero && s > zero && w <= one) {
        return Err(Error::InvalidInput(format!(
            "hypergeometric argument outside [0, 1): w = {}, 1 - w = {}",
            w.as_f64(),
            s.as_f64()
        )));
    }
    let lam = scale.max(one);
    let half = T::lit(0.5);
    let w_start = half.min(one / (lam * lam));
    if w <= w_start {
        return Ok(gauss_series(a, b, c, w, opts)?.f);
    }
    let d = c - a - b;
    let gap = (d - Complex::new(d.re.round(), zero)).norm();
    if gap >= T::lit(EXPONENT_GAP) && s <= T::lit(CONNECT_BELOW) {
        return connected(a, b, c, s, opts);
    }
    Ok(continue_to(a, b, c, w_start, s, lam, opts)?.f)
}
