//! Complex error functions built on the Faddeeva function
//! `w(z) = exp(-z²) erfc(-iz)`.
//!
//! `w` is evaluated in the first quadrant only and extended to the rest of the
//! plane through its reflection identities, so symmetry relations such as
//! `erf(conj z) = conj(erf z)` hold bit-for-bit.
//!
//! Regions, for `z` in the closed first quadrant:
//!
//! * `|z| >= ASYMPTOTIC_RADIUS`: Laplace asymptotic series, truncated once
//!   the terms fall below machine epsilon (the omitted exponentially small
//!   piece is below `exp(-64)` relative).
//! * otherwise: Weideman's rational expansion in `(L + iz)/(L - iz)` with
//!   `WEIDEMAN_TERMS` coefficients.
//!
//! `erf` additionally uses its Maclaurin series for `|z| < TAYLOR_RADIUS`,
//! where `1 - erfc(z)` would cancel.

use num_complex::Complex64;
use std::f64::consts::{FRAC_2_SQRT_PI, PI};
use std::sync::OnceLock;

/// Complex scalar used throughout the special-function layer.
pub type ComplexValue = Complex64;

pub(crate) const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_948_079_451_560_772_6;

pub const ASYMPTOTIC_RADIUS: f64 = 8.0;
pub const TAYLOR_RADIUS: f64 = 0.5;
const WEIDEMAN_TERMS: usize = 48;

/// Largest exponent passed to `exp` before the result is infinite.
const EXP_OVERFLOW: f64 = 709.78;

struct Weideman {
    coeffs: [f64; WEIDEMAN_TERMS],
    scale: f64,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_TERMS;
        let m = 2 * n;
        let scale = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        // Samples of exp(-t²)(L² + t²) at t = L tan(θ/2), θ = kπ/m, k = 1-m..m-1.
        // The k = -m sample (t = ∞) is zero. The function is even in k.
        let samples: Vec<f64> = (0..m)
            .map(|k| {
                let t = scale * (k as f64 * PI / m as f64 / 2.0).tan();
                (-t * t).exp() * (scale * scale + t * t)
            })
            .collect();
        let mut coeffs = [0.0; WEIDEMAN_TERMS];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let order = (j + 1) as f64;
            let mut acc = samples[0];
            for (k, s) in samples.iter().enumerate().skip(1) {
                acc += 2.0 * s * (PI * order * k as f64 / m as f64).cos();
            }
            *c = acc / (2 * m) as f64;
        }
        Weideman { coeffs, scale }
    })
}

fn w_rational(z: Complex64) -> Complex64 {
    let table = weideman();
    let iz = Complex64::new(-z.im, z.re);
    let denom = table.scale - iz;
    let ratio = (table.scale + iz) / denom;
    let mut poly = Complex64::new(0.0, 0.0);
    for &c in table.coeffs.iter().rev() {
        poly = poly * ratio + c;
    }
    2.0 * poly / (denom * denom) + FRAC_1_SQRT_PI / denom
}

fn w_asymptotic(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let q = 0.5 * inv * inv;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 1.0;
    loop {
        let next = term * q * (2.0 * k - 1.0);
        if next.norm() >= term.norm() {
            break;
        }
        sum += next;
        if next.norm() <= f64::EPSILON * 0.25 * sum.norm() {
            break;
        }
        term = next;
        k += 1.0;
    }
    Complex64::new(0.0, FRAC_1_SQRT_PI) * inv * sum
}

/// `w(z)` for `Re z >= 0`, `Im z >= 0`.
fn w_first_quadrant(z: Complex64) -> Complex64 {
    if z.norm() >= ASYMPTOTIC_RADIUS {
        w_asymptotic(z)
    } else {
        w_rational(z)
    }
}

/// `w(z)` for `Im z >= 0`, using `w(-conj z) = conj(w(z))`.
fn w_upper(z: Complex64) -> Complex64 {
    if z.re < 0.0 {
        w_first_quadrant(Complex64::new(-z.re, z.im)).conj()
    } else {
        w_first_quadrant(z)
    }
}

/// Dekker's exact square: `x² = hi + lo`.
fn square_split(x: f64) -> (f64, f64) {
    let hi = x * x;
    (hi, x.mul_add(x, -hi))
}

/// `exp(sign·z²)` with the real and imaginary parts of `z²` carried in
/// double-double so the result keeps full relative accuracy for `|z| ~ 10²`.
fn exp_signed_square(z: Complex64, sign: f64) -> Complex64 {
    let (xh, xl) = square_split(z.re);
    let (yh, yl) = square_split(z.im);
    let re_hi = xh - yh;
    let re_lo = ((xh - re_hi) - yh) + (xl - yl);
    let p = 2.0 * z.re * z.im;
    let p_lo = (2.0 * z.re).mul_add(z.im, -p);
    let (re_hi, re_lo, p, p_lo) = (sign * re_hi, sign * re_lo, sign * p, sign * p_lo);
    let magnitude = if re_hi > EXP_OVERFLOW {
        f64::INFINITY
    } else {
        re_hi.exp() * (1.0 + re_lo)
    };
    let (s, c) = p.sin_cos();
    let cos_phase = c - s * p_lo;
    let sin_phase = s + c * p_lo;
    if magnitude.is_infinite() {
        return Complex64::new(inf_times(cos_phase), inf_times(sin_phase));
    }
    Complex64::new(magnitude * cos_phase, magnitude * sin_phase)
}

fn inf_times(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * f64::INFINITY
    }
}

fn mul_guarded(a: Complex64, b: Complex64) -> Complex64 {
    if a.re.is_finite() && a.im.is_finite() {
        return a * b;
    }
    // a carries an overflowing magnitude; avoid inf·0 = NaN.
    let re = a.re * b.re - a.im * b.im;
    let im = a.re * b.im + a.im * b.re;
    Complex64::new(
        if re.is_nan() { 0.0 } else { re },
        if im.is_nan() { 0.0 } else { im },
    )
}

/// Faddeeva function `w(z) = exp(-z²) erfc(-iz)`.
///
/// In the lower half plane `w` grows like `exp(-z²)` and overflows for
/// `Im(z)² - Re(z)² > 709`.
pub fn faddeeva(z: ComplexValue) -> ComplexValue {
    if z.im >= 0.0 {
        w_upper(z)
    } else {
        let reflected = w_upper(-z);
        2.0 * exp_signed_square(z, -1.0) - reflected
    }
}

/// Result of an `erfcx` evaluation together with an accuracy flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Erfcx {
    pub value: ComplexValue,
    /// Set when the value came from the reflection `2exp(z²) - erfcx(-z)`
    /// and at least three significant digits cancelled.
    pub degraded: bool,
}

/// Scaled complementary error function `exp(z²) erfc(z)` with an accuracy flag.
pub fn erfcx_checked(z: ComplexValue) -> Erfcx {
    if z.re >= 0.0 {
        return Erfcx {
            value: w_upper(Complex64::new(-z.im, z.re)),
            degraded: false,
        };
    }
    let growth = 2.0 * exp_signed_square(z, 1.0);
    let reflected = w_upper(Complex64::new(z.im, -z.re));
    let value = growth - reflected;
    let scale = growth.norm() + reflected.norm();
    let degraded =
        !(value.norm() >= 1e-3 * scale) || !value.re.is_finite() || !value.im.is_finite();
    Erfcx { value, degraded }
}

/// Scaled complementary error function `exp(z²) erfc(z)`.
///
/// Accurate to a few ulps for `Re z >= 0`. For `Re z < 0` the reflected form
/// can cancel; see [`erfcx_checked`] for the flagged variant, which logs a
/// warning here when digits are lost.
pub fn erfcx(z: ComplexValue) -> ComplexValue {
    let out = erfcx_checked(z);
    if out.degraded {
        log::warn!("erfcx({z}) lost significance in the Re(z) < 0 reflection");
    }
    out.value
}

fn erf_series(z: Complex64) -> Complex64 {
    let z2 = z * z;
    let mut power = z;
    let mut sum = z;
    let mut n = 1.0;
    loop {
        power *= -z2 / n;
        let term = power / (2.0 * n + 1.0);
        sum += term;
        if term.norm() <= 0.25 * f64::EPSILON * sum.norm() {
            break;
        }
        n += 1.0;
    }
    FRAC_2_SQRT_PI * sum
}

/// `erf(z)` for `Re z >= 0`, `Im z >= 0`.
fn erf_first_quadrant(z: Complex64) -> Complex64 {
    if z.norm() < TAYLOR_RADIUS {
        return erf_series(z);
    }
    if z.re == 0.0 {
        // erf(iy) = i exp(y²) Im w(y); the real part is exactly zero.
        let w = w_first_quadrant(Complex64::new(z.im, 0.0));
        let grow = exp_signed_square(Complex64::new(z.im, 0.0), 1.0).re;
        let im = if grow.is_infinite() {
            f64::INFINITY
        } else {
            grow * w.im
        };
        return Complex64::new(0.0, im);
    }
    let w = w_upper(Complex64::new(-z.im, z.re));
    let erfc = mul_guarded(exp_signed_square(z, -1.0), w);
    let mut out = Complex64::new(1.0, 0.0) - erfc;
    if z.im == 0.0 {
        out.im = 0.0;
    }
    out
}

/// Error function of complex argument.
pub fn erf_complex(z: ComplexValue) -> ComplexValue {
    let flip_re = z.re.is_sign_negative();
    let flip_im = z.im.is_sign_negative();
    let q = Complex64::new(z.re.abs(), z.im.abs());
    let mut out = erf_first_quadrant(q);
    // z = ±(|x| ± i|y|); erf is odd and commutes with conjugation.
    if flip_im != flip_re {
        out = out.conj();
    }
    if flip_re {
        out = -out;
    }
    out
}

/// Complementary error function of complex argument.
pub fn erfc_complex(z: ComplexValue) -> ComplexValue {
    if z.norm() < TAYLOR_RADIUS {
        return Complex64::new(1.0, 0.0) - erf_complex(z);
    }
    if z.re >= 0.0 {
        let w = w_upper(Complex64::new(-z.im, z.re));
        mul_guarded(exp_signed_square(z, -1.0), w)
    } else {
        Complex64::new(2.0, 0.0) - erfc_complex(-z)
    }
}

/// Imaginary error function `erfi(z) = -i erf(iz)`.
pub fn erfi(z: ComplexValue) -> ComplexValue {
    let e = erf_complex(Complex64::new(-z.im, z.re));
    Complex64::new(e.im, -e.re)
}

/// `erfcx(z) - 1/(√π z)` for `Re z > 0`.
///
/// For large `|z|` this is evaluated from the asymptotic series with the
/// leading term removed, so it stays accurate where `erfcx(z)` is dominated by
/// `1/(√π z)`.
pub fn erfcx_remainder(z: ComplexValue) -> ComplexValue {
    let lead = FRAC_1_SQRT_PI * z.inv();
    if z.norm() < ASYMPTOTIC_RADIUS || z.re < 0.0 {
        return erfcx(z) - lead;
    }
    // erfcx(z) = w(iz) ~ (1/(√π z)) Σ_{k≥0} (-1)^k (2k-1)!! / (2z²)^k
    let inv = z.inv();
    let q = -0.5 * inv * inv;
    let mut term = q;
    let mut sum = term;
    let mut k = 2.0;
    loop {
        let next = term * q * (2.0 * k - 1.0);
        if next.norm() >= term.norm() {
            break;
        }
        sum += next;
        if next.norm() <= 0.25 * f64::EPSILON * sum.norm() {
            break;
        }
        term = next;
        k += 1.0;
    }
    lead * sum
}
