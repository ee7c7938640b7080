//! Closed forms, written so that every `exp(R²/4ℓ²)·erfc(z)` appears as
//! `erfcx(z)` times a phase or a decaying factor `exp((R² - t²)/4ℓ²)`,
//! `t >= R`. The derivations are in `docs/closed_forms.md`.
//!
//! Each formula is evaluated for `α = 1` at `ℓ_eff = √α ℓ`; the general
//! kernel is `1/α` times the unit-weight kernel at that scale.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use super::{Configuration, DetectorPair, SwitchingProfile};
use crate::error::Error;
use crate::field::SpectralDensity;
use crate::specfun::{erfcx, erfcx_remainder, FRAC_1_SQRT_PI};

/// `|s2_local|` below which [`ratio_nonlocal`] refuses to divide.
pub const RATIO_HAZARD: f64 = 1e-12;

const REALNESS_TOL: f64 = 1e-10;
const CANCELLATION_TOL: f64 = 1e-12;

/// `mantissa · exp(log_scale)`, for values far below the `f64` range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `ln|value|`, finite even when `value()` underflows.
    pub fn ln_abs(&self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }
}

/// Evaluates `expr` and its conjugate partner independently and returns the
/// real part of their mean. `expr(false)` is the expression, `expr(true)` the
/// same expression with every argument conjugated.
fn paired_real(what: &str, mut expr: impl FnMut(bool) -> Complex64) -> f64 {
    let z = expr(false);
    let partner = expr(true).conj();
    let mean = 0.5 * (z + partner);
    let residue = 0.5 * (z - partner).norm();
    debug_assert!(
        residue <= REALNESS_TOL * z.norm().max(f64::MIN_POSITIVE),
        "{what}: conjugate pair disagrees by {residue:e} (|z| = {:e})",
        z.norm()
    );
    mean.re
}

fn warn_on_cancellation(what: &str, total: f64, parts: &[f64]) {
    let scale: f64 = parts.iter().map(|p| p.abs()).sum();
    if scale > 0.0 && total.abs() < CANCELLATION_TOL * scale {
        warn!("{what}: terms cancel to {total:e} against a scale of {scale:e}");
    }
}

struct Side(bool);

impl Side {
    fn cis(&self, theta: f64) -> Complex64 {
        Complex64::from_polar(1.0, if self.0 { -theta } else { theta })
    }

    fn z(&self, re: f64, im: f64) -> Complex64 {
        Complex64::new(re, if self.0 { -im } else { im })
    }

    fn c(&self, z: Complex64) -> Complex64 {
        if self.0 {
            z.conj()
        } else {
            z
        }
    }
}

fn effective_ell(sd: &SpectralDensity) -> (f64, f64) {
    (sd.ell() * sd.alpha().sqrt(), 1.0 / sd.alpha())
}

fn kick(pair: &DetectorPair) -> (f64, f64) {
    match pair.bob {
        SwitchingProfile::Delta { at, kick } => (at, kick),
        SwitchingProfile::Rect { .. } => unreachable!("checked by configuration"),
    }
}

fn bob_window(pair: &DetectorPair) -> (f64, f64) {
    pair.bob.support()
}

fn alice_end(pair: &DetectorPair) -> f64 {
    pair.alice.support().1
}

/// `exp(-(t - r)(t + r)/4ℓ²)`, at most 1 for `t >= r`.
fn decay(r: f64, t: f64, ell: f64) -> f64 {
    (-(t - r) * (t + r) / (4.0 * ell * ell)).exp()
}

/// `1/R - 1/(R + 2iℓ²Ω)` without the cancellation: what the local term leaves
/// over once it absorbs the `1/(√π u_R)` head of `erfcx(u_R)`.
fn leading_mismatch(side: &Side, r: f64, ell: f64, omega: f64) -> Complex64 {
    let d = side.z(r, 2.0 * ell * ell * omega);
    side.z(0.0, 2.0 * ell * ell * omega) / (r * d)
}

/// `Im erfcx(x + iy) / y` for `x > 0`, with the `y → 0` limit.
fn im_erfcx_over_y(x: f64, y: f64) -> f64 {
    if y.abs() < 1e-5 {
        let f = erfcx(Complex64::new(x, 0.0)).re;
        let d1 = 2.0 * x * erfcx_remainder(Complex64::new(x, 0.0)).re;
        let d2 = 2.0 * f + 2.0 * x * d1;
        let d3 = 4.0 * d1 + 2.0 * x * d2;
        d1 - y * y / 6.0 * d3
    } else {
        erfcx(Complex64::new(x, y)).im / y
    }
}

/// `∫_a^b cos(Ωt) e^{iΩt} dt`, finite as Ω → 0.
fn cos_phase_integral(a: f64, b: f64, omega: f64) -> Complex64 {
    let w = b - a;
    let x = omega * w;
    let sinc = if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    };
    0.5 * w * (Complex64::new(1.0, 0.0) + Complex64::from_polar(sinc, omega * (a + b)))
}

/// `S₂^local` for a kick at τ inside Alice's lightband:
/// `κ·amp·cos(Ωτ)cos(Ω(τ - R))/(πR)`.
pub fn s2_local_lightband_delta(pair: &DetectorPair) -> Result<f64, Error> {
    pair.require(Configuration::LightbandDelta)?;
    let (tau, k) = kick(pair);
    let (r, w) = (pair.separation, pair.omega);
    Ok(k * pair.amp_product * (w * tau).cos() * (w * (tau - r)).cos() / (PI * r))
}

/// `S₂^(ℓ)` for a kick inside the lightband.
pub fn s2_ell_lightband_delta(pair: &DetectorPair, sd: &SpectralDensity) -> Result<f64, Error> {
    pair.require(Configuration::LightbandDelta)?;
    let (ell, weight) = effective_ell(sd);
    let (tau, k) = kick(pair);
    let (r, w) = (pair.separation, pair.omega);
    let g = decay(r, tau, ell);
    let mut parts = [0.0; 2];
    let re = paired_real("lightband delta", |conj| {
        let s = Side(conj);
        let near = s.cis(w * (tau - r)) * erfcx(s.z(r / (2.0 * ell), ell * w));
        let far = g * erfcx(s.z(tau / (2.0 * ell), ell * w));
        if !conj {
            parts = [near.re, far.re];
        }
        near - far
    });
    warn_on_cancellation("lightband delta", re, &parts);
    let pre = k * pair.amp_product * (w * tau).cos() * FRAC_1_SQRT_PI / (2.0 * ell);
    Ok(-weight * pre * re)
}

/// `s2_total - s2_local` for a kick inside the lightband, free of the
/// cancellation between the two.
pub fn excess_lightband_delta(pair: &DetectorPair, sd: &SpectralDensity) -> Result<f64, Error> {
    pair.require(Configuration::LightbandDelta)?;
    let (ell, weight) = effective_ell(sd);
    let (tau, k) = kick(pair);
    let (r, w) = (pair.separation, pair.omega);
    let g = decay(r, tau, ell);
    let c = k * pair.amp_product * (w * tau).cos();
    let head = paired_real("lightband delta excess", |conj| {
        let s = Side(conj);
        s.cis(w * (tau - r)) * leading_mismatch(&s, r, ell, w)
    });
    let tail = paired_real("lightband delta excess", |conj| {
        let s = Side(conj);
        s.cis(w * (tau - r)) * erfcx_remainder(s.z(r / (2.0 * ell), ell * w))
            - g * erfcx(s.z(tau / (2.0 * ell), ell * w))
    });
    Ok(weight * (c / PI * head - c * FRAC_1_SQRT_PI / (2.0 * ell) * tail))
}

/// Leading small-ℓ term of `s2_total - s2_local` for a kick inside the
/// lightband: `κ·amp·(ℓ²/πR³)[RΩ(sin ΩR + sin(ΩR - 2Ωτ)) + cos ΩR + cos(ΩR - 2Ωτ)]`.
pub fn leading_correction_lightband_delta(
    pair: &DetectorPair,
    sd: &SpectralDensity,
) -> Result<f64, Error> {
    pair.require(Configuration::LightbandDelta)?;
    let (tau, k) = kick(pair);
    let (r, w) = (pair.separation, pair.omega);
    let l2 = sd.ell() * sd.ell();
    let bracket = r * w * ((w * r).sin() + (w * r - 2.0 * w * tau).sin())
        + (w * r).cos()
        + (w * r - 2.0 * w * tau).cos();
    Ok(k * pair.amp_product * l2 / (PI * r.powi(3)) * bracket)
}

/// `S₂^local` for Bob on `[a, b]` inside the lightband:
/// `(amp/πR) ∫_a^b cos(Ωt) cos(Ω(t - R)) dt`.
pub fn s2_local_lightband_extended(pair: &DetectorPair) -> Result<f64, Error> {
    pair.require(Configuration::LightbandExtended)?;
    let (a, b) = bob_window(pair);
    let (r, w) = (pair.separation, pair.omega);
    let q = Complex64::from_polar(1.0, -w * r) * cos_phase_integral(a, b, w);
    Ok(pair.amp_product * q.re / (PI * r))
}

/// The two Bob-window endpoint terms, `Re[A(b) - A(a) + B(b) - B(a)]/2`.
fn endpoint_terms(r: f64, a: f64, b: f64, ell: f64, w: f64) -> f64 {
    let at = |t: f64, conj: bool| -> Complex64 {
        let s = Side(conj);
        let g = decay(r, t, ell);
        if g == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let x = t / (2.0 * ell);
        let v = s.z(x, ell * w);
        // A: the e^{2iΩt} half of cos(Ωt)e^{iΩt}; B: the constant half.
        let big_a = s.cis(w * t) * (g * ell * im_erfcx_over_y(x, ell * w));
        let big_b = s.cis(-w * t) * (2.0 * ell * g) * v * erfcx_remainder(v);
        big_a + big_b
    };
    0.5 * paired_real("lightband endpoints", |conj| at(b, conj) - at(a, conj))
}

/// `S₂^(ℓ)` for Bob on `[a, b]` inside the lightband.
pub fn s2_ell_lightband_extended(pair: &DetectorPair, sd: &SpectralDensity) -> Result<f64, Error> {
    pair.require(Configuration::LightbandExtended)?;
    let (ell, weight) = effective_ell(sd);
    let (a, b) = bob_window(pair);
    let (r, w) = (pair.separation, pair.omega);
    let p = cos_phase_integral(a, b, w);
    let bulk = paired_real("lightband extended", |conj| {
        let s = Side(conj);
        erfcx(s.z(r / (2.0 * ell), ell * w)) * s.cis(-w * r) * s.c(p)
    });
    let ends = endpoint_terms(r, a, b, ell, w);
    warn_on_cancellation("lightband extended", ends - bulk, &[bulk, ends]);
    let pre = pair.amp_product * FRAC_1_SQRT_PI / (2.0 * ell);
    Ok(weight * pre * (ends - bulk))
}

/// `s2_total - s2_local` for Bob on `[a, b]` inside the lightband.
pub fn excess_lightband_extended(pair: &DetectorPair, sd: &SpectralDensity) -> Result<f64, Error> {
    pair.require(Configuration::LightbandExtended)?;
    let (ell, weight) = effective_ell(sd);
    let (a, b) = bob_window(pair);
    let (r, w) = (pair.separation, pair.omega);
    let p = cos_phase_integral(a, b, w);
    let head = paired_real("lightband extended excess", |conj| {
        let s = Side(conj);
        s.cis(-w * r) * s.c(p) * leading_mismatch(&s, r, ell, w)
    });
    let tail = paired_real("lightband extended excess", |conj| {
        let s = Side(conj);
        erfcx_remainder(s.z(r / (2.0 * ell), ell * w)) * s.cis(-w * r) * s.c(p)
    });
    let ends = endpoint_terms(r, a, b, ell, w);
    let amp = pair.amp_product;
    Ok(weight * (amp / PI * head + amp * FRAC_1_SQRT_PI / (2.0 * ell) * (ends - tail)))
}

/// Leading small-ℓ term of `s2_total - s2_local` for Bob on `[R, R + T]`:
/// `amp·ℓ²[2Ω²RT sin ΩR + sin Ω(R+2T) + Ω(3R+2T) cos ΩR + ΩR cos Ω(R+2T) - sin ΩR]/(2πΩR³)`,
/// evaluated in a form that stays finite at Ω = 0.
pub fn leading_correction_lightband_extended(
    pair: &DetectorPair,
    sd: &SpectralDensity,
) -> Result<f64, Error> {
    pair.require(Configuration::LightbandExtended)?;
    let (a, b) = bob_window(pair);
    let (r, w) = (pair.separation, pair.omega);
    let t = alice_end(pair);
    if a != r || b != r + t {
        return Err(Error::config(format!(
            "leading correction needs Bob on [R, R + T] = [{r}, {}], got [{a}, {b}]",
            r + t
        )));
    }
    let q = Complex64::from_polar(1.0, -w * r) * cos_phase_integral(a, b, w);
    let l2 = sd.ell() * sd.ell();
    Ok(2.0 * pair.amp_product * l2 / (PI * r.powi(3)) * (q.re - r * w * q.im + r * (w * r).cos()))
}

/// `S₂^(ℓ)` for a kick at τ after Alice's lightband, as `mantissa·exp(log_scale)`
/// with `log_scale = -(τ - T - R)(τ - T + R)/4ℓ²`.
pub fn s2_ell_timelike_delta_scaled(
    pair: &DetectorPair,
    sd: &SpectralDensity,
) -> Result<ScaledValue, Error> {
    pair.require(Configuration::TimelikeDelta)?;
    let (ell, weight) = effective_ell(sd);
    let (tau, k) = kick(pair);
    let (r, w) = (pair.separation, pair.omega);
    let t = alice_end(pair);
    let s0 = tau - t;
    let log_scale = -(s0 - r) * (s0 + r) / (4.0 * ell * ell);
    let g = decay(s0, tau, ell);
    let mut parts = [0.0; 2];
    let re = paired_real("timelike delta", |conj| {
        let s = Side(conj);
        let near = s.cis(w * t) * erfcx(s.z(s0 / (2.0 * ell), ell * w));
        let far = g * erfcx(s.z(tau / (2.0 * ell), ell * w));
        if !conj {
            parts = [near.re, far.re];
        }
        near - far
    });
    warn_on_cancellation("timelike delta", re, &parts);
    let pre = k * pair.amp_product * (w * tau).cos() * FRAC_1_SQRT_PI / (2.0 * ell);
    Ok(ScaledValue {
        mantissa: -weight * pre * re,
        log_scale,
    })
}

/// `S₂^(ℓ)` for a kick after Alice's lightband; underflows to 0 once the
/// suppression passes the `f64` range (see [`s2_ell_timelike_delta_scaled`]).
pub fn s2_ell_timelike_delta(pair: &DetectorPair, sd: &SpectralDensity) -> Result<f64, Error> {
    s2_ell_timelike_delta_scaled(pair, sd).map(|v| v.value())
}

/// `(s2_total - s2_local)/s2_local` for Bob's window inside the lightband.
pub fn ratio_nonlocal(pair: &DetectorPair, sd: &SpectralDensity) -> Result<f64, Error> {
    let local = s2_local_lightband_extended(pair)?;
    if local.abs() < RATIO_HAZARD {
        return Err(Error::DivisionHazard { local });
    }
    Ok(excess_lightband_extended(pair, sd)? / local)
}
