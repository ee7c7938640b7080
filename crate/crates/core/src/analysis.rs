//! ℓ-sweeps, scaling fits and suppression classification.
//!
//! Fits are unweighted least squares on `ln|y|`, so `residual_rms` is the RMS
//! of the logarithmic residuals, i.e. approximately the relative misfit.

use rayon::prelude::*;

use crate::error::Error;
use crate::field::SpectralDensity;
use crate::signaling::{breakdown, DetectorPair, SignalingBreakdown};

/// Fewest points any fit accepts.
pub const MIN_FIT_POINTS: usize = 5;
/// Fewest points [`classify_suppression`] accepts.
pub const MIN_CLASSIFY_POINTS: usize = 8;
/// Decades the grid must span, in ℓ or in 1/ℓ², for classification.
pub const MIN_CLASSIFY_DECADES: f64 = 1.5;
/// One model must beat the other's residual RMS by this factor.
pub const SEPARATION: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitModel {
    /// `y = coefficient · ℓ^exponent`.
    PowerLaw { exponent: f64, coefficient: f64 },
    /// `ln|y| = intercept + slope/ℓ²`.
    ExpInvSq { slope: f64, intercept: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub model: FitModel,
    pub residual_rms: f64,
    /// Coefficient of determination of the linear fit in transformed coordinates.
    pub r_squared: f64,
    pub points_used: usize,
}

impl ScalingFit {
    /// Model value of `|y|` at `ell`.
    pub fn magnitude_at(&self, ell: f64) -> f64 {
        match self.model {
            FitModel::PowerLaw {
                exponent,
                coefficient,
            } => coefficient.abs() * ell.powf(exponent),
            FitModel::ExpInvSq { slope, intercept } => (intercept + slope / (ell * ell)).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suppression {
    Polynomial(i32),
    Exponential,
    Inconclusive,
}

/// A sample stored as `ln|y|` and sign, so values below the `f64` range
/// can still be fitted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSample {
    pub ell: f64,
    pub ln_abs: f64,
    pub sign: f64,
}

impl LogSample {
    pub fn from_value(ell: f64, value: f64) -> Self {
        LogSample {
            ell,
            ln_abs: value.abs().ln(),
            sign: value.signum(),
        }
    }
}

/// `count` log-spaced points from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, Error> {
    if !(min > 0.0 && max > min && count >= 2) {
        return Err(Error::DegenerateGrid(format!(
            "log grid [{min}, {max}] with {count} points"
        )));
    }
    let (lo, hi) = (min.ln(), max.ln());
    let step = (hi - lo) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|k| (lo + step * k as f64).exp()).collect();
    g[0] = min;
    g[count - 1] = max;
    Ok(g)
}

/// `count` evenly spaced points from `min` to `max` inclusive.
pub fn linear_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>, Error> {
    if !(max > min && count >= 2) {
        return Err(Error::DegenerateGrid(format!(
            "linear grid [{min}, {max}] with {count} points"
        )));
    }
    let step = (max - min) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|k| min + step * k as f64).collect();
    g[count - 1] = max;
    Ok(g)
}

fn check_grid(grid: &[f64]) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::DegenerateGrid("empty grid".into()));
    }
    if grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::DegenerateGrid("grid values must be positive".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::DegenerateGrid(
            "grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Evaluates `f` at every grid point in parallel; the output keeps grid order.
pub fn map_grid<T, F>(grid: &[f64], f: F) -> Result<Vec<(f64, T)>, Error>
where
    T: Send,
    F: Fn(f64) -> Result<T, Error> + Sync,
{
    check_grid(grid)?;
    grid.par_iter()
        .map(|&ell| f(ell).map(|v| (ell, v)))
        .collect()
}

/// Closed-form breakdowns of `pair` over `grid`, keeping `sd_template`'s α.
pub fn sweep(
    pair: &DetectorPair,
    sd_template: &SpectralDensity,
    grid: &[f64],
) -> Result<Vec<(f64, SignalingBreakdown)>, Error> {
    let alpha = sd_template.alpha();
    map_grid(grid, |ell| {
        breakdown(pair, &SpectralDensity::new(ell, alpha)?)
    })
}

fn to_log_samples(points: &[(f64, f64)]) -> Result<Vec<LogSample>, Error> {
    points
        .iter()
        .enumerate()
        .map(|(i, &(ell, y))| {
            if y == 0.0 || !y.is_finite() {
                Err(Error::DegenerateGrid(format!(
                    "value {y} at index {i} cannot be fitted on a log scale"
                )))
            } else {
                Ok(LogSample::from_value(ell, y))
            }
        })
        .collect()
}

fn check_samples(samples: &[LogSample]) -> Result<(), Error> {
    if samples.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateGrid(format!(
            "{} points, need at least {MIN_FIT_POINTS}",
            samples.len()
        )));
    }
    if let Some(i) = samples.iter().position(|s| s.sign != samples[0].sign) {
        return Err(Error::SignChange { index: i });
    }
    if samples
        .iter()
        .any(|s| !(s.ell > 0.0 && s.ln_abs.is_finite()))
    {
        return Err(Error::DegenerateGrid("non-finite sample".into()));
    }
    Ok(())
}

struct Line {
    slope: f64,
    intercept: f64,
    rms: f64,
    r_squared: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Result<Line, Error> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateGrid("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(Line {
        slope,
        intercept,
        rms: (ss_res / n).sqrt(),
        r_squared,
    })
}

/// Power-law fit on `(ln ℓ, ln|y|)` for samples given in log form.
pub fn fit_power_law_log(samples: &[LogSample]) -> Result<ScalingFit, Error> {
    check_samples(samples)?;
    let xs: Vec<f64> = samples.iter().map(|s| s.ell.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.ln_abs).collect();
    let line = least_squares(&xs, &ys)?;
    Ok(ScalingFit {
        model: FitModel::PowerLaw {
            exponent: line.slope,
            coefficient: samples[0].sign * line.intercept.exp(),
        },
        residual_rms: line.rms,
        r_squared: line.r_squared,
        points_used: samples.len(),
    })
}

/// `ln|y| = intercept + slope/ℓ²` fit for samples given in log form.
pub fn fit_exp_inv_sq_log(samples: &[LogSample]) -> Result<ScalingFit, Error> {
    check_samples(samples)?;
    let xs: Vec<f64> = samples.iter().map(|s| 1.0 / (s.ell * s.ell)).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.ln_abs).collect();
    let line = least_squares(&xs, &ys)?;
    Ok(ScalingFit {
        model: FitModel::ExpInvSq {
            slope: line.slope,
            intercept: line.intercept,
        },
        residual_rms: line.rms,
        r_squared: line.r_squared,
        points_used: samples.len(),
    })
}

/// Least-squares `|y| = c ℓ^p` on `(ln ℓ, ln|y|)`; all values must share a sign.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit, Error> {
    fit_power_law_log(&to_log_samples(points)?)
}

/// Least-squares `ln|y| = intercept + slope/ℓ²`; all values must share a sign.
pub fn fit_exp_inv_sq(points: &[(f64, f64)]) -> Result<ScalingFit, Error> {
    fit_exp_inv_sq_log(&to_log_samples(points)?)
}

fn decades(lo: f64, hi: f64) -> f64 {
    (hi / lo).log10().abs()
}

/// Classification for samples given in log form.
pub fn classify_suppression_log(samples: &[LogSample]) -> Suppression {
    if samples.len() < MIN_CLASSIFY_POINTS {
        return Suppression::Inconclusive;
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), s| {
            (lo.min(s.ell), hi.max(s.ell))
        });
    // A grid too narrow in ℓ may still span enough in 1/ℓ², the ExpInvSq abscissa.
    if decades(lo, hi) < MIN_CLASSIFY_DECADES && 2.0 * decades(lo, hi) < MIN_CLASSIFY_DECADES {
        return Suppression::Inconclusive;
    }
    let (Ok(pow), Ok(exp)) = (fit_power_law_log(samples), fit_exp_inv_sq_log(samples)) else {
        return Suppression::Inconclusive;
    };
    if pow.residual_rms * SEPARATION <= exp.residual_rms {
        match pow.model {
            FitModel::PowerLaw { exponent, .. } => Suppression::Polynomial(exponent.round() as i32),
            FitModel::ExpInvSq { .. } => unreachable!(),
        }
    } else if exp.residual_rms * SEPARATION <= pow.residual_rms {
        Suppression::Exponential
    } else {
        Suppression::Inconclusive
    }
}

/// Compares a power law against `exp(slope/ℓ²)` by residual RMS, requiring a
/// 10× separation; needs ≥ 8 points spanning ≥ 1.5 decades in ℓ or in 1/ℓ².
pub fn classify_suppression(points: &[(f64, f64)]) -> Suppression {
    match to_log_samples(points) {
        Ok(s) => classify_suppression_log(&s),
        Err(_) => Suppression::Inconclusive,
    }
}
