//! Executes a [`RunPlan`]: closed forms over the ℓ grid, optional oracle
//! cross-checks, fits and scenario-specific checks.

use nonlocal_signaling::analysis::{
    classify_suppression_log, fit_exp_inv_sq_log, fit_power_law_log, map_grid, FitModel, LogSample,
    ScalingFit, Suppression, MIN_FIT_POINTS,
};
use nonlocal_signaling::field::SpectralDensity;
use nonlocal_signaling::quad::{integrate_s2_nonlocal, QuadError, QuadratureResult};
use nonlocal_signaling::signaling::{
    breakdown, ratio_nonlocal, s2_ell_timelike_delta_scaled, DetectorPair, ScaledValue,
    SwitchingProfile,
};
use nonlocal_signaling::Error;
use serde::Serialize;

use crate::spec::{Parameters, RunPlan, Scenario};
use crate::CliError;

/// Relative agreement demanded of closed form and oracle, with an absolute floor.
pub const ORACLE_AGREEMENT: f64 = 1e-6;
pub const ORACLE_FLOOR: f64 = 1e-12;

/// One results-table row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Row {
    pub ell: f64,
    pub s2_local: f64,
    pub s2_ell: ScaledValue,
    pub s2_total: ScaledValue,
    /// `s2_total - s2_local`.
    pub correction: ScaledValue,
    pub leading_correction: Option<f64>,
    pub oracle: Option<QuadratureResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model")]
pub enum FitSummary {
    #[serde(rename = "power_law")]
    PowerLaw {
        exponent: f64,
        coefficient: f64,
        residual_rms: f64,
        r_squared: f64,
        points_used: usize,
    },
    #[serde(rename = "exp_inv_sq")]
    ExpInvSq {
        slope: f64,
        intercept: f64,
        residual_rms: f64,
        r_squared: f64,
        points_used: usize,
    },
}

impl From<&ScalingFit> for FitSummary {
    fn from(f: &ScalingFit) -> Self {
        match f.model {
            FitModel::PowerLaw {
                exponent,
                coefficient,
            } => FitSummary::PowerLaw {
                exponent,
                coefficient,
                residual_rms: f.residual_rms,
                r_squared: f.r_squared,
                points_used: f.points_used,
            },
            FitModel::ExpInvSq { slope, intercept } => FitSummary::ExpInvSq {
                slope,
                intercept,
                residual_rms: f.residual_rms,
                r_squared: f.r_squared,
                points_used: f.points_used,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub parameters: Parameters,
    pub fit: Option<FitSummary>,
    pub classification: String,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.summary.checks.iter().all(|c| c.pass)
    }
}

fn plain(v: f64) -> ScaledValue {
    ScaledValue {
        mantissa: v,
        log_scale: 0.0,
    }
}

fn sample(ell: f64, v: ScaledValue) -> LogSample {
    LogSample {
        ell,
        ln_abs: v.ln_abs(),
        sign: v.mantissa.signum(),
    }
}

fn timelike(scenario: Scenario) -> bool {
    matches!(scenario, Scenario::Timelike | Scenario::TimelikeSuppression)
}

fn evaluate(plan: &RunPlan, pair: &DetectorPair, ell: f64) -> Result<Row, Error> {
    let sd = SpectralDensity::new(ell, plan.alpha)?;
    let mut row = if timelike(plan.scenario) {
        let v = s2_ell_timelike_delta_scaled(pair, &sd)?;
        Row {
            ell,
            s2_local: 0.0,
            s2_ell: v,
            s2_total: v,
            correction: v,
            leading_correction: None,
            oracle: None,
        }
    } else {
        let b = breakdown(pair, &sd)?;
        Row {
            ell,
            s2_local: b.s2_local,
            s2_ell: plain(b.s2_ell),
            s2_total: plain(b.s2_total),
            correction: plain(b.excess),
            leading_correction: b.leading_correction,
            oracle: None,
        }
    };
    if plan.oracle_check {
        let o = integrate_s2_nonlocal(pair, &sd, plan.tolerance)?;
        if !o.converged {
            return Err(QuadError::NonConvergence {
                best: o.value,
                error: o.error_estimate,
            }
            .into());
        }
        row.oracle = Some(o);
    }
    Ok(row)
}

fn rows_for(
    plan: &RunPlan,
    pair_at: impl Fn(f64) -> Result<DetectorPair, Error> + Sync,
) -> Result<Vec<Row>, CliError> {
    let rows = map_grid(&plan.grid, |ell| evaluate(plan, &pair_at(ell)?, ell))?;
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

fn describe(s: Suppression) -> String {
    format!("{s:?}")
}

fn exponent_check(name: &str, samples: &[LogSample], target: f64, tol: f64) -> Check {
    let expected = format!("{target} ± {tol}");
    match fit_power_law_log(samples) {
        Ok(ScalingFit {
            model: FitModel::PowerLaw { exponent, .. },
            ..
        }) => Check {
            name: name.into(),
            expected,
            observed: format!("{exponent:.6}"),
            pass: (exponent - target).abs() <= tol,
        },
        Ok(_) => unreachable!(),
        Err(e) => Check {
            name: name.into(),
            expected,
            observed: e.to_string(),
            pass: false,
        },
    }
}

fn classification_check(name: &str, got: Suppression, want: Suppression) -> Check {
    Check {
        name: name.into(),
        expected: describe(want),
        observed: describe(got),
        pass: got == want,
    }
}

fn oracle_check(rows: &[Row]) -> Option<Check> {
    let mut worst = 0.0_f64;
    let mut pass = true;
    for row in rows {
        let o = row.oracle?;
        let closed = row.s2_ell.value();
        let diff = (closed - o.value).abs();
        pass &= diff <= (ORACLE_AGREEMENT * closed.abs()).max(ORACLE_FLOOR);
        if closed != 0.0 {
            worst = worst.max(diff / closed.abs());
        }
    }
    Some(Check {
        name: "oracle agreement".into(),
        expected: format!(
            "|closed - oracle| <= max({ORACLE_AGREEMENT:e}·|closed|, {ORACLE_FLOOR:e})"
        ),
        observed: format!("worst relative deviation {worst:.3e}"),
        pass,
    })
}

fn quadratic_checks(rows: &[Row], samples: &[LogSample], scenario: Scenario) -> Vec<Check> {
    let mut checks = Vec::new();
    match scenario {
        Scenario::Fig3 => {
            checks.push(exponent_check("correction exponent", samples, 2.0, 0.05));
            let rms = fit_power_law_log(samples).map(|f| f.residual_rms);
            checks.push(Check {
                name: "fit residual rms".into(),
                expected: "<= 0.01 (relative)".into(),
                observed: match &rms {
                    Ok(r) => format!("{r:.3e}"),
                    Err(e) => e.to_string(),
                },
                pass: matches!(rms, Ok(r) if r <= 0.01),
            });
        }
        Scenario::LocalLimit => {
            let decreasing = rows
                .windows(2)
                .all(|w| w[0].correction.ln_abs() < w[1].correction.ln_abs());
            checks.push(Check {
                name: "|s2_total - s2_local| shrinks with ell".into(),
                expected: "strictly monotone".into(),
                observed: if decreasing {
                    "strictly monotone"
                } else {
                    "not monotone"
                }
                .into(),
                pass: decreasing,
            });
            checks.push(exponent_check("correction exponent", samples, 2.0, 0.1));
            let approach: Vec<LogSample> = rows
                .iter()
                .map(|r| sample(r.ell, plain(r.s2_ell.value() + r.s2_local)))
                .collect();
            checks.push(exponent_check(
                "s2_ell + s2_local exponent",
                &approach,
                2.0,
                0.1,
            ));
        }
        _ => {
            checks.push(exponent_check("correction exponent", samples, 2.0, 0.1));
        }
    }
    if rows.len() >= MIN_FIT_POINTS && rows.iter().all(|r| r.leading_correction.is_some()) {
        let resid: Vec<LogSample> = rows
            .iter()
            .map(|r| {
                sample(
                    r.ell,
                    plain(r.correction.value() - r.leading_correction.unwrap_or(0.0)),
                )
            })
            .collect();
        checks.push(exponent_check(
            "leading-order residual exponent",
            &resid,
            4.0,
            0.3,
        ));
    }
    checks
}

fn timelike_checks(samples: &[LogSample]) -> Vec<Check> {
    let fit = fit_exp_inv_sq_log(samples);
    vec![Check {
        name: "exp(-c/ell^2) fit R^2".into(),
        expected: ">= 0.999".into(),
        observed: match &fit {
            Ok(f) => format!("{:.6}", f.r_squared),
            Err(e) => e.to_string(),
        },
        pass: matches!(fit, Ok(f) if f.r_squared >= 0.999),
    }]
}

fn boundary_check(plan: &RunPlan) -> Result<Check, CliError> {
    let (_, t_end) = plan.pair.alice_window().unwrap_or((0.0, 0.0));
    let kick = match plan.pair.bob {
        SwitchingProfile::Delta { kick, .. } => kick,
        SwitchingProfile::Rect { .. } => 1.0,
    };
    let boundary = rows_for(
        &RunPlan {
            oracle_check: false,
            ..plan.clone()
        },
        |ell| {
            let p = plan.pair;
            DetectorPair::delta_bob(
                p.omega,
                p.amp_product,
                p.separation,
                t_end,
                t_end + p.separation + ell / 10.0,
                kick,
            )
        },
    )?;
    let samples: Vec<LogSample> = boundary.iter().map(|r| sample(r.ell, r.s2_ell)).collect();
    Ok(classification_check(
        "classification at tau - T - R = ell/10",
        classify_suppression_log(&samples),
        Suppression::Polynomial(2),
    ))
}

fn ratio_checks(plan: &RunPlan) -> Result<Vec<Check>, CliError> {
    let p = plan.pair;
    let (_, t) = p.alice_window().unwrap_or((0.0, 0.0));
    let r = p.separation;
    plan.grid
        .iter()
        .map(|&ell| {
            let ratio = ratio_nonlocal(&p, &SpectralDensity::new(ell, plan.alpha)?)?;
            let target = 8.0 * ell * ell / (r * r) * (r + t) / t;
            Ok(Check {
                name: format!("ratio_nonlocal at ell = {ell}"),
                expected: format!("{target:.6e} within 1%"),
                observed: format!("{ratio:.6e} ({:.4} of expected)", ratio / target),
                pass: ((ratio - target) / target).abs() <= 0.01,
            })
        })
        .collect()
}

/// Runs `plan`. Numerical failures are errors; failed checks are reported in
/// the summary and make [`Outcome::passed`] false.
pub fn run(plan: &RunPlan, parameters: &Parameters) -> Result<Outcome, CliError> {
    let rows = rows_for(plan, |_| Ok(plan.pair))?;
    let samples: Vec<LogSample> = rows.iter().map(|r| sample(r.ell, r.correction)).collect();
    let fit = if rows.len() < MIN_FIT_POINTS {
        None
    } else if timelike(plan.scenario) {
        fit_exp_inv_sq_log(&samples).ok()
    } else {
        fit_power_law_log(&samples).ok()
    };
    let classification = classify_suppression_log(&samples);

    let mut checks = match plan.scenario {
        Scenario::LightbandDelta
        | Scenario::LightbandExtended
        | Scenario::Fig3
        | Scenario::LocalLimit => {
            let mut c = quadratic_checks(&rows, &samples, plan.scenario);
            c.push(classification_check(
                "classification",
                classification,
                Suppression::Polynomial(2),
            ));
            c
        }
        Scenario::Timelike => {
            let mut c = timelike_checks(&samples);
            c.push(classification_check(
                "classification",
                classification,
                Suppression::Exponential,
            ));
            c
        }
        Scenario::TimelikeSuppression => {
            let mut c = timelike_checks(&samples);
            c.push(classification_check(
                "classification",
                classification,
                Suppression::Exponential,
            ));
            c.push(boundary_check(plan)?);
            c
        }
        Scenario::DegenerateRatio => ratio_checks(plan)?,
    };
    checks.extend(oracle_check(&rows));

    Ok(Outcome {
        summary: Summary {
            scenario: plan.scenario.name().into(),
            parameters: *parameters,
            fit: fit.as_ref().map(FitSummary::from),
            classification: describe(classification),
            checks,
        },
        rows,
    })
}
