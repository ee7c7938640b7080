//! Direct quadrature of `S₂ = 4·amp ∫dt₂ χ_B cos(Ωt₂) ∫dt₁ χ_A cos(Ωt₁) K(t₁, t₂)`.
//!
//! For the interior kernel the inner variable is `u = (Δt² - R²)/4β`, with
//! `β` the kernel's width, so the kernel becomes `amplitude(u)·e^{-u}` on an
//! O(1) scale for every ℓ. The factor `e^{-u_lo}` of the lowest reachable `u`
//! is pulled out of each inner integral.

use std::cell::Cell;
use std::f64::consts::PI;

use super::gauss_kronrod::{integrate, EvalBudget, QuadratureResult, Tolerance};
use super::QuadError;
use crate::field::SpectralModel;
use crate::signaling::{DetectorPair, SwitchingProfile};

/// Kernel evaluations allowed per S₂ integral.
pub const S2_EVALUATION_BUDGET: usize = 10_000_000;

/// Tightest relative tolerance the oracle accepts.
pub const MIN_TOLERANCE: f64 = 1e-10;

/// `e^{-v}` is below the smallest subnormal past this point.
const V_MAX: f64 = 745.0;

fn check_tolerance(tol: f64) -> Result<(), QuadError> {
    if !(MIN_TOLERANCE..1.0).contains(&tol) {
        return Err(QuadError::InvalidTolerance(tol));
    }
    Ok(())
}

fn exact(value: f64, evaluations: usize) -> QuadratureResult {
    QuadratureResult {
        value,
        error_estimate: 0.0,
        evaluations,
        converged: true,
        abs_integral: value.abs(),
    }
}

fn finish(value: f64, error: f64, evaluations: usize, abs: f64, tol: f64) -> QuadratureResult {
    QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= tol * value.abs() || error == 0.0,
        abs_integral: abs,
    }
}

/// Oracle for `S₂^local`: the massless cone delta `δ(σ)/2π` is integrated
/// analytically in `t₁`, leaving a quadrature over Bob's window.
pub fn integrate_s2_local(pair: &DetectorPair, tol: f64) -> Result<QuadratureResult, QuadError> {
    check_tolerance(tol)?;
    let (r, w, amp) = (pair.separation, pair.omega, pair.amp_product);
    match (pair.alice, pair.bob) {
        (SwitchingProfile::Rect { start, end }, SwitchingProfile::Rect { start: b0, end: b1 }) => {
            let lo = b0.max(start + r);
            let hi = b1.min(end + r);
            if lo >= hi {
                return Ok(exact(0.0, 0));
            }
            let budget = EvalBudget::new(S2_EVALUATION_BUDGET);
            let res = integrate(
                |t| amp / (PI * r) * (w * t).cos() * (w * (t - r)).cos(),
                lo,
                hi,
                &[],
                Tolerance::relative(0.5 * tol),
                &budget,
            )?;
            Ok(finish(
                res.value,
                res.error_estimate,
                res.evaluations,
                res.abs_integral,
                tol,
            ))
        }
        (SwitchingProfile::Rect { start, end }, SwitchingProfile::Delta { at, kick }) => {
            let t1 = at - r;
            let v = if t1 > start && t1 < end {
                kick * amp * (w * at).cos() * (w * t1).cos() / (PI * r)
            } else {
                0.0
            };
            Ok(exact(v, 1))
        }
        (SwitchingProfile::Delta { at, kick }, SwitchingProfile::Rect { start, end }) => {
            let t2 = at + r;
            let v = if t2 > start && t2 < end {
                kick * amp * (w * at).cos() * (w * t2).cos() / (PI * r)
            } else {
                0.0
            };
            Ok(exact(v, 1))
        }
        (SwitchingProfile::Delta { .. }, SwitchingProfile::Delta { .. }) => Ok(exact(0.0, 0)),
    }
}

struct Inner<'a> {
    model: &'a dyn SpectralModel,
    r: f64,
    omega: f64,
    beta: f64,
    rel: f64,
    budget: &'a EvalBudget,
    worst_rel: Cell<f64>,
    failure: Cell<Option<QuadError>>,
}

impl Inner<'_> {
    /// `∫ dt₁ cos(Ωt₁) K(σ)` over Alice's window `[a0, a1]` at Bob time `t2`.
    fn at(&self, t2: f64, a0: f64, a1: f64) -> f64 {
        let r = self.r;
        let dt_min = (t2 - a1).max(r);
        let dt_max = t2 - a0;
        if dt_max <= r {
            return 0.0;
        }
        let four_beta = 4.0 * self.beta;
        let u_lo = (dt_min - r) * (dt_min + r) / four_beta;
        let span = ((dt_max - dt_min) * (dt_max + dt_min) / four_beta).min(V_MAX);
        let scale = (-u_lo).exp();
        if scale == 0.0 {
            return 0.0;
        }
        let d2 = dt_min * dt_min;
        let w = self.omega;
        let f = |v: f64| {
            let dt = (d2 + four_beta * v).sqrt();
            self.model.scaled_amplitude(u_lo + v) * (-v).exp() * (w * (t2 - dt)).cos() / (2.0 * dt)
        };
        let floor = 1e-3 * self.rel * self.model.scaled_amplitude(u_lo).abs() / (2.0 * dt_min);
        let cuts: Vec<f64> = [1.0, 4.0, 12.0, 40.0, 120.0]
            .iter()
            .copied()
            .filter(|&c| c < span)
            .collect();
        match integrate(
            f,
            0.0,
            span,
            &cuts,
            Tolerance {
                rel: self.rel,
                abs: floor,
            },
            self.budget,
        ) {
            Ok(res) => {
                let denom = res.value.abs().max(floor / self.rel);
                let rel = res.error_estimate / denom;
                if rel > self.worst_rel.get() {
                    self.worst_rel.set(rel);
                }
                scale * res.value
            }
            Err(e) => {
                let prev = self.failure.take();
                self.failure.set(prev.or(Some(e)));
                0.0
            }
        }
    }
}

/// Oracle for `S₂^(ℓ)`, the part of `S₂` carried by the timelike interior
/// kernel of `model`.
///
/// Fails with [`QuadError::BudgetExceeded`] after
/// [`S2_EVALUATION_BUDGET`] kernel calls.
pub fn integrate_s2_nonlocal(
    pair: &DetectorPair,
    model: &dyn SpectralModel,
    tol: f64,
) -> Result<QuadratureResult, QuadError> {
    check_tolerance(tol)?;
    let (r, w, amp) = (pair.separation, pair.omega, pair.amp_product);
    let budget = EvalBudget::new(S2_EVALUATION_BUDGET);
    let inner = Inner {
        model,
        r,
        omega: w,
        beta: model.width(),
        rel: 0.1 * tol,
        budget: &budget,
        worst_rel: Cell::new(0.0),
        failure: Cell::new(None),
    };
    let result = match (pair.alice, pair.bob) {
        (SwitchingProfile::Rect { start, end }, SwitchingProfile::Delta { at, kick }) => {
            let v = 4.0 * amp * kick * (w * at).cos() * inner.at(at, start, end);
            let rel = inner.worst_rel.get();
            Ok(finish(v, rel * v.abs(), budget.used(), v.abs(), tol))
        }
        (SwitchingProfile::Rect { start, end }, SwitchingProfile::Rect { start: b0, end: b1 }) => {
            let beta = model.width();
            let mut cuts = Vec::new();
            for edge in [start + r, end + r] {
                cuts.push(edge);
                for k in [1.0, 4.0, 16.0, 64.0] {
                    cuts.push(edge + k * beta / r);
                }
            }
            let outer = integrate(
                |t2| 4.0 * amp * (w * t2).cos() * inner.at(t2, start, end),
                b0,
                b1,
                &cuts,
                Tolerance::relative(0.5 * tol),
                &budget,
            )?;
            let error = outer.error_estimate + inner.worst_rel.get() * outer.abs_integral;
            Ok(finish(
                outer.value,
                error,
                budget.used(),
                outer.abs_integral,
                tol,
            ))
        }
        (SwitchingProfile::Delta { at, kick }, bob) => {
            let point = |t2: f64| {
                let dt = t2 - at;
                let sigma = (r - dt) * (r + dt);
                if dt > 0.0 {
                    4.0 * amp * kick * (w * at).cos() * (w * t2).cos() * model.interior(sigma)
                } else {
                    0.0
                }
            };
            match bob {
                SwitchingProfile::Delta { at: tb, kick: kb } => Ok(exact(kb * point(tb), 1)),
                SwitchingProfile::Rect { start, end } => {
                    let res = integrate(
                        point,
                        start,
                        end,
                        &[at + r],
                        Tolerance::relative(0.5 * tol),
                        &budget,
                    )?;
                    Ok(finish(
                        res.value,
                        res.error_estimate,
                        res.evaluations,
                        res.abs_integral,
                        tol,
                    ))
                }
            }
        }
    };
    if let Some(e) = inner.failure.take() {
        return Err(e);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralDensity;

    #[test]
    fn rejects_tolerance_out_of_range() {
        let pair = DetectorPair::delta_bob(1.0, 1.0, 7.0, 2.0, 8.0, 1.0).unwrap();
        let sd = SpectralDensity::with_ell(0.1).unwrap();
        assert!(matches!(
            integrate_s2_nonlocal(&pair, &sd, 1e-12),
            Err(QuadError::InvalidTolerance(_))
        ));
        assert!(matches!(
            integrate_s2_local(&pair, 0.0),
            Err(QuadError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn spacelike_window_integrates_to_zero() {
        let pair = DetectorPair::extended_bob(1.0, 1.0, 7.0, 2.0, 3.0, 6.5).unwrap();
        let sd = SpectralDensity::with_ell(0.1).unwrap();
        let r = integrate_s2_nonlocal(&pair, &sd, 1e-8).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.converged);
        assert_eq!(integrate_s2_local(&pair, 1e-8).unwrap().value, 0.0);
    }

    #[test]
    fn local_delta_matches_cone_formula() {
        let pair = DetectorPair::delta_bob(1.0, 1.0, 7.0, 2.0, 8.0, 1.0).unwrap();
        let v = integrate_s2_local(&pair, 1e-10).unwrap().value;
        assert!((v - 8f64.cos() * 1f64.cos() / (7.0 * PI)).abs() < 1e-16);
        let timelike = DetectorPair::delta_bob(1.0, 1.0, 7.0, 2.0, 12.0, 1.0).unwrap();
        assert_eq!(integrate_s2_local(&timelike, 1e-10).unwrap().value, 0.0);
    }

    #[test]
    fn local_extended_degenerate_gap() {
        let pair = DetectorPair::extended_bob(0.0, 1.0, 7.0, 2.0, 8.0, 8.1).unwrap();
        let v = integrate_s2_local(&pair, 1e-10).unwrap().value;
        assert!((v - 0.1 / (7.0 * PI)).abs() < 1e-15);
    }
}
