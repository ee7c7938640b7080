//! Detector configurations and the closed-form leading-order signaling terms.
//!
//! All amplitudes are real, both detectors share the gap `Ω`, and the
//! coupling constants `λ_A λ_B` are kept outside `S₂` (`S = λ_A λ_B S₂`).

mod closed_form;

pub use closed_form::{
    excess_lightband_delta, excess_lightband_extended, leading_correction_lightband_delta,
    leading_correction_lightband_extended, ratio_nonlocal, s2_ell_lightband_delta,
    s2_ell_lightband_extended, s2_ell_timelike_delta, s2_ell_timelike_delta_scaled,
    s2_local_lightband_delta, s2_local_lightband_extended, ScaledValue, RATIO_HAZARD,
};

use crate::error::Error;
use crate::field::SpectralDensity;

/// A detector's coupling window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SwitchingProfile {
    /// `χ(t) = κ δ(t - at)`; `kick` is κ, a length.
    Delta { at: f64, kick: f64 },
    /// `χ(t) = 1` on `[start, end]`.
    Rect { start: f64, end: f64 },
}

impl SwitchingProfile {
    pub fn delta(at: f64, kick: f64) -> Result<Self, Error> {
        let p = SwitchingProfile::Delta { at, kick };
        p.validate()?;
        Ok(p)
    }

    pub fn rect(start: f64, end: f64) -> Result<Self, Error> {
        let p = SwitchingProfile::Rect { start, end };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        match *self {
            SwitchingProfile::Delta { at, kick } => {
                if !at.is_finite() {
                    return Err(Error::invalid("kick time must be finite"));
                }
                if !(kick > 0.0 && kick.is_finite()) {
                    return Err(Error::invalid(format!(
                        "kick strength must be positive, got {kick}"
                    )));
                }
            }
            SwitchingProfile::Rect { start, end } => {
                if !(start.is_finite() && end.is_finite()) {
                    return Err(Error::invalid("window limits must be finite"));
                }
                if !(start < end) {
                    return Err(Error::invalid(format!(
                        "window needs start < end, got [{start}, {end}]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Closed support `[lo, hi]`; a point for delta switching.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            SwitchingProfile::Delta { at, .. } => (at, at),
            SwitchingProfile::Rect { start, end } => (start, end),
        }
    }
}

/// Two detectors at rest a distance `separation` apart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorPair {
    pub omega: f64,
    /// `α_A β_A α_B β_B`.
    pub amp_product: f64,
    /// `(λ_A, λ_B)`; only the product scales the physical signal.
    pub couplings: (f64, f64),
    pub separation: f64,
    pub alice: SwitchingProfile,
    pub bob: SwitchingProfile,
}

/// Causal relation between Bob's window and Alice's lightband.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Configuration {
    /// Bob kicked strictly inside Alice's lightband.
    LightbandDelta,
    /// Bob's whole window inside Alice's lightband.
    LightbandExtended,
    /// Bob kicked after Alice's lightband has passed.
    TimelikeDelta,
    /// Bob's window after Alice's lightband has passed.
    TimelikeExtended,
    /// Bob's whole window precedes Alice's lightband.
    Spacelike,
    /// Anything else (windows straddling a lightband boundary).
    Mixed,
}

impl DetectorPair {
    /// Builds and validates a pair.
    pub fn new(
        omega: f64,
        amp_product: f64,
        separation: f64,
        alice: SwitchingProfile,
        bob: SwitchingProfile,
    ) -> Result<Self, Error> {
        let pair = DetectorPair {
            omega,
            amp_product,
            couplings: (1.0, 1.0),
            separation,
            alice,
            bob,
        };
        pair.validate()?;
        Ok(pair)
    }

    /// Alice on `[0, T]`, Bob kicked at `tau` with strength `kick`.
    pub fn delta_bob(
        omega: f64,
        amp_product: f64,
        separation: f64,
        t: f64,
        tau: f64,
        kick: f64,
    ) -> Result<Self, Error> {
        Self::new(
            omega,
            amp_product,
            separation,
            SwitchingProfile::rect(0.0, t)?,
            SwitchingProfile::delta(tau, kick)?,
        )
    }

    /// Alice on `[0, T]`, Bob on `[a, b]`.
    pub fn extended_bob(
        omega: f64,
        amp_product: f64,
        separation: f64,
        t: f64,
        a: f64,
        b: f64,
    ) -> Result<Self, Error> {
        Self::new(
            omega,
            amp_product,
            separation,
            SwitchingProfile::rect(0.0, t)?,
            SwitchingProfile::rect(a, b)?,
        )
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.separation > 0.0 && self.separation.is_finite()) {
            return Err(Error::invalid(format!(
                "separation must be positive, got {}",
                self.separation
            )));
        }
        if !self.omega.is_finite() || !self.amp_product.is_finite() {
            return Err(Error::invalid("gap and amplitude product must be finite"));
        }
        if !(self.couplings.0.is_finite() && self.couplings.1.is_finite()) {
            return Err(Error::invalid("couplings must be finite"));
        }
        self.alice.validate()?;
        self.bob.validate()?;
        let (a0, a1) = self.alice.support();
        let (b0, b1) = self.bob.support();
        // Bob must couple after Alice has decoupled; touching rectangular
        // windows share only a measure-zero instant.
        let after = match (self.alice, self.bob) {
            (SwitchingProfile::Rect { .. }, SwitchingProfile::Rect { .. }) => b0 >= a1,
            _ => b0 > a1,
        };
        if !after {
            return Err(Error::config(format!(
                "Bob's switching [{b0}, {b1}] must follow Alice's [{a0}, {a1}] without overlap"
            )));
        }
        Ok(())
    }

    /// Alice's window as `(start, end)`, when she uses rectangular switching.
    pub fn alice_window(&self) -> Option<(f64, f64)> {
        match self.alice {
            SwitchingProfile::Rect { start, end } => Some((start, end)),
            SwitchingProfile::Delta { .. } => None,
        }
    }

    pub fn configuration(&self) -> Configuration {
        let r = self.separation;
        let (a0, a1) = self.alice.support();
        let (b0, b1) = self.bob.support();
        if b1 < a0 + r {
            return Configuration::Spacelike;
        }
        match (self.alice, self.bob) {
            (SwitchingProfile::Rect { .. }, SwitchingProfile::Delta { at, .. }) => {
                if at > a0 + r && at < a1 + r {
                    Configuration::LightbandDelta
                } else if at > a1 + r {
                    Configuration::TimelikeDelta
                } else {
                    Configuration::Mixed
                }
            }
            (SwitchingProfile::Rect { .. }, SwitchingProfile::Rect { .. }) => {
                if b0 >= a0 + r && b1 <= a1 + r {
                    Configuration::LightbandExtended
                } else if b0 >= a1 + r {
                    Configuration::TimelikeExtended
                } else {
                    Configuration::Mixed
                }
            }
            _ => Configuration::Mixed,
        }
    }

    pub(crate) fn require(&self, want: Configuration) -> Result<(), Error> {
        self.validate()?;
        let got = self.configuration();
        if got != want {
            return Err(Error::config(format!(
                "expected a {want:?} configuration, found {got:?}"
            )));
        }
        match self.alice_window() {
            Some((0.0, _)) => Ok(()),
            _ => Err(Error::config(
                "closed forms need Alice switched on over [0, T]",
            )),
        }
    }
}

/// `S₂` split into its local part and the ℓ-dependent part.
///
/// With cone weight `w = 1 + 1/α` the total is `w·s2_local + s2_ell`;
/// `excess = s2_total - s2_local` is evaluated without forming that
/// difference, so it keeps full relative accuracy as ℓ → 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignalingBreakdown {
    pub s2_local: f64,
    pub s2_ell: f64,
    pub s2_total: f64,
    pub excess: f64,
    pub leading_correction: Option<f64>,
}

/// Evaluates every closed-form piece that applies to `pair`.
pub fn breakdown(pair: &DetectorPair, sd: &SpectralDensity) -> Result<SignalingBreakdown, Error> {
    match pair.configuration() {
        Configuration::LightbandDelta => {
            let s2_local = s2_local_lightband_delta(pair)?;
            let s2_ell = s2_ell_lightband_delta(pair, sd)?;
            let excess = excess_lightband_delta(pair, sd)?;
            Ok(SignalingBreakdown {
                s2_local,
                s2_ell,
                s2_total: s2_local + excess,
                excess,
                leading_correction: Some(leading_correction_lightband_delta(pair, sd)?),
            })
        }
        Configuration::LightbandExtended => {
            let s2_local = s2_local_lightband_extended(pair)?;
            let s2_ell = s2_ell_lightband_extended(pair, sd)?;
            let excess = excess_lightband_extended(pair, sd)?;
            Ok(SignalingBreakdown {
                s2_local,
                s2_ell,
                s2_total: s2_local + excess,
                excess,
                leading_correction: leading_correction_lightband_extended(pair, sd).ok(),
            })
        }
        Configuration::TimelikeDelta => {
            let s2_ell = s2_ell_timelike_delta(pair, sd)?;
            Ok(SignalingBreakdown {
                s2_local: 0.0,
                s2_ell,
                s2_total: s2_ell,
                excess: s2_ell,
                leading_correction: None,
            })
        }
        Configuration::Spacelike => Ok(SignalingBreakdown {
            s2_local: 0.0,
            s2_ell: 0.0,
            s2_total: 0.0,
            excess: 0.0,
            leading_correction: None,
        }),
        other => Err(Error::config(format!(
            "no closed form for a {other:?} configuration"
        ))),
    }
}
