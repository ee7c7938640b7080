//! Field-theoretic kernels: spectral density, massive and non-local
//! Pauli–Jordan functions, and the nascent delta that carries the local limit.
//!
//! Signature convention: `σ = -Δt² + Δx²`, so `σ < 0` is timelike. The step
//! `Θ(-σ)` is taken as 0 at `σ = 0`.

use std::f64::consts::PI;

use crate::error::Error;
use crate::quad::{integrate, EvalBudget, QuadError, QuadratureResult, Tolerance};
use crate::specfun::bessel_j1;

/// Gaussian spectral density `ρ(μ²) = ℓ² exp(-α ℓ² μ²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDensity {
    ell: f64,
    alpha: f64,
}

impl SpectralDensity {
    pub fn new(ell: f64, alpha: f64) -> Result<Self, Error> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::invalid(format!(
                "non-locality scale must be positive, got {ell}"
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(SpectralDensity { ell, alpha })
    }

    /// `α = 1`.
    pub fn with_ell(ell: f64) -> Result<Self, Error> {
        Self::new(ell, 1.0)
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn decomposition(&self) -> CommutatorDecomposition {
        CommutatorDecomposition { density: *self }
    }
}

/// A spectral weight whose interior commutator is `-A exp(σ/4β)` for `σ < 0`.
///
/// Every density of the form `ρ(μ²) = c·exp(-βμ²)` has this shape with
/// `A = c/(8πβ²)` and adds `c/β` copies of the massless commutator on the cone.
pub trait SpectralModel: Sync {
    /// Multiplier of the massless cone-supported commutator, `1 + ∫ρ dμ²`.
    fn cone_weight(&self) -> f64;
    /// The interior (timelike) kernel at `σ < 0`; zero for `σ >= 0`.
    fn interior(&self, sigma: f64) -> f64;
    /// Natural scale `β` (length²) of the interior kernel's decay in `-σ`.
    fn width(&self) -> f64;
    /// `-4β·interior(-4βu)·exp(u)`, i.e. the kernel's amplitude once the
    /// quadrature variable `u = -σ/4β` is used. Constant for Gaussian shapes.
    fn scaled_amplitude(&self, u: f64) -> f64 {
        let b = self.width();
        4.0 * b * self.interior(-4.0 * b * u) * u.exp()
    }
}

/// `ρ(μ²) = c·exp(-β μ²)` with arbitrary amplitude and width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentialDensity {
    pub amplitude: f64,
    pub width: f64,
}

impl ExponentialDensity {
    /// Constant `ρ = ℓ²` regulated by `exp(-εμ²)`.
    pub fn regulated_constant(ell: f64, epsilon: f64) -> Self {
        ExponentialDensity {
            amplitude: ell * ell,
            width: epsilon,
        }
    }

    pub fn rho(&self, mu_sq: f64) -> f64 {
        self.amplitude * (-self.width * mu_sq).exp()
    }

    /// `c/β`: the extra cone weight, and the factor relating this kernel to
    /// the unit-weight Gaussian kernel of scale `√β`.
    pub fn weight(&self) -> f64 {
        self.amplitude / self.width
    }
}

impl SpectralModel for ExponentialDensity {
    fn cone_weight(&self) -> f64 {
        1.0 + self.weight()
    }

    fn interior(&self, sigma: f64) -> f64 {
        if sigma >= 0.0 {
            return 0.0;
        }
        -self.amplitude / (8.0 * PI * self.width * self.width) * (sigma / (4.0 * self.width)).exp()
    }

    fn width(&self) -> f64 {
        self.width
    }

    fn scaled_amplitude(&self, _u: f64) -> f64 {
        -self.weight() / (2.0 * PI)
    }
}

impl From<SpectralDensity> for ExponentialDensity {
    fn from(sd: SpectralDensity) -> Self {
        ExponentialDensity {
            amplitude: sd.ell * sd.ell,
            width: sd.alpha * sd.ell * sd.ell,
        }
    }
}

impl SpectralModel for SpectralDensity {
    fn cone_weight(&self) -> f64 {
        1.0 + 1.0 / self.alpha
    }

    fn interior(&self, sigma: f64) -> f64 {
        nonlocal_interior(sigma, self)
    }

    fn width(&self) -> f64 {
        self.alpha * self.ell * self.ell
    }

    fn scaled_amplitude(&self, _u: f64) -> f64 {
        -1.0 / (2.0 * PI * self.alpha)
    }
}

/// Spacetime separation of two events.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpacetimeInterval {
    pub dt: f64,
    pub dx: f64,
}

/// Causal character of an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CausalCharacter {
    Timelike,
    Lightlike,
    Spacelike,
}

impl SpacetimeInterval {
    pub fn new(dt: f64, dx: f64) -> Self {
        SpacetimeInterval { dt, dx }
    }

    /// `σ = -Δt² + Δx²`.
    pub fn sigma(&self) -> f64 {
        (self.dx - self.dt) * (self.dx + self.dt)
    }

    pub fn character(&self) -> CausalCharacter {
        let s = self.sigma();
        if s < 0.0 {
            CausalCharacter::Timelike
        } else if s == 0.0 {
            CausalCharacter::Lightlike
        } else {
            CausalCharacter::Spacelike
        }
    }
}

/// The non-local commutator split into a weighted massless part and a
/// timelike interior function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorDecomposition {
    density: SpectralDensity,
}

impl CommutatorDecomposition {
    /// `1 + 1/α`.
    pub fn cone_weight(&self) -> f64 {
        self.density.cone_weight()
    }

    pub fn interior(&self, sigma: f64) -> f64 {
        nonlocal_interior(sigma, &self.density)
    }
}

/// `ρ(μ²) = ℓ² exp(-αℓ²μ²)`.
pub fn rho(mu_sq: f64, sd: &SpectralDensity) -> f64 {
    let l2 = sd.ell * sd.ell;
    l2 * (-sd.alpha * l2 * mu_sq).exp()
}

/// Massive minus massless Pauli–Jordan function:
/// `-(μ / 4π√-σ) Θ(-σ) J₁(μ√-σ)`.
pub fn massive_pj_correction(sigma: f64, mu: f64) -> f64 {
    if sigma >= 0.0 || mu == 0.0 {
        return 0.0;
    }
    let s = (-sigma).sqrt();
    -mu / (4.0 * PI * s) * bessel_j1(mu * s)
}

/// Interior term of the non-local commutator for `σ < 0`:
/// `-(1/8πα²ℓ²) exp(σ/4αℓ²)`, which is `-(1/8πℓ²) exp(σ/4ℓ²)` at `α = 1`.
/// Returns 0 for `σ >= 0`.
pub fn nonlocal_interior(sigma: f64, sd: &SpectralDensity) -> f64 {
    if sigma >= 0.0 {
        return 0.0;
    }
    let beta = sd.alpha * sd.ell * sd.ell;
    -1.0 / (8.0 * PI * sd.alpha * beta) * (sigma / (4.0 * beta)).exp()
}

/// `∫ dμ² ρ(μ²) · massive_pj_correction(σ, μ)` by direct quadrature over
/// `μ² ∈ [0, cutoff]`.
pub fn interior_by_mass_integral<F: Fn(f64) -> f64>(
    sigma: f64,
    rho: F,
    mu_sq_cutoff: f64,
    rel_tol: f64,
) -> Result<QuadratureResult, Error> {
    let budget = EvalBudget::new(10_000_000);
    if sigma >= 0.0 {
        return Ok(integrate(
            |_| 0.0,
            0.0,
            1.0,
            &[],
            Tolerance::relative(rel_tol),
            &budget,
        )?);
    }
    // Integrate in μ with dμ² = 2μ dμ; split at the Bessel zeros' spacing.
    let s = (-sigma).sqrt();
    let mu_max = mu_sq_cutoff.sqrt();
    let period = PI / s;
    let n = ((mu_max / period).ceil() as usize).min(100_000);
    let cuts: Vec<f64> = (1..n).map(|k| k as f64 * period).collect();
    let r = integrate(
        |mu| 2.0 * mu * rho(mu * mu) * massive_pj_correction(sigma, mu),
        0.0,
        mu_max,
        &cuts,
        Tolerance::relative(rel_tol),
        &budget,
    )?;
    Ok(r)
}

/// `∫_{σ<0} f(σ) · (-1/8πℓ²) exp(σ/4ℓ²) dσ` (generalised to α through
/// [`nonlocal_interior`]). Tends to `-f(0)/2π` as ℓ → 0 for `α = 1`.
pub fn nascent_delta_pairing<F: Fn(f64) -> f64>(
    test_fn: F,
    sd: &SpectralDensity,
) -> Result<QuadratureResult, Error> {
    let beta = sd.alpha * sd.ell * sd.ell;
    let amp = -1.0 / (2.0 * PI * sd.alpha);
    let budget = EvalBudget::new(10_000_000);
    // σ = -4βu, so the kernel becomes amp·exp(-u) du.
    const U_MAX: f64 = 746.0;
    let r = integrate(
        |u| test_fn(-4.0 * beta * u) * amp * (-u).exp(),
        0.0,
        U_MAX,
        &[1.0, 5.0, 20.0, 50.0],
        Tolerance {
            rel: 1e-13,
            abs: 1e-300,
        },
        &budget,
    )?;
    if !r.converged {
        return Err(QuadError::NonConvergence {
            best: r.value,
            error: r.error_estimate,
        }
        .into());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(ell: f64) -> SpectralDensity {
        SpectralDensity::with_ell(ell).unwrap()
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(0.0, &unit(0.5)), 0.25);
        assert!((rho(4.0, &unit(1.0)) - (-4f64).exp()).abs() < 1e-17);
    }

    #[test]
    fn rho_integrates_to_inverse_alpha() {
        for alpha in [1.0, 0.5, 3.0] {
            let sd = SpectralDensity::new(0.7, alpha).unwrap();
            let budget = EvalBudget::new(100_000);
            let cutoff = 800.0 / (alpha * 0.49);
            let r = integrate(
                |m| rho(m, &sd),
                0.0,
                cutoff,
                &[],
                Tolerance::relative(1e-12),
                &budget,
            )
            .unwrap();
            assert!(
                (r.value - 1.0 / alpha).abs() < 1e-8,
                "alpha {alpha}: {}",
                r.value
            );
        }
    }

    #[test]
    fn massive_correction_cases() {
        assert_eq!(massive_pj_correction(1.0, 2.0), 0.0);
        assert_eq!(massive_pj_correction(-1.0, 0.0), 0.0);
        let v = massive_pj_correction(-4.0, 1.0);
        assert!((v + bessel_j1(2.0) / (8.0 * PI)).abs() < 1e-17);
    }

    #[test]
    fn interior_limits() {
        assert_eq!(nonlocal_interior(-1e6, &unit(1.0)), 0.0);
        assert!((nonlocal_interior(-1e-300, &unit(1.0)) + 1.0 / (8.0 * PI)).abs() < 1e-17);
        assert_eq!(nonlocal_interior(0.0, &unit(1.0)), 0.0);
        assert_eq!(nonlocal_interior(3.0, &unit(1.0)), 0.0);
    }

    #[test]
    fn interior_matches_mass_integral() {
        for (sigma, ell, alpha) in [
            (-2.0, 0.3, 1.0),
            (-0.5, 0.3, 1.0),
            (-2.0, 0.5, 2.0),
            (-1.0, 0.4, 0.5),
        ] {
            let sd = SpectralDensity::new(ell, alpha).unwrap();
            let cutoff = 80.0 / (alpha * ell * ell);
            let oracle = interior_by_mass_integral(sigma, |m| rho(m, &sd), cutoff, 1e-12).unwrap();
            let closed = nonlocal_interior(sigma, &sd);
            assert!(
                ((oracle.value - closed) / closed).abs() < 1e-8,
                "σ={sigma} ℓ={ell} α={alpha}: {} vs {closed}",
                oracle.value
            );
        }
    }

    #[test]
    fn decomposition_invariants() {
        let d = unit(0.2).decomposition();
        assert_eq!(d.cone_weight(), 2.0);
        let mut prev = 0.0;
        for k in 1..50 {
            let v = d.interior(-0.01 * k as f64);
            assert!(v < 0.0);
            assert!(v.abs() < prev || k == 1);
            prev = v.abs();
        }
    }

    #[test]
    fn interval_character() {
        assert_eq!(
            SpacetimeInterval::new(2.0, 1.0).character(),
            CausalCharacter::Timelike
        );
        assert_eq!(
            SpacetimeInterval::new(1.0, 1.0).character(),
            CausalCharacter::Lightlike
        );
        assert_eq!(
            SpacetimeInterval::new(0.5, 1.0).character(),
            CausalCharacter::Spacelike
        );
        assert_eq!(SpacetimeInterval::new(2.0, 1.0).sigma(), -3.0);
    }

    #[test]
    fn pairing_of_zero_and_one() {
        let z = nascent_delta_pairing(|_| 0.0, &unit(0.1)).unwrap();
        assert_eq!(z.value, 0.0);
        for ell in [1e-3, 0.1, 2.0] {
            let one = nascent_delta_pairing(|_| 1.0, &unit(ell)).unwrap();
            assert!((one.value + 1.0 / (2.0 * PI)).abs() < 1e-15);
        }
    }

    #[test]
    fn pairing_of_cosine_small_ell() {
        // Exact: -(1/2π)/(1 + 16ℓ⁴).
        let ell = 1e-2;
        let r = nascent_delta_pairing(f64::cos, &unit(ell)).unwrap();
        let exact = -1.0 / (2.0 * PI) / (1.0 + 16.0 * ell.powi(4));
        assert!((r.value - exact).abs() < 1e-15);
        assert!((r.value + 1.0 / (2.0 * PI)).abs() < ell * ell);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(SpectralDensity::new(0.0, 1.0).is_err());
        assert!(SpectralDensity::new(1.0, -1.0).is_err());
    }

    #[test]
    fn exponential_density_matches_gaussian() {
        let sd = SpectralDensity::new(0.3, 1.7).unwrap();
        let ed = ExponentialDensity::from(sd);
        for s in [-0.01, -0.3, -2.0] {
            assert!((ed.interior(s) - sd.interior(s)).abs() <= 1e-15 * sd.interior(s).abs());
        }
        assert!((ed.cone_weight() - sd.cone_weight()).abs() < 1e-15);
    }
}
