//! Real and complex special functions used by the closed-form signaling
//! expressions.

mod bessel;
mod faddeeva;

pub use bessel::{bessel_j0, bessel_j1, bessel_j2};
#[allow(unused_imports)]
pub(crate) use faddeeva::FRAC_1_SQRT_PI;
pub use faddeeva::{
    erf_complex, erfc_complex, erfcx, erfcx_checked, erfcx_remainder, erfi, faddeeva, ComplexValue,
    Erfcx, ASYMPTOTIC_RADIUS, TAYLOR_RADIUS,
};
