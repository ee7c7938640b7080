//! Leading-order signaling between two Unruh–DeWitt detectors coupled to a
//! non-local massless scalar field in 3+1 dimensions.
//!
//! The crate is layered: [`specfun`] supplies the complex error functions and
//! Bessel functions, [`field`] the commutator kernels, [`signaling`] the
//! closed-form signaling terms, [`quad`] an independent numerical oracle for
//! them, and [`analysis`] the ℓ-sweeps and scaling fits.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod field;
pub mod quad;
pub mod signaling;
pub mod specfun;

pub use error::Error;
