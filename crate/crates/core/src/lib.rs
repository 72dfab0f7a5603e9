//! Minimum-variance linear precoding for OSTBC secondary links in spectrum-sharing
//! radio systems with switchable antenna polarization.
//!
//! The precoder keeps the orthogonal structure of the space-time code intact at the
//! secondary receiver, caps the interference delivered to the primary receiver and
//! respects the secondary transmitter's power budget. The closed form is solved once
//! per channel state; the gain `alpha` is then gated by whichever constraint binds.
//!
//! The linear-algebra core ([`realify`], [`ostbc`], [`precoder`]) is generic over the
//! real scalar type through [`Real`]; `f64` and `f32` aliases are exported below. The
//! channel generator and Monte-Carlo harness run in `f64`.

pub mod channel;
mod error;
pub mod montecarlo;
pub mod ostbc;
pub mod precoder;
pub mod realify;
mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

/// Dense complex matrix (column-major).
pub type ComplexMat<T> = DMatrix<Complex<T>>;
/// Dense real matrix (column-major).
pub type RealMat<T> = DMatrix<T>;
/// Dense real column vector.
pub type RealVec<T> = DVector<T>;

pub type ComplexMat64 = ComplexMat<f64>;
pub type RealMat64 = RealMat<f64>;
pub type RealVec64 = RealVec<f64>;
pub type OstbcCode64 = ostbc::OstbcCode<f64>;
pub type Dispersion64 = ostbc::DispersionMatrix<f64>;
pub type PrecoderInputs64 = precoder::PrecoderInputs<f64>;
pub type MinVarianceDesign64 = precoder::MinVarianceDesign<f64>;
pub type PrecoderSolution64 = precoder::PrecoderSolution<f64>;

pub type ComplexMat32 = ComplexMat<f32>;
pub type RealMat32 = RealMat<f32>;
pub type RealVec32 = RealVec<f32>;
pub type OstbcCode32 = ostbc::OstbcCode<f32>;
pub type Dispersion32 = ostbc::DispersionMatrix<f32>;
pub type PrecoderInputs32 = precoder::PrecoderInputs<f32>;
pub type MinVarianceDesign32 = precoder::MinVarianceDesign<f32>;
pub type PrecoderSolution32 = precoder::PrecoderSolution<f32>;
