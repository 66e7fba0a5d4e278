//! Multiplication-free signal processing built on the sign-additive
//! operator `a ⊗ b = sign(a·b)(|a| + |b|)`.
//!
//! Layers, bottom-up: [`operator`] (scalar and vector `⊗` with operation
//! counting), [`transforms`] (exact DFT/FFT and the nonlinear NDFT/NFFT),
//! [`ambiguity`] (range-Doppler surfaces), [`radar_sim`] (stereo FM passive
//! radar scenes) and [`detection`] (peak extraction and table rows).

pub mod ambiguity;
pub mod detection;
pub mod error;
pub mod operator;
pub mod radar_sim;
pub mod signal;
pub mod transforms;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use signal::ComplexSignal;
