//! Desk-scale acoustic tool-wear prediction pipeline.
//!
//! The crate models a CNC condition-monitoring chain end to end:
//!
//! - [`array`] — microphone array geometry and far-field steering delays
//! - [`dsp`] — fractional-delay-and-sum beamforming, Butterworth bandpass
//!   filtering and Welch power spectral density estimation
//! - [`spectrogram`] — per-run spectrogram assembly, dB normalization,
//!   augmentation and dataset splitting
//! - [`synth`] — synthetic multichannel captures with a wear-dependent
//!   spectral signature, standing in for a real recording campaign
//! - [`nn`] — from-scratch CNN regression stack (tensors, layers, manual
//!   backpropagation, Adam)
//! - [`rul`] — run-number predictions, windowed estimates and remaining
//!   useful life reporting

pub mod array;
pub mod dsp;
pub mod error;
pub mod nn;
pub mod rul;
pub mod spectrogram;
pub mod synth;

pub use error::{Error, Result};
