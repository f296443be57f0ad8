//! Beamforming, bandpass filtering and Welch PSD estimation.
//!
//! One 40 ms capture of all microphones ([`MultichannelFrame`]) is steered
//! and summed into a [`BeamformedFrame`], filtered through cascaded biquads
//! ([`FilterCoefficients`]) and reduced to a one-sided [`PowerSpectrum`].
//! All operations are pure; frames can be processed in parallel.

mod delay;
pub(crate) mod fft;
mod filter;
mod welch;

pub use delay::{delay_and_sum, fractional_delay, KAISER_BETA, SINC_TAPS};
pub use filter::{apply_filter, design_bandpass, Biquad, FilterCoefficients};
pub use welch::{hamming_window, welch_psd, PowerSpectrum};

use crate::error::{Error, Result};

/// Duration of one intermittent capture, in seconds.
pub const FRAME_DURATION: f64 = 0.040;

/// Number of samples in a standard capture at `sample_rate`.
pub fn frame_len(sample_rate: f64) -> usize {
    (sample_rate * FRAME_DURATION).round() as usize
}

/// One capture of M microphone signals, channel-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct MultichannelFrame {
    samples: Vec<f64>,
    channels: usize,
    len: usize,
    pub sample_rate: f64,
    pub frame_index: usize,
    pub run_id: u32,
}

impl MultichannelFrame {
    /// Builds a frame from channel-major samples (`channels * len` values).
    pub fn from_samples(
        samples: Vec<f64>,
        channels: usize,
        sample_rate: f64,
        frame_index: usize,
        run_id: u32,
    ) -> Result<Self> {
        if channels == 0 || samples.is_empty() {
            return Err(Error::EmptyInput {
                what: "multichannel frame",
            });
        }
        if samples.len() % channels != 0 {
            return Err(Error::DimensionMismatch {
                context: "multichannel frame",
                expected: format!("sample count divisible by {channels} channels"),
                actual: format!("{} samples", samples.len()),
            });
        }
        if !samples.iter().all(|s| s.is_finite()) {
            return Err(Error::NonFinite {
                what: "multichannel frame samples",
            });
        }
        let len = samples.len() / channels;
        Ok(Self {
            samples,
            channels,
            len,
            sample_rate,
            frame_index,
            run_id,
        })
    }

    /// Like [`MultichannelFrame::from_samples`] but enforces the standard
    /// 40 ms capture length for `sample_rate`.
    pub fn capture(
        samples: Vec<f64>,
        channels: usize,
        sample_rate: f64,
        frame_index: usize,
        run_id: u32,
    ) -> Result<Self> {
        let expected = frame_len(sample_rate);
        let frame = Self::from_samples(samples, channels, sample_rate, frame_index, run_id)?;
        if frame.len != expected {
            return Err(Error::DimensionMismatch {
                context: "capture length",
                expected: format!("{expected} samples (40 ms at {sample_rate} Hz)"),
                actual: format!("{} samples", frame.len),
            });
        }
        Ok(frame)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn channel(&self, m: usize) -> &[f64] {
        &self.samples[m * self.len..(m + 1) * self.len]
    }
}

/// Single-channel output of the beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformedFrame {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    pub frame_index: usize,
}

impl BeamformedFrame {
    pub fn new(samples: Vec<f64>, sample_rate: f64, frame_index: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput {
                what: "beamformed frame",
            });
        }
        if !samples.iter().all(|s| s.is_finite()) {
            return Err(Error::NonFinite {
                what: "beamformed frame samples",
            });
        }
        Ok(Self {
            samples,
            sample_rate,
            frame_index,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
