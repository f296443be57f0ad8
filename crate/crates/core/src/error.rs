//! Error type shared by the processing modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Steering vector is not unit length.
    #[error("steering direction must be a unit vector (|psi| = {norm}, expected 1 within 1e-9)")]
    InvalidDirection { norm: f64 },

    /// Array has no microphones or contains duplicate / non-finite positions.
    #[error("invalid array geometry: {reason}")]
    BadGeometry { reason: String },

    /// Operand shapes or channel counts do not line up.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    /// Filter band edge at or above Nyquist, or edges out of order.
    #[error("band edge error: f_lo = {f_lo} Hz, f_hi = {f_hi} Hz must satisfy 0 <= f_lo < f_hi < fs/2 = {nyquist} Hz")]
    BandEdge { f_lo: f64, f_hi: f64, nyquist: f64 },

    /// Filter order below one.
    #[error("invalid filter order {order}, must be >= 1")]
    InvalidOrder { order: usize },

    /// Non-finite value encountered where finite data is required.
    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    /// Signal shorter than one analysis window.
    #[error("insufficient data: need at least {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Empty collection where at least one element is required.
    #[error("empty input: {what}")]
    EmptyInput { what: &'static str },

    /// Circular time shift at least as large as the frame count.
    #[error("invalid shift {shift}: |shift| must be < {frames} frames")]
    InvalidShift { shift: i64, frames: usize },

    /// Non-positive dB reference power.
    #[error("invalid dB reference power {value}, must be > 0")]
    InvalidReference { value: f64 },

    /// Run index outside 1..=n_total.
    #[error("invalid run {run}: must be in 1..={n_total}")]
    InvalidRun { run: u32, n_total: u32 },

    /// Training produced a non-finite loss.
    #[error("training failure at epoch {epoch}: {reason}")]
    TrainingFailure { epoch: usize, reason: String },

    /// Requested item absent from the dataset.
    #[error("not found: {what}")]
    NotFound { what: String },

    /// Malformed parameter outside its documented range.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
