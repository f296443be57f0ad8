//! Fractional sample delays and delay-and-sum beamforming.
//!
//! Fractional delays use a 31-tap Kaiser-windowed sinc interpolator
//! (beta = 8) and collapse to an exact sample shift for integer delays.
//! Signals are treated as zero outside the frame.

use super::{BeamformedFrame, MultichannelFrame};
use crate::array::DelaySet;
use crate::error::{Error, Result};

/// Interpolator length for fractional delays.
pub const SINC_TAPS: usize = 31;
/// Kaiser window shape parameter of the interpolator.
pub const KAISER_BETA: f64 = 8.0;

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half_sq = x * x / 4.0;
    for k in 1..=32 {
        term *= half_sq / ((k * k) as f64);
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Interpolator taps for a fractional part `frac` in (0, 1).
///
/// Tap `j` weights `x[t - n0 + center - j]`; the taps sum to one so DC
/// passes exactly.
fn sinc_taps(frac: f64) -> [f64; SINC_TAPS] {
    let center = (SINC_TAPS / 2) as f64;
    let denom = bessel_i0(KAISER_BETA);
    let mut taps = [0.0f64; SINC_TAPS];
    let mut sum = 0.0;
    for (j, tap) in taps.iter_mut().enumerate() {
        let offset = j as f64 - center;
        let arg = 1.0 - (offset / center) * (offset / center);
        let window = bessel_i0(KAISER_BETA * arg.max(0.0).sqrt()) / denom;
        *tap = sinc(offset - frac) * window;
        sum += *tap;
    }
    for tap in taps.iter_mut() {
        *tap /= sum;
    }
    taps
}

/// Adds `scale * delay(x, delay)` into `acc`.
///
/// Shared by [`fractional_delay`] and [`delay_and_sum`] so both use the
/// identical interpolation path.
fn accumulate_delayed(x: &[f64], delay: f64, scale: f64, acc: &mut [f64]) {
    debug_assert_eq!(x.len(), acc.len());
    let len = x.len() as isize;
    let n0 = delay.floor();
    let frac = delay - n0;
    let n0 = n0 as isize;

    if frac == 0.0 {
        // Exact integer shift.
        let shift = n0;
        let t_start = shift.max(0);
        let t_end = (len + shift).min(len);
        for t in t_start..t_end {
            acc[t as usize] += scale * x[(t - shift) as usize];
        }
        return;
    }

    let taps = sinc_taps(frac);
    let center = (SINC_TAPS / 2) as isize;
    for (j, &tap) in taps.iter().enumerate() {
        let w = scale * tap;
        if w == 0.0 {
            continue;
        }
        // acc[t] += w * x[t - off] over the in-range span.
        let off = n0 - center + j as isize;
        let t_start = off.max(0);
        let t_end = (len + off).min(len);
        if t_start >= t_end {
            continue;
        }
        let src = &x[(t_start - off) as usize..(t_end - off) as usize];
        let dst = &mut acc[t_start as usize..t_end as usize];
        for (d, s) in dst.iter_mut().zip(src) {
            *d += w * s;
        }
    }
}

/// Delays `x` by a non-negative fractional number of samples.
pub fn fractional_delay(x: &[f64], delay: f64) -> Result<Vec<f64>> {
    if !(delay.is_finite() && delay >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "delay",
            value: delay,
            reason: "must be finite and >= 0 samples",
        });
    }
    let mut out = vec![0.0; x.len()];
    accumulate_delayed(x, delay, 1.0, &mut out);
    Ok(out)
}

/// Aligns each channel with its steering delay and averages them.
///
/// The `1/M` scale keeps the beamformed amplitude comparable to a single
/// microphone.
pub fn delay_and_sum(frame: &MultichannelFrame, delays: &DelaySet) -> Result<BeamformedFrame> {
    if frame.channels() != delays.len() {
        return Err(Error::DimensionMismatch {
            context: "delay_and_sum",
            expected: format!("{} delays", frame.channels()),
            actual: format!("{}", delays.len()),
        });
    }
    let len = frame.len();
    for &d in &delays.delays {
        if !(d.is_finite() && d >= 0.0 && d < len as f64) {
            return Err(Error::InvalidParameter {
                name: "delay",
                value: d,
                reason: "must be finite, >= 0 and shorter than the frame",
            });
        }
    }
    let scale = 1.0 / frame.channels() as f64;
    let mut out = vec![0.0; len];
    for (m, &d) in delays.delays.iter().enumerate() {
        accumulate_delayed(frame.channel(m), d, scale, &mut out);
    }
    BeamformedFrame::new(out, frame.sample_rate, frame.frame_index)
}
