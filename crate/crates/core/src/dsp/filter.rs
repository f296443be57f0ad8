//! Butterworth bandpass design (bilinear transform, second-order sections)
//! and per-frame biquad filtering.

use super::BeamformedFrame;
use crate::error::{Error, Result};
use rustfft::num_complex::Complex;
use std::f64::consts::PI;

/// One second-order section, denominator normalized to `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl Biquad {
    /// Largest pole magnitude of this section.
    pub fn max_pole_magnitude(&self) -> f64 {
        // Roots of z^2 + a1 z + a2.
        let disc = self.a1 * self.a1 - 4.0 * self.a2;
        if disc >= 0.0 {
            let r = disc.sqrt();
            let p1 = (-self.a1 + r) / 2.0;
            let p2 = (-self.a1 - r) / 2.0;
            p1.abs().max(p2.abs())
        } else {
            // Conjugate pair: |p|^2 = a2.
            self.a2.sqrt()
        }
    }

    /// Complex response at `z = e^{j omega}`.
    fn response(&self, z_inv: Complex<f64>) -> Complex<f64> {
        let num = Complex::new(self.b0, 0.0) + z_inv * (self.b1 + z_inv * self.b2);
        let den = Complex::new(1.0, 0.0) + z_inv * (self.a1 + z_inv * self.a2);
        num / den
    }
}

/// Cascaded biquads plus the design metadata they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    sections: Vec<Biquad>,
    pub order: usize,
    pub f_lo: f64,
    pub f_hi: f64,
    pub sample_rate: f64,
}

impl FilterCoefficients {
    fn new(
        sections: Vec<Biquad>,
        order: usize,
        f_lo: f64,
        f_hi: f64,
        sample_rate: f64,
    ) -> Result<Self> {
        for (i, s) in sections.iter().enumerate() {
            let mag = s.max_pole_magnitude();
            if !(mag < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "pole_magnitude",
                    value: mag,
                    reason: if i == 0 {
                        "designed section is unstable"
                    } else {
                        "designed cascade section is unstable"
                    },
                });
            }
        }
        Ok(Self {
            sections,
            order,
            f_lo,
            f_hi,
            sample_rate,
        })
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    /// |H(f)| evaluated analytically from the coefficients.
    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        let omega = 2.0 * PI * freq_hz / self.sample_rate;
        let z_inv = Complex::from_polar(1.0, -omega);
        self.sections
            .iter()
            .map(|s| s.response(z_inv).norm())
            .product()
    }

    /// |H(f)| in dB.
    pub fn magnitude_db(&self, freq_hz: f64) -> f64 {
        20.0 * self.magnitude_at(freq_hz).log10()
    }
}

/// Left-half-plane poles of the analog Butterworth prototype (cutoff 1 rad/s).
fn butterworth_prototype_poles(order: usize) -> Vec<Complex<f64>> {
    (0..order)
        .map(|k| {
            let theta = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            Complex::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// Bilinear transform of one analog pole pair into a denominator.
///
/// Returns `(a1, a2, a0_analog_scale)` where the analog denominator was
/// `s^2 + c1 s + c0` and `a0_analog_scale` is the normalizer `K^2 + c1 K + c0`.
fn bilinear_pair(c1: f64, c0: f64, k: f64) -> (f64, f64, f64) {
    let a0 = k * k + c1 * k + c0;
    let a1 = (-2.0 * k * k + 2.0 * c0) / a0;
    let a2 = (k * k - c1 * k + c0) / a0;
    (a1, a2, a0)
}

fn design_lowpass(order: usize, f_c: f64, fs: f64) -> Vec<Biquad> {
    let k = 2.0 * fs;
    // Pre-warp so the digital -3 dB point lands exactly on f_c.
    let wc = k * (PI * f_c / fs).tan();
    let poles = butterworth_prototype_poles(order);

    let mut sections = Vec::new();
    let mut used = vec![false; order];
    for i in 0..order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let p = poles[i] * wc;
        if p.im.abs() > 1e-12 * wc {
            // Conjugate pair: s^2 - 2 Re(p) s + |p|^2, DC gain 1.
            let j = (0..order)
                .find(|&j| !used[j] && (poles[j] - poles[i].conj()).norm() < 1e-9)
                .expect("conjugate pole present");
            used[j] = true;
            let c1 = -2.0 * p.re;
            let c0 = p.norm_sqr();
            let (a1, a2, a0) = bilinear_pair(c1, c0, k);
            let g = c0 / a0;
            sections.push(Biquad {
                b0: g,
                b1: 2.0 * g,
                b2: g,
                a1,
                a2,
            });
        } else {
            // Real pole: wc / (s + wc).
            let a0 = k + wc;
            sections.push(Biquad {
                b0: wc / a0,
                b1: wc / a0,
                b2: 0.0,
                a1: (wc - k) / a0,
                a2: 0.0,
            });
        }
    }
    sections
}

fn design_true_bandpass(order: usize, f_lo: f64, f_hi: f64, fs: f64) -> Vec<Biquad> {
    let k = 2.0 * fs;
    let w1 = k * (PI * f_lo / fs).tan();
    let w2 = k * (PI * f_hi / fs).tan();
    let w0_sq = w1 * w2;
    let bw = w2 - w1;

    // Each prototype pole maps to a quadratic in s; collect all 2*order poles.
    let mut bp_poles: Vec<Complex<f64>> = Vec::with_capacity(2 * order);
    for p in butterworth_prototype_poles(order) {
        let half = p * bw / 2.0;
        let disc = (half * half - Complex::new(w0_sq, 0.0)).sqrt();
        bp_poles.push(half + disc);
        bp_poles.push(half - disc);
    }

    // Pair poles into conjugate (or real) pairs.
    let mut sections = Vec::new();
    let mut used = vec![false; bp_poles.len()];
    for i in 0..bp_poles.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let p = bp_poles[i];
        let j = (0..bp_poles.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                let da = (bp_poles[a] - p.conj()).norm();
                let db = (bp_poles[b] - p.conj()).norm();
                da.partial_cmp(&db).unwrap()
            })
            .expect("even pole count");
        used[j] = true;
        let q = bp_poles[j];
        // (s - p)(s - q) = s^2 - (p+q) s + p q; imaginary parts cancel.
        let c1 = -(p + q).re;
        let c0 = (p * q).re;
        let (a1, a2, a0) = bilinear_pair(c1, c0, k);
        // One analog zero at 0 and one at infinity per section -> (z-1)(z+1).
        let g = bw.max(1.0) * k / a0;
        sections.push(Biquad {
            b0: g,
            b1: 0.0,
            b2: -g,
            a1,
            a2,
        });
    }

    // Normalize overall gain to 1 at the geometric center frequency
    // (inverse bilinear map of the analog center).
    let f_center = fs * (w0_sq.sqrt() / k).atan() / PI;
    let probe = FilterCoefficients {
        sections: sections.clone(),
        order,
        f_lo,
        f_hi,
        sample_rate: fs,
    };
    let gain = probe.magnitude_at(f_center);
    let correction = 1.0 / gain.powf(1.0 / sections.len() as f64);
    for s in &mut sections {
        s.b0 *= correction;
        s.b2 *= correction;
    }
    sections
}

/// Designs the acquisition bandpass `h_bp`.
///
/// `order` is the Butterworth prototype order of the band design. The
/// band transform realizes `order` second-order sections (2 * order
/// poles); the degenerate zero lower edge keeps that section count, so a
/// (6, 0, 60 kHz) design is a 6-biquad Butterworth lowpass with the same
/// upper-edge selectivity as the band topology. `|H(f_hi)| = -3.01 dB`
/// by pre-warped construction in both cases.
pub fn design_bandpass(
    order: usize,
    f_lo: f64,
    f_hi: f64,
    sample_rate: f64,
) -> Result<FilterCoefficients> {
    if order < 1 {
        return Err(Error::InvalidOrder { order });
    }
    let nyquist = sample_rate / 2.0;
    if !(f_lo >= 0.0 && f_lo < f_hi && f_hi < nyquist) {
        return Err(Error::BandEdge {
            f_lo,
            f_hi,
            nyquist,
        });
    }
    let sections = if f_lo == 0.0 {
        design_lowpass(2 * order, f_hi, sample_rate)
    } else {
        design_true_bandpass(order, f_lo, f_hi, sample_rate)
    };
    FilterCoefficients::new(sections, order, f_lo, f_hi, sample_rate)
}

/// Runs the biquad cascade over one frame with zero initial state.
///
/// Frames are captured intermittently, so no filter state is carried
/// between frames.
pub fn apply_filter(coeffs: &FilterCoefficients, x: &BeamformedFrame) -> Result<BeamformedFrame> {
    let mut y = x.samples.clone();
    for s in coeffs.sections() {
        // Direct form II transposed.
        let (mut z1, mut z2) = (0.0f64, 0.0f64);
        for v in y.iter_mut() {
            let input = *v;
            let out = s.b0 * input + z1;
            z1 = s.b1 * input - s.a1 * out + z2;
            z2 = s.b2 * input - s.a2 * out;
            *v = out;
        }
    }
    if !y.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite {
            what: "filter output",
        });
    }
    BeamformedFrame::new(y, x.sample_rate, x.frame_index)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(samples: Vec<f64>, fs: f64) -> BeamformedFrame {
        BeamformedFrame::new(samples, fs, 0).unwrap()
    }

    #[test]
    fn lowpass_dc_gain_is_unity() {
        let f = design_bandpass(6, 0.0, 60_000.0, 450_000.0).unwrap();
        assert!((f.magnitude_at(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lowpass_cutoff_is_three_db() {
        let f = design_bandpass(6, 0.0, 60_000.0, 450_000.0).unwrap();
        assert!((f.magnitude_db(60_000.0) + 3.0103).abs() < 0.1);
    }

    #[test]
    fn lowpass_stopband_attenuation() {
        let f = design_bandpass(6, 0.0, 60_000.0, 450_000.0).unwrap();
        // Dense grid from 90 kHz to Nyquist stays at or below -30 dB.
        let mut worst = f64::NEG_INFINITY;
        let mut freq = 90_000.0;
        while freq < 225_000.0 {
            worst = worst.max(f.magnitude_db(freq));
            freq += 500.0;
        }
        assert!(worst <= -30.0, "stopband worst case {worst} dB");
    }

    #[test]
    fn all_designed_sections_are_stable() {
        for order in 1..=8 {
            for (lo, hi, fs) in [
                (0.0, 60_000.0, 450_000.0),
                (0.0, 100.0, 1000.0),
                (20_000.0, 60_000.0, 450_000.0),
                (5_000.0, 10_000.0, 48_000.0),
            ] {
                let f = design_bandpass(order, lo, hi, fs).unwrap();
                for s in f.sections() {
                    assert!(
                        s.max_pole_magnitude() < 1.0,
                        "unstable at order {order} band {lo}-{hi} fs {fs}"
                    );
                }
            }
        }
    }

    #[test]
    fn bandpass_magnitude_shape() {
        let f = design_bandpass(4, 20_000.0, 60_000.0, 450_000.0).unwrap();
        let center = (20_000.0f64 * 60_000.0).sqrt();
        assert!((f.magnitude_at(center) - 1.0).abs() < 2e-3);
        assert!(f.magnitude_db(1_000.0) < -30.0);
        assert!(f.magnitude_db(150_000.0) < -30.0);
        assert!((f.magnitude_db(20_000.0) + 3.0103).abs() < 0.2);
        assert!((f.magnitude_db(60_000.0) + 3.0103).abs() < 0.2);
    }

    #[test]
    fn rejects_bad_band_edges_and_order() {
        assert!(matches!(
            design_bandpass(6, 0.0, 225_000.0, 450_000.0),
            Err(Error::BandEdge { .. })
        ));
        assert!(matches!(
            design_bandpass(6, 70_000.0, 60_000.0, 450_000.0),
            Err(Error::BandEdge { .. })
        ));
        assert!(matches!(
            design_bandpass(0, 0.0, 60_000.0, 450_000.0),
            Err(Error::InvalidOrder { order: 0 })
        ));
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let f = design_bandpass(6, 0.0, 60_000.0, 450_000.0).unwrap();
        let y = apply_filter(&f, &frame(vec![0.0; 512], 450_000.0)).unwrap();
        assert!(y.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dc_input_settles_to_unity() {
        let f = design_bandpass(6, 0.0, 60_000.0, 450_000.0).unwrap();
        let y = apply_filter(&f, &frame(vec![1.0; 4096], 450_000.0)).unwrap();
        let tail = &y.samples[2048..];
        for v in tail {
            assert!((v - 1.0).abs() < 1e-6, "steady state {v}");
        }
    }

    #[test]
    fn sinusoid_attenuation_matches_analytic_response() {
        let fs = 450_000.0;
        let f = design_bandpass(6, 0.0, 60_000.0, fs).unwrap();
        let freq = 100_000.0;
        let n = 8192;
        let x: Vec<f64> = (0..n)
            .map(|t| (2.0 * PI * freq * t as f64 / fs).sin())
            .collect();
        let y = apply_filter(&f, &frame(x, fs)).unwrap();
        let steady = &y.samples[n / 2..];
        let amp = steady.iter().cloned().fold(0.0f64, |m, v| m.max(v.abs()));
        let expected = f.magnitude_at(freq);
        assert!(amp <= 10f64.powf(-30.0 / 20.0), "amp {amp}");
        assert!((amp - expected).abs() < 0.2 * expected + 1e-6);
    }

    #[test]
    fn filter_output_length_matches_input() {
        let f = design_bandpass(3, 0.0, 100.0, 1000.0).unwrap();
        let y = apply_filter(&f, &frame(vec![0.5; 321], 1000.0)).unwrap();
        assert_eq!(y.len(), 321);
    }
}
