//! Welch power spectral density estimation.

use super::{fft, BeamformedFrame};
use crate::error::{Error, Result};
use rustfft::num_complex::Complex;
use std::f64::consts::PI;

/// One-sided power spectral density of a beamformed frame.
///
/// `power[k]` is the density at `k * bin_hz` in amplitude^2 / Hz, so
/// integrating over frequency recovers signal variance.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub power: Vec<f64>,
    pub bin_hz: f64,
    pub sample_rate: f64,
}

impl PowerSpectrum {
    pub fn bins(&self) -> usize {
        self.power.len()
    }

    pub fn freq(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_hz
    }

    /// Integrated power between two frequencies (rectangle rule over bins).
    pub fn band_power(&self, f_lo: f64, f_hi: f64) -> f64 {
        self.power
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let f = self.freq(*k);
                f >= f_lo && f < f_hi
            })
            .map(|(_, p)| p * self.bin_hz)
            .sum()
    }

    /// Power-weighted mean frequency inside a band.
    pub fn centroid(&self, f_lo: f64, f_hi: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (k, &p) in self.power.iter().enumerate() {
            let f = self.freq(k);
            if f >= f_lo && f < f_hi {
                num += f * p;
                den += p;
            }
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }
}

/// Periodic Hamming window of length `n`.
pub fn hamming_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.54 - 0.46 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Welch PSD with Hamming weighting and overlapping segments.
///
/// Per-segment periodograms are normalized by the window power
/// `fs * sum(w^2)` and averaged; the one-sided spectrum doubles every bin
/// except DC and Nyquist.
pub fn welch_psd(
    x: &BeamformedFrame,
    window_len: usize,
    overlap_fraction: f64,
) -> Result<PowerSpectrum> {
    if window_len < 2 {
        return Err(Error::InvalidParameter {
            name: "window_len",
            value: window_len as f64,
            reason: "must be >= 2",
        });
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::InvalidParameter {
            name: "overlap_fraction",
            value: overlap_fraction,
            reason: "must be in [0, 1)",
        });
    }
    let n = x.samples.len();
    if n < window_len {
        return Err(Error::InsufficientData {
            needed: window_len,
            got: n,
        });
    }

    let hop = ((window_len as f64) * (1.0 - overlap_fraction)).round().max(1.0) as usize;
    let segments = 1 + (n - window_len) / hop;
    let window = hamming_window(window_len);
    let win_power: f64 = window.iter().map(|w| w * w).sum();
    let fs = x.sample_rate;
    let bins = window_len / 2 + 1;

    let mut accum = vec![0.0f64; bins];
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); window_len];
    for s in 0..segments {
        let start = s * hop;
        for (b, (&v, &w)) in buf
            .iter_mut()
            .zip(x.samples[start..start + window_len].iter().zip(&window))
        {
            *b = Complex::new(v * w, 0.0);
        }
        fft::forward(&mut buf);
        for (k, a) in accum.iter_mut().enumerate() {
            let mut p = buf[k].norm_sqr() / (fs * win_power);
            if k != 0 && !(window_len % 2 == 0 && k == window_len / 2) {
                p *= 2.0;
            }
            *a += p;
        }
    }
    let inv = 1.0 / segments as f64;
    for a in accum.iter_mut() {
        *a *= inv;
    }

    Ok(PowerSpectrum {
        power: accum,
        bin_hz: fs / window_len as f64,
        sample_rate: fs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn frame(samples: Vec<f64>, fs: f64) -> BeamformedFrame {
        BeamformedFrame::new(samples, fs, 0).unwrap()
    }

    #[test]
    fn zero_signal_gives_zero_spectrum() {
        let p = welch_psd(&frame(vec![0.0; 4096], 450_000.0), 1024, 0.5).unwrap();
        assert_eq!(p.bins(), 513);
        assert!(p.power.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn white_noise_satisfies_parseval() {
        let fs = 450_000.0;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let x: Vec<f64> = (0..18_000)
            .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
            .collect();
        let variance = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        let p = welch_psd(&frame(x, fs), 1024, 0.5).unwrap();
        let total: f64 = p.power.iter().map(|v| v * p.bin_hz).sum();
        assert!(
            (total - variance).abs() < 0.10 * variance,
            "total {total} vs variance {variance}"
        );
    }

    #[test]
    fn bin_centered_sinusoid_recovers_amplitude() {
        let fs = 450_000.0;
        let window = 1024;
        let amp = 0.8;
        let f0 = 100.0 * fs / window as f64; // exactly bin 100
        let x: Vec<f64> = (0..18_000)
            .map(|t| amp * (2.0 * PI * f0 * t as f64 / fs).sin())
            .collect();
        let p = welch_psd(&frame(x, fs), window, 0.5).unwrap();
        let peak_bin = p
            .power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak_bin, 100);
        let integrated = p.band_power(p.freq(95), p.freq(106));
        let expected = amp * amp / 2.0;
        assert!(
            (integrated - expected).abs() < 0.05 * expected,
            "integrated {integrated} vs {expected}"
        );
    }

    #[test]
    fn short_signal_is_rejected() {
        let err = welch_psd(&frame(vec![0.0; 512], 1000.0), 1024, 0.5).unwrap_err();
        assert!(matches!(
            err,
            Error::InsufficientData {
                needed: 1024,
                got: 512
            }
        ));
    }

    #[test]
    fn centroid_of_a_tone_is_its_frequency() {
        let fs = 64_000.0;
        let f0 = 8_000.0;
        let x: Vec<f64> = (0..8192)
            .map(|t| (2.0 * PI * f0 * t as f64 / fs).sin())
            .collect();
        let p = welch_psd(&frame(x, fs), 1024, 0.5).unwrap();
        let c = p.centroid(0.0, fs / 2.0);
        assert!((c - f0).abs() < 100.0, "centroid {c}");
    }
}
