//! Per-run spectrograms: assembly, dB normalization, augmentation and
//! dataset splitting.
//!
//! A run's spectra are concatenated column by column into a matrix indexed
//! by (frequency bin, frame number), mapped onto a 0..90 dB scale relative
//! to a reference power, and labeled with the run number of the workpiece.

use crate::dsp::PowerSpectrum;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Capture rate of the intermittent frames, Hz.
pub const FRAME_RATE: f64 = 10.0;

/// Top of the display scale, dB.
pub const DB_SPAN: f64 = 90.0;

/// Workpiece materials used in the production run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Material {
    C45,
    Chromoly,
}

impl Material {
    pub fn name(&self) -> &'static str {
        match self {
            Material::C45 => "C45",
            Material::Chromoly => "Chromoly",
        }
    }
}

/// Where the sensor was mounted relative to the machine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensorPos {
    Inside,
    Outside,
}

impl SensorPos {
    pub fn name(&self) -> &'static str {
        match self {
            SensorPos::Inside => "inside",
            SensorPos::Outside => "outside",
        }
    }
}

/// Raw (linear-power) spectrogram matrix, column-major: one contiguous
/// column of `bins` values per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMatrix {
    pub power: Vec<f64>,
    pub bins: usize,
    pub frames: usize,
}

impl PowerMatrix {
    pub fn max_power(&self) -> f64 {
        self.power.iter().cloned().fold(0.0, f64::max)
    }
}

/// dB-normalized spectrogram with its run label and capture metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    values: Vec<f64>,
    bins: usize,
    frames: usize,
    pub run_label: u32,
    pub material: Material,
    pub sensor_pos: SensorPos,
}

impl Spectrogram {
    /// Builds a spectrogram from column-major dB values in `[0, 90]`.
    pub fn new(
        values: Vec<f64>,
        bins: usize,
        frames: usize,
        run_label: u32,
        material: Material,
        sensor_pos: SensorPos,
    ) -> Result<Self> {
        if bins == 0 || frames == 0 {
            return Err(Error::EmptyInput { what: "spectrogram" });
        }
        if values.len() != bins * frames {
            return Err(Error::DimensionMismatch {
                context: "spectrogram",
                expected: format!("{bins} x {frames} values"),
                actual: format!("{}", values.len()),
            });
        }
        if !values.iter().all(|v| (0.0..=DB_SPAN).contains(v)) {
            return Err(Error::InvalidParameter {
                name: "spectrogram_db",
                value: values
                    .iter()
                    .cloned()
                    .find(|v| !(0.0..=DB_SPAN).contains(v))
                    .unwrap_or(f64::NAN),
                reason: "dB values must lie in [0, 90]",
            });
        }
        if run_label == 0 {
            return Err(Error::InvalidRun {
                run: 0,
                n_total: u32::MAX,
            });
        }
        Ok(Self {
            values,
            bins,
            frames,
            run_label,
            material,
            sensor_pos,
        })
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// dB value at (frequency bin, frame).
    pub fn at(&self, bin: usize, frame: usize) -> f64 {
        self.values[frame * self.bins + bin]
    }

    /// One frame's spectrum column.
    pub fn column(&self, frame: usize) -> &[f64] {
        &self.values[frame * self.bins..(frame + 1) * self.bins]
    }
}

/// Concatenates per-frame spectra into a raw power matrix, preserving order.
pub fn assemble(spectra: &[PowerSpectrum]) -> Result<PowerMatrix> {
    let first = spectra.first().ok_or(Error::EmptyInput {
        what: "spectrum list",
    })?;
    let bins = first.bins();
    let mut power = Vec::with_capacity(bins * spectra.len());
    for (n, s) in spectra.iter().enumerate() {
        if s.bins() != bins || s.bin_hz != first.bin_hz {
            return Err(Error::DimensionMismatch {
                context: "assemble",
                expected: format!("{bins} bins at {} Hz spacing", first.bin_hz),
                actual: format!("{} bins at {} Hz spacing (frame {n})", s.bins(), s.bin_hz),
            });
        }
        power.extend_from_slice(&s.power);
    }
    Ok(PowerMatrix {
        power,
        bins,
        frames: spectra.len(),
    })
}

/// Maps linear power onto the 0..90 dB display scale.
///
/// `v = 10 log10(p / ref_power) + 90`, clamped to `[0, 90]`; with
/// `ref_power` at the dataset-global maximum the hottest bin sits at 90 dB
/// and anything 90 dB below it (or zero) clamps to 0.
pub fn normalize_db(raw: &PowerMatrix, ref_power: f64) -> Result<Vec<f64>> {
    if !(ref_power > 0.0) || !ref_power.is_finite() {
        return Err(Error::InvalidReference { value: ref_power });
    }
    Ok(raw
        .power
        .iter()
        .map(|&p| {
            debug_assert!(p >= 0.0);
            let v = 10.0 * (p / ref_power).log10() + DB_SPAN;
            v.clamp(0.0, DB_SPAN)
        })
        .collect())
}

/// Circularly shifts the time axis and adds clamped Gaussian dB noise.
///
/// Column `k` moves to `(k + shift) mod N`; the run label is untouched.
pub fn augment(
    sg: &Spectrogram,
    shift: i64,
    noise_db_sigma: f64,
    seed: u64,
) -> Result<Spectrogram> {
    let frames = sg.frames() as i64;
    if shift.abs() >= frames {
        return Err(Error::InvalidShift {
            shift,
            frames: sg.frames(),
        });
    }
    if !(noise_db_sigma >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "noise_db_sigma",
            value: noise_db_sigma,
            reason: "must be >= 0",
        });
    }
    let bins = sg.bins();
    let mut values = vec![0.0f64; sg.values().len()];
    for src in 0..sg.frames() {
        let dst = (src as i64 + shift).rem_euclid(frames) as usize;
        values[dst * bins..(dst + 1) * bins].copy_from_slice(sg.column(src));
    }
    if noise_db_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7370_6563_6175_6721);
        for v in values.iter_mut() {
            let noise: f64 = StandardNormal.sample(&mut rng);
            *v = (*v + noise_db_sigma * noise).clamp(0.0, DB_SPAN);
        }
    }
    Spectrogram::new(
        values,
        bins,
        sg.frames(),
        sg.run_label,
        sg.material,
        sg.sensor_pos,
    )
}

/// Index partition of a dataset into train / validation / test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl DatasetSplit {
    pub fn total(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }
}

/// Seeded shuffle-then-partition split.
///
/// Counts follow the fractions within rounding; the three parts are
/// disjoint and cover `0..item_count`.
pub fn split_dataset(
    item_count: usize,
    seed: u64,
    fractions: (f64, f64, f64),
) -> Result<DatasetSplit> {
    if item_count == 0 {
        return Err(Error::EmptyInput { what: "dataset" });
    }
    let (f_train, f_val, f_test) = fractions;
    let sum = f_train + f_val + f_test;
    if (sum - 1.0).abs() > 1e-9 || f_train < 0.0 || f_val < 0.0 || f_test < 0.0 {
        return Err(Error::InvalidParameter {
            name: "fractions",
            value: sum,
            reason: "must be non-negative and sum to 1",
        });
    }
    let mut indices: Vec<usize> = (0..item_count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7368_7566_666c_6531);
    // Fisher-Yates so the permutation only depends on the seed.
    for i in (1..indices.len()).rev() {
        let j = rand::Rng::gen_range(&mut rng, 0..=i);
        indices.swap(i, j);
    }
    let n = item_count as f64;
    let n_train = ((n * f_train).round() as usize).min(item_count);
    let n_val = ((n * f_val).round() as usize).min(item_count - n_train);
    let train = indices[..n_train].to_vec();
    let val = indices[n_train..n_train + n_val].to_vec();
    let test = indices[n_train + n_val..].to_vec();
    Ok(DatasetSplit { train, val, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum(power: Vec<f64>) -> PowerSpectrum {
        PowerSpectrum {
            power,
            bin_hz: 439.453125,
            sample_rate: 450_000.0,
        }
    }

    fn toy_spectrogram(bins: usize, frames: usize) -> Spectrogram {
        let values: Vec<f64> = (0..bins * frames)
            .map(|i| (i % 91) as f64)
            .collect();
        Spectrogram::new(values, bins, frames, 17, Material::C45, SensorPos::Inside).unwrap()
    }

    #[test]
    fn assemble_preserves_order_and_shape() {
        let spectra = vec![
            spectrum(vec![1.0, 2.0, 3.0]),
            spectrum(vec![4.0, 5.0, 6.0]),
            spectrum(vec![7.0, 8.0, 9.0]),
        ];
        let m = assemble(&spectra).unwrap();
        assert_eq!((m.bins, m.frames), (3, 3));
        assert_eq!(&m.power[3..6], &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn assemble_single_spectrum() {
        let m = assemble(&[spectrum(vec![1.0; 513])]).unwrap();
        assert_eq!((m.bins, m.frames), (513, 1));
    }

    #[test]
    fn assemble_rejects_mixed_bins_and_empty() {
        let err = assemble(&[spectrum(vec![1.0; 4]), spectrum(vec![1.0; 5])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert!(matches!(assemble(&[]), Err(Error::EmptyInput { .. })));
    }

    #[test]
    fn normalize_db_reference_points() {
        let raw = PowerMatrix {
            power: vec![1.0, 0.1, 1e-10, 0.0],
            bins: 4,
            frames: 1,
        };
        let v = normalize_db(&raw, 1.0).unwrap();
        assert_eq!(v[0], 90.0);
        assert!((v[1] - 80.0).abs() < 1e-12);
        assert_eq!(v[2], 0.0); // below the 90 dB window, clamped
        assert_eq!(v[3], 0.0);
    }

    #[test]
    fn normalize_db_rejects_bad_reference() {
        let raw = PowerMatrix {
            power: vec![1.0],
            bins: 1,
            frames: 1,
        };
        assert!(matches!(
            normalize_db(&raw, 0.0),
            Err(Error::InvalidReference { .. })
        ));
        assert!(matches!(
            normalize_db(&raw, -1.0),
            Err(Error::InvalidReference { .. })
        ));
    }

    #[test]
    fn normalize_db_is_monotone() {
        let raw = PowerMatrix {
            power: (0..1000).map(|i| i as f64 * 1e-6).collect(),
            bins: 1000,
            frames: 1,
        };
        let v = normalize_db(&raw, 1e-3).unwrap();
        for w in v.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn augment_identity_when_no_shift_no_noise() {
        let sg = toy_spectrogram(8, 5);
        let out = augment(&sg, 0, 0.0, 123).unwrap();
        assert_eq!(out, sg);
    }

    #[test]
    fn augment_moves_columns_circularly() {
        let sg = toy_spectrogram(4, 6);
        let out = augment(&sg, 2, 0.0, 0).unwrap();
        for k in 0..6 {
            assert_eq!(out.column((k + 2) % 6), sg.column(k), "column {k}");
        }
        let back = augment(&out, -2, 0.0, 0).unwrap();
        assert_eq!(back, sg);
    }

    #[test]
    fn augment_preserves_label_and_range() {
        let sg = toy_spectrogram(16, 10);
        let out = augment(&sg, -3, 2.5, 7).unwrap();
        assert_eq!(out.run_label, sg.run_label);
        assert_eq!(out.material, sg.material);
        assert!(out.values().iter().all(|v| (0.0..=90.0).contains(v)));
    }

    #[test]
    fn augment_rejects_oversized_shift() {
        let sg = toy_spectrogram(4, 6);
        assert!(matches!(
            augment(&sg, 6, 0.0, 0),
            Err(Error::InvalidShift { .. })
        ));
        assert!(matches!(
            augment(&sg, -6, 0.0, 0),
            Err(Error::InvalidShift { .. })
        ));
    }

    #[test]
    fn split_hundred_items_is_75_10_15() {
        let s = split_dataset(100, 42, (0.75, 0.10, 0.15)).unwrap();
        assert_eq!(s.train.len(), 75);
        assert_eq!(s.val.len(), 10);
        assert_eq!(s.test.len(), 15);
    }

    #[test]
    fn split_is_deterministic_and_seed_sensitive() {
        let a = split_dataset(100, 42, (0.75, 0.10, 0.15)).unwrap();
        let b = split_dataset(100, 42, (0.75, 0.10, 0.15)).unwrap();
        let c = split_dataset(100, 43, (0.75, 0.10, 0.15)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn split_parts_are_disjoint_and_cover() {
        for n in [1usize, 2, 3, 7, 100, 350] {
            let s = split_dataset(n, 9, (0.75, 0.10, 0.15)).unwrap();
            let mut all: Vec<usize> = s
                .train
                .iter()
                .chain(&s.val)
                .chain(&s.test)
                .cloned()
                .collect();
            all.sort_unstable();
            let expect: Vec<usize> = (0..n).collect();
            assert_eq!(all, expect, "n = {n}");
        }
    }

    #[test]
    fn split_rejects_empty_and_bad_fractions() {
        assert!(matches!(
            split_dataset(0, 1, (0.75, 0.10, 0.15)),
            Err(Error::EmptyInput { .. })
        ));
        assert!(split_dataset(10, 1, (0.8, 0.3, 0.1)).is_err());
    }

    #[test]
    fn spectrogram_rejects_out_of_range_values() {
        let err = Spectrogram::new(
            vec![45.0, 91.0],
            2,
            1,
            1,
            Material::C45,
            SensorPos::Inside,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
        let err = Spectrogram::new(
            vec![45.0, -0.5],
            2,
            1,
            1,
            Material::C45,
            SensorPos::Inside,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }
}
