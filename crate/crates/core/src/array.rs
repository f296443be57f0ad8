//! Microphone array geometry and far-field steering delays.
//!
//! The array is described by a set of 3-D microphone positions. For a
//! plane wave arriving from a unit direction `psi`, each microphone sees
//! the wavefront offset by the projection of its position onto `psi`;
//! [`steering_delays`] turns those offsets into non-negative fractional
//! sample delays that re-align the channels.

use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

/// Positions of the M array microphones, in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<[f64; 3]>,
}

impl ArrayGeometry {
    /// Builds a geometry from explicit positions.
    ///
    /// Rejects empty arrays, non-finite coordinates and duplicate positions.
    pub fn new(positions: Vec<[f64; 3]>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::BadGeometry {
                reason: "empty geometry (M = 0)".into(),
            });
        }
        for (i, p) in positions.iter().enumerate() {
            if !p.iter().all(|c| c.is_finite()) {
                return Err(Error::BadGeometry {
                    reason: format!("non-finite coordinate at mic {i}"),
                });
            }
        }
        for i in 0..positions.len() {
            for j in (i + 1)..positions.len() {
                if positions[i] == positions[j] {
                    return Err(Error::BadGeometry {
                        reason: format!("mics {i} and {j} share the same position"),
                    });
                }
            }
        }
        Ok(Self { positions })
    }

    pub fn mic_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    /// Serializes as plain text: one mic per line, three fields in meters.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# microphone positions, one per line: x y z (meters)\n");
        for p in &self.positions {
            let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
        }
        out
    }

    /// Parses the plain-text format written by [`ArrayGeometry::to_text`].
    ///
    /// Blank lines are skipped and `#` starts a comment (full-line or
    /// trailing).
    pub fn from_text(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(idx) => &raw[..idx],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::BadGeometry {
                    reason: format!(
                        "line {}: expected 3 coordinate fields, got {}",
                        line_no + 1,
                        fields.len()
                    ),
                });
            }
            let mut p = [0.0f64; 3];
            for (slot, field) in p.iter_mut().zip(&fields) {
                *slot = field.parse::<f64>().map_err(|_| Error::BadGeometry {
                    reason: format!("line {}: bad coordinate {field:?}", line_no + 1),
                })?;
            }
            positions.push(p);
        }
        Self::new(positions)
    }
}

/// Unit vector pointing from the array toward the look direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteeringDirection {
    psi: [f64; 3],
}

impl SteeringDirection {
    /// Accepts a vector that is already unit length (within 1e-9).
    pub fn new(psi: [f64; 3]) -> Result<Self> {
        let norm = (psi[0] * psi[0] + psi[1] * psi[1] + psi[2] * psi[2]).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self { psi })
    }

    /// Normalizes an arbitrary non-zero vector into a steering direction.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self {
            psi: [v[0] / norm, v[1] / norm, v[2] / norm],
        })
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.psi
    }

    /// The opposite look direction.
    pub fn reversed(&self) -> Self {
        Self {
            psi: [-self.psi[0], -self.psi[1], -self.psi[2]],
        }
    }

    pub fn dot(&self, p: &[f64; 3]) -> f64 {
        self.psi[0] * p[0] + self.psi[1] * p[1] + self.psi[2] * p[2]
    }
}

/// Per-microphone fractional delays, in samples at `sample_rate`.
///
/// Normalized so the smallest delay is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DelaySet {
    pub delays: Vec<f64>,
    pub sample_rate: f64,
}

impl DelaySet {
    pub fn len(&self) -> usize {
        self.delays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays.is_empty()
    }

    pub fn max_delay(&self) -> f64 {
        self.delays.iter().cloned().fold(0.0, f64::max)
    }
}

/// Far-field plane-wave steering delays for direction `psi`.
///
/// `delay_m = ((p_m . psi) - min_k(p_k . psi)) / c * fs`, so the earliest
/// channel carries zero delay and all others are delayed to line up with it.
pub fn steering_delays(
    geom: &ArrayGeometry,
    psi: &SteeringDirection,
    speed_of_sound: f64,
    sample_rate: f64,
) -> Result<DelaySet> {
    if !(speed_of_sound > 0.0) {
        return Err(Error::InvalidParameter {
            name: "speed_of_sound",
            value: speed_of_sound,
            reason: "must be > 0",
        });
    }
    if !(sample_rate > 0.0) {
        return Err(Error::InvalidParameter {
            name: "sample_rate",
            value: sample_rate,
            reason: "must be > 0",
        });
    }
    let projections: Vec<f64> = geom.positions().iter().map(|p| psi.dot(p)).collect();
    let min = projections.iter().cloned().fold(f64::INFINITY, f64::min);
    let delays = projections
        .iter()
        .map(|proj| (proj - min) / speed_of_sound * sample_rate)
        .collect();
    Ok(DelaySet {
        delays,
        sample_rate,
    })
}

/// Seeded pseudorandom planar geometry within a circular aperture.
///
/// Mics are drawn uniformly from a disc of the given aperture (diameter,
/// meters) in the z = 0 plane, with a minimum pairwise spacing so positions
/// stay distinct. `M = 1` yields a single mic at the origin. The same seed
/// always reproduces the same geometry.
pub fn random_geometry(seed: u64, mic_count: usize, aperture: f64) -> Result<ArrayGeometry> {
    if mic_count == 0 {
        return Err(Error::BadGeometry {
            reason: "empty geometry (M = 0)".into(),
        });
    }
    if !(aperture > 0.0) {
        return Err(Error::InvalidParameter {
            name: "aperture",
            value: aperture,
            reason: "must be > 0",
        });
    }
    if mic_count == 1 {
        return ArrayGeometry::new(vec![[0.0, 0.0, 0.0]]);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6172_7261_795f_6765);
    let radius = aperture / 2.0;
    let min_sep = aperture / (8.0 * (mic_count as f64).sqrt());
    let mut positions: Vec<[f64; 3]> = Vec::with_capacity(mic_count);
    while positions.len() < mic_count {
        // Rejection-sample the disc; relax the spacing if it cannot be met.
        let mut accepted = None;
        for attempt in 0..256 {
            let x = rng.gen_range(-radius..=radius);
            let y = rng.gen_range(-radius..=radius);
            if x * x + y * y > radius * radius {
                continue;
            }
            let sep = if attempt < 128 { min_sep } else { 0.0 };
            let ok = positions
                .iter()
                .all(|p| (p[0] - x).hypot(p[1] - y) > sep.max(f64::EPSILON));
            if ok {
                accepted = Some([x, y, 0.0]);
                break;
            }
        }
        match accepted {
            Some(p) => positions.push(p),
            None => {
                return Err(Error::BadGeometry {
                    reason: format!("could not place {mic_count} distinct mics in aperture {aperture}"),
                })
            }
        }
    }
    ArrayGeometry::new(positions)
}
