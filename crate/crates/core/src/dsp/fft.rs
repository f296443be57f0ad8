//! Thread-local FFT plan cache around rustfft.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<PlanCache> = RefCell::new(PlanCache::default());
}

struct PlanCache {
    planner: FftPlanner<f64>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

impl Default for PlanCache {
    fn default() -> Self {
        Self {
            planner: FftPlanner::new(),
            forward: HashMap::new(),
            inverse: HashMap::new(),
        }
    }
}

/// In-place forward FFT (unscaled).
pub fn forward(buf: &mut [Complex<f64>]) {
    PLANS.with(|cell| {
        let cache = &mut *cell.borrow_mut();
        let planner = &mut cache.planner;
        let plan = cache
            .forward
            .entry(buf.len())
            .or_insert_with_key(|&n| planner.plan_fft_forward(n))
            .clone();
        plan.process(buf);
    });
}

/// In-place inverse FFT (unscaled; divide by `len` to invert `forward`).
pub fn inverse(buf: &mut [Complex<f64>]) {
    PLANS.with(|cell| {
        let cache = &mut *cell.borrow_mut();
        let planner = &mut cache.planner;
        let plan = cache
            .inverse
            .entry(buf.len())
            .or_insert_with_key(|&n| planner.plan_fft_inverse(n))
            .clone();
        plan.process(buf);
    });
}

/// Smallest 5-smooth number >= `n`, a size rustfft handles without
/// falling back to Bluestein's algorithm.
pub fn smooth_size(n: usize) -> usize {
    let mut candidate = n.max(1);
    loop {
        let mut m = candidate;
        for p in [2usize, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return candidate;
        }
        candidate += 1;
    }
}
