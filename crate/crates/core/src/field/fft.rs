//! Multi-dimensional FFT and the type-I sine transform used to diagonalize
//! the Dirichlet Laplacian on the inner sub-box.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanKey = (usize, bool);
type PlanCache = Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Applies a 1D transform along every axis of a row-major cube of side `n`.
fn along_axes<F>(data: &mut [Complex64], dim: usize, n: usize, mut line_op: F)
where
    F: FnMut(&mut [Complex64]),
{
    let total = data.len();
    debug_assert_eq!(total, n.pow(dim as u32));
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_exact_mut(n) {
                line_op(chunk);
            }
            continue;
        }
        let block = stride * n;
        for start in (0..total).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                line_op(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Unnormalized forward DFT: `X_k = sum_x x_j exp(-2 pi i j k / n)` per axis.
pub fn forward(data: &mut [Complex64], dim: usize, n: usize) {
    let fft = plan(n, false);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    along_axes(data, dim, n, |line| fft.process_with_scratch(line, &mut scratch));
}

/// Normalized inverse DFT, so that `inverse(forward(x)) == x`.
pub fn inverse(data: &mut [Complex64], dim: usize, n: usize) {
    let fft = plan(n, true);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    along_axes(data, dim, n, |line| fft.process_with_scratch(line, &mut scratch));
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Signed integer frequency of DFT bin `k` (Nyquist maps to `-n/2`).
#[inline]
pub fn signed_frequency(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Orthonormal type-I discrete sine transform along every axis of a cube of
/// side `m`. The transform is an involution: applying it twice is the identity.
pub fn dst1(data: &mut [Complex64], dim: usize, m: usize) {
    let len = 2 * (m + 1);
    let fft = plan(len, false);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut ext = vec![Complex64::new(0.0, 0.0); len];
    let norm = (2.0 / (m + 1) as f64).sqrt();
    along_axes(data, dim, m, |line| {
        // Odd extension; the DFT of it is -2i * S x.
        ext[0] = Complex64::new(0.0, 0.0);
        ext[m + 1] = Complex64::new(0.0, 0.0);
        for (j, v) in line.iter().enumerate() {
            ext[j + 1] = *v;
            ext[len - 1 - j] = -*v;
        }
        fft.process_with_scratch(&mut ext, &mut scratch);
        for (k, v) in line.iter_mut().enumerate() {
            let t = ext[k + 1];
            // t = -2i * sum_j x_j sin(pi (j+1)(k+1)/(m+1))
            *v = Complex64::new(-t.im, t.re) * (0.5 * norm);
        }
    });
}
