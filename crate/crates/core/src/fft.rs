//! Real-to-complex transforms on 3-index arrays.
//!
//! The last axis uses a real transform, the two leading axes complex ones
//! applied to small gathered column blocks so every 1D transform runs on
//! contiguous memory. Forward transforms are normalized by `1/N`, so a coefficient is the
//! discrete average `N^{-1} sum_x f(x) e^{-i xi (x - x_0)}` measured from the
//! first sample `x_0`.

use num_complex::Complex64;
use rayon::prelude::*;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const COLUMNS: usize = 16;

/// Cached transforms for one array shape.
pub struct FftPlan {
    shape: [usize; 3],
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    axis0: Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    axis1: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
}

impl std::fmt::Debug for FftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPlan").field("shape", &self.shape).finish()
    }
}

fn cache() -> &'static Mutex<HashMap<[usize; 3], Arc<FftPlan>>> {
    static CACHE: OnceLock<Mutex<HashMap<[usize; 3], Arc<FftPlan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl FftPlan {
    /// Shared plan for `shape`, built once per process.
    pub fn for_shape(shape: [usize; 3]) -> Arc<FftPlan> {
        let mut map = cache().lock().expect("fft plan cache poisoned");
        map.entry(shape).or_insert_with(|| Arc::new(FftPlan::build(shape))).clone()
    }

    fn build(shape: [usize; 3]) -> Self {
        let mut real = RealFftPlanner::<f64>::new();
        let mut cplx = FftPlanner::<f64>::new();
        let axis0 = (shape[0] > 1)
            .then(|| (cplx.plan_fft_forward(shape[0]), cplx.plan_fft_inverse(shape[0])));
        let axis1 = (cplx.plan_fft_forward(shape[1]), cplx.plan_fft_inverse(shape[1]));
        FftPlan {
            shape,
            r2c: real.plan_fft_forward(shape[2]),
            c2r: real.plan_fft_inverse(shape[2]),
            axis0,
            axis1,
        }
    }

    pub fn half(&self) -> usize {
        self.shape[2] / 2 + 1
    }

    pub fn real_len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn spectral_len(&self) -> usize {
        self.shape[0] * self.shape[1] * self.half()
    }

    /// Normalized forward transform.
    pub fn forward(&self, input: &[f64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.real_len());
        let [_, _, n2] = self.shape;
        let m = self.half();
        let mut out = vec![Complex64::new(0.0, 0.0); self.spectral_len()];
        let scale = 1.0 / self.real_len() as f64;
        out.par_chunks_mut(m).zip(input.par_chunks(n2)).for_each_init(
            || (vec![0.0; n2], self.r2c.make_scratch_vec()),
            |(buf, scratch), (row_out, row_in)| {
                buf.copy_from_slice(row_in);
                self.r2c
                    .process_with_scratch(buf, row_out, scratch)
                    .expect("real transform length mismatch");
                for c in row_out.iter_mut() {
                    *c *= scale;
                }
            },
        );
        self.leading_axes(&mut out, true);
        out
    }

    /// Inverse of [`FftPlan::forward`].
    pub fn inverse(&self, input: &[Complex64]) -> Vec<f64> {
        assert_eq!(input.len(), self.spectral_len());
        let [_, _, n2] = self.shape;
        let m = self.half();
        let mut spec = input.to_vec();
        self.leading_axes(&mut spec, false);
        let mut out = vec![0.0; self.real_len()];
        out.par_chunks_mut(n2).zip(spec.par_chunks_mut(m)).for_each_init(
            || self.c2r.make_scratch_vec(),
            |scratch, (row_out, row_in)| {
                // The real inverse ignores these parts; zero them so it does not complain.
                row_in[0].im = 0.0;
                if n2 % 2 == 0 {
                    row_in[m - 1].im = 0.0;
                }
                self.c2r
                    .process_with_scratch(row_in, row_out, scratch)
                    .expect("real inverse length mismatch");
            },
        );
        out
    }

    fn leading_axes(&self, data: &mut [Complex64], forward: bool) {
        let [n0, n1, _] = self.shape;
        let m = self.half();
        let f1 = if forward { &self.axis1.0 } else { &self.axis1.1 };
        strided_transform(f1.as_ref(), data, n1, m);
        if let Some((fw, bw)) = &self.axis0 {
            let f0 = if forward { fw } else { bw };
            strided_transform(f0.as_ref(), data, n0, n1 * m);
        }
    }
}

/// Transforms the middle axis of `data` viewed as `[outer][len][inner]`.
///
/// Columns are gathered a few at a time so each read touches a contiguous
/// run of memory, which beats a full transpose for large planes.
fn strided_transform(fft: &dyn Fft<f64>, data: &mut [Complex64], len: usize, inner: usize) {
    let block = len * inner;
    let width = COLUMNS.min(inner);
    let zero = Complex64::new(0.0, 0.0);
    data.par_chunks_mut(block).for_each_init(
        || (vec![zero; width * len], vec![zero; fft.get_inplace_scratch_len()]),
        |(buf, scratch), slab| {
            for c0 in (0..inner).step_by(width) {
                let w = width.min(inner - c0);
                for l in 0..len {
                    let row = &slab[l * inner + c0..l * inner + c0 + w];
                    for (b, v) in row.iter().enumerate() {
                        buf[b * len + l] = *v;
                    }
                }
                fft.process_with_scratch(&mut buf[..w * len], scratch);
                for l in 0..len {
                    let row = &mut slab[l * inner + c0..l * inner + c0 + w];
                    for (b, v) in row.iter_mut().enumerate() {
                        *v = buf[b * len + l];
                    }
                }
            }
        },
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample(shape: [usize; 3]) -> Vec<f64> {
        let mut v = Vec::with_capacity(shape.iter().product());
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    let (x, y, z) = (i as f64, j as f64, k as f64);
                    v.push((0.3 * x + 1.1 * y).sin() + (0.7 * z * y).cos() * 0.5 + 0.01 * x * z);
                }
            }
        }
        v
    }

    #[test]
    fn round_trip_3d_and_2d() {
        for shape in [[16, 16, 16], [1, 32, 32], [8, 16, 32]] {
            let plan = FftPlan::for_shape(shape);
            let f = sample(shape);
            let back = plan.inverse(&plan.forward(&f));
            let scale = f.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            let err = f.iter().zip(&back).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
            assert!(err <= 1e-13 * scale, "shape {shape:?} err {err}");
        }
    }

    #[test]
    fn single_mode_lands_on_its_index() {
        let shape = [16, 16, 16];
        let plan = FftPlan::for_shape(shape);
        let mut f = vec![0.0; 4096];
        for i in 0..16 {
            for j in 0..16 {
                for k in 0..16 {
                    let ph = 2.0 * PI * (3.0 * i as f64 - 2.0 * j as f64 + 5.0 * k as f64) / 16.0;
                    f[(i * 16 + j) * 16 + k] = ph.cos();
                }
            }
        }
        let c = plan.forward(&f);
        // cos splits into the +k and -k modes; only +k with k2 = 5 is stored.
        let idx = (3 * 16 + 14) * 9 + 5;
        assert!((c[idx] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let total: f64 = c.iter().map(|z| z.norm()).sum();
        assert!((total - 0.5).abs() < 1e-12);
    }
}
