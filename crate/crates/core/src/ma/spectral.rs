//! Fourier differentiation on the periodic unit cell `[0,1)^{2n}`.
//!
//! Real axis `2j` is `Re z_j`, axis `2j+1` is `Im z_j`. Flat index
//! `Σ i_a N^a`, so axis 0 is contiguous.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub struct SpectralGrid {
    n: usize,
    size: usize,
    len: usize,
    waves: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("n", &self.n).field("size", &self.size).finish()
    }
}

impl SpectralGrid {
    pub fn new(n: usize, size: usize) -> Self {
        let mut planner = FftPlanner::new();
        let len = size.pow(2 * n as u32);
        let waves = (0..len).flat_map(|i| wave(n, size, i)).collect();
        Self {
            n,
            size,
            len,
            waves,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    fn wave(&self, idx: usize) -> &[f64] {
        let d = 2 * self.n;
        &self.waves[idx * d..(idx + 1) * d]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Real coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut rest = idx;
        (0..2 * self.n)
            .map(|_| {
                let i = rest % self.size;
                rest /= self.size;
                i as f64 / self.size as f64
            })
            .collect()
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let nn = self.size;
        let mut line = vec![Complex64::new(0.0, 0.0); nn];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..2 * self.n {
            let stride = nn.pow(axis as u32);
            for base in 0..self.len {
                // visit each line once, from its first element
                if (base / stride) % nn != 0 {
                    continue;
                }
                for (k, x) in line.iter_mut().enumerate() {
                    *x = data[base + k * stride];
                }
                plan.process_with_scratch(&mut line, &mut scratch);
                for (k, x) in line.iter().enumerate() {
                    data[base + k * stride] = *x;
                }
            }
        }
    }

    pub fn fft(&self, u: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    pub fn ifft(&self, mut data: Vec<Complex64>) -> Vec<Complex64> {
        self.transform(&mut data, &self.inverse);
        let scale = 1.0 / self.len as f64;
        data.iter_mut().for_each(|x| *x *= scale);
        data
    }

    /// Symbol of `∂_j∂̄_k` at mode `idx`: `−π²(ξx_j − iξy_j)(ξx_k + iξy_k)`.
    fn ddbar_symbol(xi: &[f64], j: usize, k: usize) -> Complex64 {
        let a = Complex64::new(xi[2 * j], -xi[2 * j + 1]);
        let b = Complex64::new(xi[2 * k], xi[2 * k + 1]);
        -PI * PI * a * b
    }

    /// `∂_j∂̄_k u` for all `j, k`, laid out as `[(j n + k) len + p]`.
    pub fn ddbar(&self, u: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        // constants are annihilated; removing the mean keeps rounding in the
        // transform proportional to the oscillation of u
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        let centered: Vec<f64> = u.iter().map(|x| x - mean).collect();
        let hat = self.fft(&centered);
        let mut out = vec![Complex64::new(0.0, 0.0); n * n * self.len];
        for j in 0..n {
            for k in j..n {
                let spec: Vec<Complex64> = hat
                    .iter()
                    .enumerate()
                    .map(|(i, h)| h * Self::ddbar_symbol(self.wave(i), j, k))
                    .collect();
                let field = self.ifft(spec);
                for p in 0..self.len {
                    let v = if j == k { Complex64::new(field[p].re, 0.0) } else { field[p] };
                    out[(j * n + k) * self.len + p] = v;
                    if j != k {
                        out[(k * n + j) * self.len + p] = v.conj();
                    }
                }
            }
        }
        out
    }

    /// Applies the real Fourier multiplier `sym(ξ)` to `u`.
    pub fn multiplier<F: Fn(&[f64]) -> f64>(&self, u: &[f64], sym: F) -> Vec<f64> {
        let hat = self.fft(u);
        let spec: Vec<Complex64> = hat.iter().enumerate().map(|(i, h)| h * sym(self.wave(i))).collect();
        self.ifft(spec).iter().map(|z| z.re).collect()
    }

    /// `Σ_{jk} M_{kj} ∂_j∂̄_k` as a multiplier, for a constant hermitian `M`
    /// given row-major.
    pub fn constant_coefficient_symbol(&self, m: &[Complex64], xi: &[f64]) -> f64 {
        let n = self.n;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += m[k * n + j] * Self::ddbar_symbol(xi, j, k);
            }
        }
        acc.re
    }
}

/// Integer wave numbers of mode `idx`; the Nyquist mode maps to 0 so that
/// odd derivatives stay real.
fn wave(n: usize, size: usize, idx: usize) -> Vec<f64> {
    let mut rest = idx;
    (0..2 * n)
        .map(|_| {
            let i = rest % size;
            rest /= size;
            if 2 * i == size {
                0.0
            } else if 2 * i < size {
                i as f64
            } else {
                i as f64 - size as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ddbar_of_a_trigonometric_function() {
        // u = cos(2πx) ⇒ ∂∂̄u = ¼ Δu = −π² cos(2πx)
        let g = SpectralGrid::new(1, 16);
        let u: Vec<f64> = (0..g.len()).map(|i| (2.0 * PI * g.point(i)[0]).cos()).collect();
        let d = g.ddbar(&u);
        for (i, ui) in u.iter().enumerate() {
            assert!((d[i].re + PI * PI * ui).abs() < 1e-11);
            assert!(d[i].im.abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_derivative_in_two_variables() {
        // u = cos(2π(x1 + x2)): ∂_1∂̄_2 u = −π² cos(...)
        let g = SpectralGrid::new(2, 8);
        let u: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                (2.0 * PI * (x[0] + x[2])).cos()
            })
            .collect();
        let d = g.ddbar(&u);
        let len = g.len();
        for (i, ui) in u.iter().enumerate() {
            assert!((d[len + i].re + PI * PI * ui).abs() < 1e-10);
            assert!((d[len + i] - d[2 * len + i].conj()).norm() < 1e-14);
        }
    }
}
