//! FFT plumbing shared by the simulator, the separation filters and the
//! spectral estimators.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse complex FFT plans of one size, used on real data.
#[derive(Clone)]
pub struct RealFft {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex64>,
}

impl std::fmt::Debug for RealFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RealFft").field("len", &self.len).finish()
    }
}

impl RealFft {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            buffer: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn num_bins(&self) -> usize {
        self.len / 2 + 1
    }

    /// One-sided spectrum of `input`, zero-padded (or truncated) to the FFT
    /// length. `out` must hold `num_bins()` values.
    pub fn forward(&mut self, input: &[f64], out: &mut [Complex64]) {
        for (i, b) in self.buffer.iter_mut().enumerate() {
            *b = Complex64::new(input.get(i).copied().unwrap_or(0.0), 0.0);
        }
        self.forward.process(&mut self.buffer);
        out.copy_from_slice(&self.buffer[..self.num_bins()]);
    }

    /// Same as [`RealFft::forward`] with a taper applied sample-wise.
    pub fn forward_windowed(&mut self, input: &[f64], window: &[f64], out: &mut [Complex64]) {
        for (i, b) in self.buffer.iter_mut().enumerate() {
            let x = input.get(i).copied().unwrap_or(0.0) * window.get(i).copied().unwrap_or(0.0);
            *b = Complex64::new(x, 0.0);
        }
        self.forward.process(&mut self.buffer);
        out.copy_from_slice(&self.buffer[..self.num_bins()]);
    }

    /// Real signal from a one-sided spectrum (Hermitian symmetry implied).
    pub fn inverse(&mut self, spectrum: &[Complex64], out: &mut [f64]) {
        let n = self.len;
        let half = self.num_bins();
        self.buffer[..half].copy_from_slice(&spectrum[..half]);
        for k in half..n {
            self.buffer[k] = spectrum[n - k].conj();
        }
        self.inverse.process(&mut self.buffer);
        let scale = 1.0 / n as f64;
        for (o, b) in out.iter_mut().zip(&self.buffer) {
            *o = b.re * scale;
        }
    }
}

/// Periodic Hann window.
pub fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

/// Full linear convolution (`a.len() + b.len() - 1` samples).
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if short.len() <= 32 {
        let mut out = vec![0.0; out_len];
        for (i, &x) in long.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &h) in short.iter().enumerate() {
                out[i + j] += x * h;
            }
        }
        return out;
    }

    // overlap-add with the short operand as the kernel
    let fft_len = (2 * short.len()).next_power_of_two().max(1024);
    let step = fft_len - short.len() + 1;
    let mut fft = RealFft::new(fft_len);
    let mut kernel = vec![Complex64::new(0.0, 0.0); fft.num_bins()];
    fft.forward(short, &mut kernel);

    let mut out = vec![0.0; out_len];
    let mut spec = vec![Complex64::new(0.0, 0.0); fft.num_bins()];
    let mut chunk_out = vec![0.0; fft_len];
    let mut start = 0;
    while start < long.len() {
        let end = (start + step).min(long.len());
        fft.forward(&long[start..end], &mut spec);
        for (s, k) in spec.iter_mut().zip(&kernel) {
            *s *= k;
        }
        fft.inverse(&spec, &mut chunk_out);
        let valid = (end - start + short.len() - 1).min(out_len - start);
        for (o, c) in out[start..start + valid].iter_mut().zip(&chunk_out) {
            *o += c;
        }
        start = end;
    }
    out
}

pub fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, h) in b.iter().enumerate() {
                out[i + j] += x * h;
            }
        }
        out
    }

    #[test]
    fn fft_convolution_matches_direct_sum() {
        let a: Vec<f64> = (0..3000).map(|i| ((i * 37 % 101) as f64 - 50.0) / 50.0).collect();
        let b: Vec<f64> = (0..700).map(|i| ((i * 13 % 29) as f64 - 14.0) / 14.0).collect();
        let fast = convolve(&a, &b);
        let slow = direct(&a, &b);
        assert_eq!(fast.len(), slow.len());
        for (f, s) in fast.iter().zip(&slow) {
            assert!((f - s).abs() < 1e-9, "{f} vs {s}");
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let x: Vec<f64> = (0..64).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut fft = RealFft::new(64);
        let mut spec = vec![Complex64::new(0.0, 0.0); fft.num_bins()];
        fft.forward(&x, &mut spec);
        let mut back = vec![0.0; 64];
        fft.inverse(&spec, &mut back);
        for (a, b) in x.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
