//! Block-online convolutive blind source separation for one microphone pair.
//!
//! Second-order statistics in the frequency domain: every block contributes a
//! per-bin 2x2 input cross-power matrix, older blocks fade with the
//! forgetting factor, and the unmixing matrix of each bin is pushed towards
//! jointly decorrelating all remembered blocks. Source non-stationarity makes
//! the joint problem identifiable. After each block the bins are aligned to a
//! common output order by the correlation of their output power profiles,
//! rescaled by the minimal distortion principle and projected onto
//! `filter_length`-tap filters.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{convolve, hann, RealFft};
use crate::error::{Error, Result};

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

/// Blocks whose forgetting weight falls below this are dropped.
const MIN_HISTORY_WEIGHT: f64 = 1e-4;
/// Normalized profile correlation needed before a bin's output order flips.
const PERMUTATION_MARGIN: f64 = 0.05;
/// Diagonal loading of the per-bin Newton system, relative to the total
/// block weight.
const HESSIAN_LOADING: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BssConfig {
    /// Demixing filter length in samples.
    pub filter_length: usize,
    pub fft_size: usize,
    /// Samples consumed per adaptation step; a multiple of `fft_size / 2`.
    pub block_length: usize,
    /// Per-block decay of the remembered statistics, in (0, 1].
    pub forgetting_factor: f64,
    pub num_inner_iterations: usize,
    /// Relative to the average input power.
    pub regularization: f64,
    pub step_size: f64,
    /// Maximum number of remembered blocks.
    pub history: usize,
}

impl Default for BssConfig {
    fn default() -> Self {
        Self {
            filter_length: 1024,
            fft_size: 2048,
            block_length: 8192,
            forgetting_factor: 0.9,
            num_inner_iterations: 10,
            regularization: 1e-6,
            step_size: 0.5,
            history: 32,
        }
    }
}

impl BssConfig {
    pub fn with_filter_length(filter_length: usize) -> Self {
        let fft_size = 2 * filter_length;
        Self {
            filter_length,
            fft_size,
            block_length: 4 * fft_size,
            ..Self::default()
        }
    }

    pub fn hop(&self) -> usize {
        self.fft_size / 2
    }

    pub fn num_bins(&self) -> usize {
        self.fft_size / 2 + 1
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.filter_length < 2 {
            return fail(format!("filter_length must be >= 2, got {}", self.filter_length));
        }
        if self.fft_size < 2 * self.filter_length || self.fft_size % 2 != 0 {
            return fail(format!(
                "fft_size {} must be even and >= 2 * filter_length",
                self.fft_size
            ));
        }
        if self.block_length < self.filter_length || self.block_length % self.hop() != 0 {
            return fail(format!(
                "block_length {} must be >= filter_length and a multiple of {}",
                self.block_length,
                self.hop()
            ));
        }
        if !(self.forgetting_factor > 0.0 && self.forgetting_factor <= 1.0) {
            return fail("forgetting_factor must be in (0, 1]".into());
        }
        if self.num_inner_iterations == 0 || self.history == 0 {
            return fail("num_inner_iterations and history must be positive".into());
        }
        if !(self.regularization >= 0.0) {
            return fail("regularization must be >= 0".into());
        }
        if !(self.step_size > 0.0 && self.step_size <= 1.0) {
            return fail("step_size must be in (0, 1]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct BlockStats {
    cov: Vec<Mat2>,
    weight: f64,
}

/// Separated outputs and, when ground-truth images were supplied, their
/// decomposition into per-source contributions.
#[derive(Debug, Clone, PartialEq)]
pub struct BssOutputs {
    pub y: [Vec<f64>; 2],
    /// Indexed `[source][output]`.
    pub components: Option<Vec<[Vec<f64>; 2]>>,
}

impl BssOutputs {
    /// Components regrouped as `[output][source]` for a two-source scene.
    pub fn by_output(&self) -> Option<[[&[f64]; 2]; 2]> {
        let c = self.components.as_ref()?;
        if c.len() != 2 {
            return None;
        }
        Some([
            [c[0][0].as_slice(), c[1][0].as_slice()],
            [c[0][1].as_slice(), c[1][1].as_slice()],
        ])
    }
}

/// Time-domain demixing filters `h[output][input]`, `filter_length` taps,
/// tap `filter_length / 2` at zero lag.
pub type DemixingFilters = [[Vec<f64>; 2]; 2];

#[derive(Clone)]
pub struct BssState {
    config: BssConfig,
    window: Vec<f64>,
    fft: RealFft,
    unmixing: Vec<Mat2>,
    history: VecDeque<BlockStats>,
    tail: [Vec<f64>; 2],
    blocks_processed: usize,
}

impl std::fmt::Debug for BssState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BssState")
            .field("config", &self.config)
            .field("blocks_processed", &self.blocks_processed)
            .field("history", &self.history.len())
            .finish()
    }
}

impl BssState {
    /// Identity unmixing in every bin, empty statistics.
    pub fn new(config: BssConfig) -> Result<Self> {
        config.validate()?;
        let keep = config.fft_size - config.hop();
        Ok(Self {
            window: hann(config.fft_size),
            fft: RealFft::new(config.fft_size),
            unmixing: vec![IDENTITY; config.num_bins()],
            history: VecDeque::new(),
            tail: [vec![0.0; keep], vec![0.0; keep]],
            blocks_processed: 0,
            config,
        })
    }

    pub fn config(&self) -> &BssConfig {
        &self.config
    }

    pub fn blocks_processed(&self) -> usize {
        self.blocks_processed
    }

    pub fn num_bins(&self) -> usize {
        self.unmixing.len()
    }

    pub fn unmixing(&self) -> &[Mat2] {
        &self.unmixing
    }

    pub fn set_unmixing(&mut self, unmixing: Vec<Mat2>) -> Result<()> {
        if unmixing.len() != self.num_bins() {
            return Err(Error::Data(format!(
                "{} unmixing matrices for {} bins",
                unmixing.len(),
                self.num_bins()
            )));
        }
        self.unmixing = unmixing;
        Ok(())
    }

    /// Forgetting-weighted input power summed over bins and remembered blocks.
    pub fn accumulated_power(&self) -> f64 {
        self.history
            .iter()
            .map(|h| h.weight * h.cov.iter().map(|r| r[0][0].re + r[1][1].re).sum::<f64>())
            .sum()
    }

    /// Consumes one block of both channels and updates the unmixing matrices.
    pub fn adapt_block(&mut self, block: [&[f64]; 2]) -> Result<()> {
        let bl = self.config.block_length;
        if block[0].len() != bl || block[1].len() != bl {
            return Err(Error::Data(format!(
                "expected blocks of {bl} samples, got {} and {}",
                block[0].len(),
                block[1].len()
            )));
        }
        if block.iter().any(|c| c.iter().any(|x| !x.is_finite())) {
            return Err(Error::Data("non-finite samples in block".into()));
        }

        let cov = self.block_covariance(block);
        let lambda = self.config.forgetting_factor;
        for h in self.history.iter_mut() {
            h.weight *= lambda;
        }
        self.history.push_back(BlockStats { cov, weight: 1.0 });
        while self.history.len() > self.config.history
            || self.history.front().is_some_and(|h| h.weight < MIN_HISTORY_WEIGHT)
        {
            self.history.pop_front();
        }
        self.blocks_processed += 1;

        let total_weight: f64 = self.history.iter().map(|h| h.weight).sum();
        let avg_power =
            self.accumulated_power() / (2.0 * total_weight * self.num_bins() as f64);
        if !(avg_power > 0.0) {
            return Ok(());
        }
        let delta = self.config.regularization * avg_power;

        for k in 0..self.num_bins() {
            self.decorrelate_bin(k, delta);
        }
        self.align_permutations();
        self.normalize_scaling();
        self.constrain_length();
        Ok(())
    }

    fn block_covariance(&mut self, block: [&[f64]; 2]) -> Vec<Mat2> {
        let n = self.config.fft_size;
        let hop = self.config.hop();
        let nbins = self.num_bins();
        let bufs: Vec<Vec<f64>> = (0..2)
            .map(|c| {
                let mut b = self.tail[c].clone();
                b.extend_from_slice(block[c]);
                b
            })
            .collect();
        let frames = block[0].len() / hop;
        let mut cov = vec![[[ZERO; 2]; 2]; nbins];
        let mut x0 = vec![ZERO; nbins];
        let mut x1 = vec![ZERO; nbins];
        for f in 0..frames {
            let r = f * hop..f * hop + n;
            self.fft.forward_windowed(&bufs[0][r.clone()], &self.window, &mut x0);
            self.fft.forward_windowed(&bufs[1][r], &self.window, &mut x1);
            for k in 0..nbins {
                let (a, b) = (x0[k], x1[k]);
                let c = &mut cov[k];
                c[0][0] += a * a.conj();
                c[0][1] += a * b.conj();
                c[1][1] += b * b.conj();
            }
        }
        let scale = 1.0 / frames as f64;
        for c in cov.iter_mut() {
            c[0][0] *= scale;
            c[0][1] *= scale;
            c[1][1] *= scale;
            c[1][0] = c[0][1].conj();
        }
        for c in 0..2 {
            let len = bufs[c].len();
            self.tail[c].copy_from_slice(&bufs[c][len - (n - hop)..]);
        }
        cov
    }

    /// Damped quasi-Newton steps `W <- (I - mu E) W` for joint decorrelation
    /// of the remembered blocks. `E` is off-diagonal and solves the linearized
    /// stationarity condition of `sum_b log det diag(Ry_b) - log det Ry_b`.
    fn decorrelate_bin(&mut self, k: usize, delta: f64) {
        let mu = self.config.step_size;
        let mut w = self.unmixing[k];
        for _ in 0..self.config.num_inner_iterations {
            let (mut b01, mut b10) = (ZERO, ZERO);
            let (mut a, mut b, mut n) = (0.0, 0.0, 0.0);
            for h in &self.history {
                let ry = output_cov(&w, &h.cov[k]);
                let p0 = ry[0][0].re + delta;
                let p1 = ry[1][1].re + delta;
                if !(p0 > 0.0 && p1 > 0.0) {
                    continue;
                }
                b01 += ry[0][1] * (h.weight / p0);
                b10 += ry[1][0] * (h.weight / p1);
                a += h.weight * p0 / p1;
                b += h.weight * p1 / p0;
                n += h.weight;
            }
            if n == 0.0 {
                break;
            }
            // [[b, n], [n, a]] [e01, conj(e10)] = [b01, conj(b10)], loaded on the
            // diagonal so near-stationary bins take small gradient-like steps
            let (a, b) = (a + HESSIAN_LOADING * n, b + HESSIAN_LOADING * n);
            let det = a * b - n * n;
            let rhs1 = b10.conj();
            let e01 = (b01 * a - rhs1 * n) / det;
            let e10 = ((rhs1 * b - b01 * n) / det).conj();
            w = [
                [w[0][0] - e01 * mu * w[1][0], w[0][1] - e01 * mu * w[1][1]],
                [w[1][0] - e10 * mu * w[0][0], w[1][1] - e10 * mu * w[0][1]],
            ];
        }
        if w.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite()) {
            self.unmixing[k] = w;
        }
    }

    /// Share of output 0 in each remembered block, centered over blocks and
    /// normalized; `None` for bins without usable variation.
    fn power_profile(&self, k: usize) -> Option<Vec<f64>> {
        let w = &self.unmixing[k];
        let mut r: Vec<f64> = self
            .history
            .iter()
            .map(|h| {
                let ry = output_cov(w, &h.cov[k]);
                let (p0, p1) = (ry[0][0].re, ry[1][1].re);
                if p0 + p1 > 0.0 {
                    p0 / (p0 + p1)
                } else {
                    0.5
                }
            })
            .collect();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter_mut().for_each(|v| *v -= mean);
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-6 {
            return None;
        }
        r.iter_mut().for_each(|v| *v /= norm);
        Some(r)
    }

    /// Puts every bin into the output order of the majority of bins.
    fn align_permutations(&mut self) {
        if self.history.len() < 3 {
            return;
        }
        let profiles: Vec<Option<Vec<f64>>> =
            (0..self.num_bins()).map(|k| self.power_profile(k)).collect();
        let nblocks = self.history.len();
        let mut sign = vec![1.0; profiles.len()];
        for _ in 0..10 {
            let mut centroid = vec![0.0; nblocks];
            for (p, s) in profiles.iter().zip(&sign) {
                if let Some(p) = p {
                    for (c, v) in centroid.iter_mut().zip(p) {
                        *c += s * v;
                    }
                }
            }
            let norm = centroid.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return;
            }
            let mut changed = false;
            for (p, s) in profiles.iter().zip(sign.iter_mut()) {
                let Some(p) = p else { continue };
                let corr: f64 = p.iter().zip(&centroid).map(|(a, b)| a * b).sum::<f64>() / norm;
                let want = if corr < -PERMUTATION_MARGIN {
                    -1.0
                } else if corr > PERMUTATION_MARGIN {
                    1.0
                } else {
                    *s
                };
                if want != *s {
                    *s = want;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for (w, s) in self.unmixing.iter_mut().zip(&sign) {
            if *s < 0.0 {
                w.swap(0, 1);
            }
        }
    }

    /// `W <- diag(W^-1) W`: each output becomes the image of its source at
    /// the microphone with the same index.
    fn normalize_scaling(&mut self) {
        for w in self.unmixing.iter_mut() {
            let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
            if det.norm() < 1e-12 {
                continue;
            }
            let s0 = w[1][1] / det;
            let s1 = w[0][0] / det;
            w[0][0] *= s0;
            w[0][1] *= s0;
            w[1][0] *= s1;
            w[1][1] *= s1;
        }
    }

    /// Projects every unmixing entry onto filters with support
    /// `[-L/2, L/2)` around zero lag.
    fn constrain_length(&mut self) {
        let n = self.config.fft_size;
        let half = self.config.filter_length / 2;
        let keep_after = self.config.filter_length - half;
        let mut spec = vec![ZERO; self.num_bins()];
        let mut h = vec![0.0; n];
        for o in 0..2 {
            for q in 0..2 {
                for (s, w) in spec.iter_mut().zip(&self.unmixing) {
                    *s = w[o][q];
                }
                self.fft.inverse(&spec, &mut h);
                // lags 0..keep_after and -half..0 survive
                for v in &mut h[keep_after..n - half] {
                    *v = 0.0;
                }
                self.fft.forward(&h, &mut spec);
                for (w, s) in self.unmixing.iter_mut().zip(&spec) {
                    w[o][q] = *s;
                }
            }
        }
    }

    /// Current unmixing as time-domain filters.
    pub fn demixing_filters(&self) -> DemixingFilters {
        let n = self.config.fft_size;
        let l = self.config.filter_length;
        let half = l / 2;
        let mut fft = self.fft.clone();
        let mut spec = vec![ZERO; self.num_bins()];
        let mut h = vec![0.0; n];
        let mut out: DemixingFilters = Default::default();
        for o in 0..2 {
            for q in 0..2 {
                for (s, w) in spec.iter_mut().zip(&self.unmixing) {
                    *s = w[o][q];
                }
                fft.inverse(&spec, &mut h);
                out[o][q] = (0..l)
                    .map(|i| {
                        let lag = i as i64 - half as i64;
                        h[lag.rem_euclid(n as i64) as usize]
                    })
                    .collect();
            }
        }
        out
    }

    /// Filters whole signals with the current demixing filters. Output length
    /// equals input length; the filters' lookahead is compensated.
    pub fn apply(&self, signals: [&[f64]; 2], components: Option<&[[&[f64]; 2]]>) -> Result<BssOutputs> {
        let len = signals[0].len();
        if signals[1].len() != len {
            return Err(Error::Data("input channels differ in length".into()));
        }
        if signals.iter().any(|c| c.iter().any(|x| !x.is_finite())) {
            return Err(Error::Data("non-finite samples".into()));
        }
        if let Some(comps) = components {
            if comps.iter().any(|c| c[0].len() != len || c[1].len() != len) {
                return Err(Error::Data(
                    "component channels must match the mixture length".into(),
                ));
            }
        }
        let filters = self.demixing_filters();
        let y = filter_range(&filters, signals, 0, len);
        let components = components.map(|comps| {
            comps
                .iter()
                .map(|c| filter_range(&filters, *c, 0, len))
                .collect()
        });
        Ok(BssOutputs { y, components })
    }

    /// Mean normalized off-diagonal output cross-power over bins, using the
    /// remembered statistics.
    pub fn separation_cost(&self) -> f64 {
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for (k, w) in self.unmixing.iter().enumerate() {
            for h in &self.history {
                let ry = output_cov(w, &h.cov[k]);
                let p = ry[0][0].re * ry[1][1].re;
                if p > 0.0 {
                    acc += h.weight * ry[0][1].norm_sqr() / p;
                    wsum += h.weight;
                }
            }
        }
        if wsum > 0.0 {
            acc / wsum
        } else {
            0.0
        }
    }

    /// Largest 2-norm condition number over bins.
    pub fn max_condition_number(&self) -> f64 {
        self.unmixing.iter().map(condition_number).fold(0.0, f64::max)
    }

    /// CSV dump of the unmixing spectra:
    /// `bin,w11_re,w11_im,w12_re,w12_im,w21_re,w21_im,w22_re,w22_im`.
    pub fn write_spectrum_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bin,w11_re,w11_im,w12_re,w12_im,w21_re,w21_im,w22_re,w22_im")?;
        for (k, w) in self.unmixing.iter().enumerate() {
            write!(out, "{k}")?;
            for v in w.iter().flatten() {
                write!(out, ",{},{}", v.re, v.im)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Loads unmixing spectra written by [`BssState::write_spectrum_csv`].
    pub fn read_spectrum_csv<R: BufRead>(&mut self, input: R) -> Result<()> {
        let mut unmixing = Vec::with_capacity(self.num_bins());
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Data(format!("spectrum csv: {e}")))?;
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split(',')
                .skip(1)
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Data(format!("spectrum csv line {}: {e}", i + 1)))?;
            if vals.len() != 8 {
                return Err(Error::Data(format!(
                    "spectrum csv line {}: expected 8 values",
                    i + 1
                )));
            }
            let c = |j: usize| Complex64::new(vals[2 * j], vals[2 * j + 1]);
            unmixing.push([[c(0), c(1)], [c(2), c(3)]]);
        }
        self.set_unmixing(unmixing)
    }
}

fn output_cov(w: &Mat2, r: &Mat2) -> Mat2 {
    // W R W^H, Hermitian
    let a = [
        [
            w[0][0] * r[0][0] + w[0][1] * r[1][0],
            w[0][0] * r[0][1] + w[0][1] * r[1][1],
        ],
        [
            w[1][0] * r[0][0] + w[1][1] * r[1][0],
            w[1][0] * r[0][1] + w[1][1] * r[1][1],
        ],
    ];
    let y00 = a[0][0] * w[0][0].conj() + a[0][1] * w[0][1].conj();
    let y01 = a[0][0] * w[1][0].conj() + a[0][1] * w[1][1].conj();
    let y11 = a[1][0] * w[1][0].conj() + a[1][1] * w[1][1].conj();
    [
        [Complex64::new(y00.re, 0.0), y01],
        [y01.conj(), Complex64::new(y11.re, 0.0)],
    ]
}

fn condition_number(w: &Mat2) -> f64 {
    // singular values from the eigenvalues of W^H W
    let a = w[0][0].norm_sqr() + w[1][0].norm_sqr();
    let d = w[0][1].norm_sqr() + w[1][1].norm_sqr();
    let b = w[0][0].conj() * w[0][1] + w[1][0].conj() * w[1][1];
    let tr = a + d;
    let disc = ((a - d) * (a - d) + 4.0 * b.norm_sqr()).sqrt();
    let smax = (0.5 * (tr + disc)).sqrt();
    let smin = (0.5 * (tr - disc)).max(0.0).sqrt();
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

/// Outputs `y[o][n]` for `n` in `start..end`, with
/// `y[o][n] = sum_q sum_m h[o][q][m] x[q][n + L/2 - m]` and zeros outside the
/// input.
pub fn filter_range(filters: &DemixingFilters, x: [&[f64]; 2], start: usize, end: usize) -> [Vec<f64>; 2] {
    let l = filters[0][0].len();
    let half = l / 2;
    let n_out = end.saturating_sub(start);
    let seg_len = n_out + l - 1;
    let seg_start = start as i64 + half as i64 - (l as i64 - 1);
    let segs: Vec<Vec<f64>> = x
        .iter()
        .map(|ch| {
            (0..seg_len as i64)
                .map(|i| {
                    let idx = seg_start + i;
                    if idx >= 0 && (idx as usize) < ch.len() {
                        ch[idx as usize]
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let mut y = [vec![0.0; n_out], vec![0.0; n_out]];
    for (o, yo) in y.iter_mut().enumerate() {
        for q in 0..2 {
            let c = convolve(&segs[q], &filters[o][q]);
            for (i, v) in yo.iter_mut().enumerate() {
                *v += c[i + l - 1];
            }
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BssConfig {
        BssConfig {
            filter_length: 64,
            fft_size: 128,
            block_length: 512,
            ..BssConfig::default()
        }
    }

    #[test]
    fn init_contract() {
        let s = BssState::new(BssConfig::default()).unwrap();
        assert_eq!(s.num_bins(), 1025);
        assert!(s.unmixing().iter().all(|w| *w == IDENTITY));
        assert_eq!(s.blocks_processed(), 0);
        assert_eq!(s.accumulated_power(), 0.0);
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            BssConfig { filter_length: 1, ..small() },
            BssConfig { fft_size: 100, ..small() },
            BssConfig { block_length: 32, ..small() },
            BssConfig { block_length: 500, ..small() },
            BssConfig { forgetting_factor: 0.0, ..small() },
            BssConfig { step_size: 1.5, ..small() },
        ];
        for cfg in bad {
            assert!(matches!(BssState::new(cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn zero_blocks_leave_fresh_state_untouched() {
        let mut s = BssState::new(small()).unwrap();
        let z = vec![0.0; 512];
        s.adapt_block([&z, &z]).unwrap();
        assert!(s.unmixing().iter().all(|w| *w == IDENTITY));
        assert_eq!(s.blocks_processed(), 1);
    }

    #[test]
    fn bad_blocks_are_data_errors() {
        let mut s = BssState::new(small()).unwrap();
        let short = vec![0.0; 100];
        assert!(matches!(s.adapt_block([&short, &short]), Err(Error::Data(_))));
        let mut nan = vec![0.0; 512];
        nan[3] = f64::NAN;
        assert!(matches!(s.adapt_block([&nan, &nan]), Err(Error::Data(_))));
    }

    #[test]
    fn identity_filters_pass_inputs_through() {
        let s = BssState::new(small()).unwrap();
        let a: Vec<f64> = (0..700).map(|i| (i as f64 * 0.1).sin()).collect();
        let b: Vec<f64> = (0..700).map(|i| (i as f64 * 0.37).cos()).collect();
        let out = s.apply([&a, &b], None).unwrap();
        for (x, y) in a.iter().zip(&out.y[0]) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in b.iter().zip(&out.y[1]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_range_matches_direct_formula() {
        let mut s = BssState::new(small()).unwrap();
        let a: Vec<f64> = (0..3000).map(|i| ((i * 7919) % 97) as f64 / 48.0 - 1.0).collect();
        let b: Vec<f64> = (0..3000).map(|i| ((i * 104729) % 89) as f64 / 44.0 - 1.0).collect();
        for k in 0..4 {
            s.adapt_block([&a[k * 512..(k + 1) * 512], &b[k * 512..(k + 1) * 512]]).unwrap();
        }
        let f = s.demixing_filters();
        let l = 64usize;
        let got = filter_range(&f, [&a, &b], 1000, 1100);
        for (i, n) in (1000..1100).enumerate() {
            let mut want = 0.0;
            for q in 0..2 {
                let x = if q == 0 { &a } else { &b };
                for m in 0..l {
                    let idx = n as i64 + (l / 2) as i64 - m as i64;
                    if idx >= 0 && (idx as usize) < x.len() {
                        want += f[0][q][m] * x[idx as usize];
                    }
                }
            }
            assert!((got[0][i] - want).abs() < 1e-9, "{} vs {}", got[0][i], want);
        }
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let mut s = BssState::new(small()).unwrap();
        let a: Vec<f64> = (0..512).map(|i| (i as f64 * 0.21).sin()).collect();
        let b: Vec<f64> = (0..512).map(|i| (i as f64 * 0.05).sin() + 0.3 * a[i]).collect();
        s.adapt_block([&a, &b]).unwrap();
        let mut buf = Vec::new();
        s.write_spectrum_csv(&mut buf).unwrap();
        let mut t = BssState::new(small()).unwrap();
        t.read_spectrum_csv(buf.as_slice()).unwrap();
        assert_eq!(s.unmixing(), t.unmixing());
    }

    #[test]
    fn condition_number_of_known_matrices() {
        assert!((condition_number(&IDENTITY) - 1.0).abs() < 1e-12);
        let d = [[Complex64::new(3.0, 0.0), ZERO], [ZERO, Complex64::new(0.5, 0.0)]];
        assert!((condition_number(&d) - 6.0).abs() < 1e-12);
    }
}
