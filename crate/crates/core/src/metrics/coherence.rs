use std::io::Write;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::{hann, RealFft};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Taper {
    Hann,
    Rectangular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WelchConfig {
    pub window_length: usize,
    pub overlap_fraction: f64,
    pub window: Taper,
    /// Weight of the newest block in the recursive average.
    pub averaging_constant: f64,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            window_length: 4096,
            overlap_fraction: 0.5,
            window: Taper::Hann,
            averaging_constant: 0.3,
        }
    }
}

impl WelchConfig {
    pub fn hop(&self) -> usize {
        (self.window_length as f64 * (1.0 - self.overlap_fraction)).round() as usize
    }

    pub fn num_bins(&self) -> usize {
        self.window_length / 2 + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_length < 2 {
            return Err(Error::Config("welch window_length must be >= 2".into()));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(Error::Config("welch overlap_fraction must be in [0, 1)".into()));
        }
        let hop = self.window_length as f64 * (1.0 - self.overlap_fraction);
        if (hop - hop.round()).abs() > 1e-9 || hop.round() < 1.0 {
            return Err(Error::Config(format!(
                "welch overlap {} does not give an integer hop",
                self.overlap_fraction
            )));
        }
        if !(self.averaging_constant > 0.0 && self.averaging_constant <= 1.0) {
            return Err(Error::Config("averaging_constant must be in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Weighted magnitude-squared coherence, always within `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct MscValue(f64);

impl MscValue {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Measurement(format!("coherence {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Running auto- and cross-spectra of two channels: Welch periodograms per
/// block, recursively averaged across blocks.
#[derive(Debug, Clone)]
pub struct CoherenceEstimator {
    config: WelchConfig,
    window: Vec<f64>,
    fft: RealFft,
    pub s11: Vec<f64>,
    pub s22: Vec<f64>,
    pub s12: Vec<Complex64>,
    pub segments_seen: usize,
    updates: usize,
}

impl CoherenceEstimator {
    pub fn new(config: WelchConfig) -> Result<Self> {
        config.validate()?;
        let n = config.num_bins();
        let window = match config.window {
            Taper::Hann => hann(config.window_length),
            Taper::Rectangular => vec![1.0; config.window_length],
        };
        Ok(Self {
            window,
            fft: RealFft::new(config.window_length),
            s11: vec![0.0; n],
            s22: vec![0.0; n],
            s12: vec![Complex64::new(0.0, 0.0); n],
            segments_seen: 0,
            updates: 0,
            config,
        })
    }

    pub fn config(&self) -> &WelchConfig {
        &self.config
    }

    pub fn num_bins(&self) -> usize {
        self.s11.len()
    }

    pub fn is_initialized(&self) -> bool {
        self.updates > 0
    }

    /// Folds one block of both channels into the running spectra.
    pub fn update(&mut self, y1: &[f64], y2: &[f64]) -> Result<()> {
        let wl = self.config.window_length;
        if y1.len() != y2.len() {
            return Err(Error::Data(format!(
                "channel lengths differ: {} vs {}",
                y1.len(),
                y2.len()
            )));
        }
        if y1.len() < wl {
            return Err(Error::Data(format!(
                "block of {} samples is shorter than the {wl}-sample window",
                y1.len()
            )));
        }
        if y1.iter().chain(y2).any(|x| !x.is_finite()) {
            return Err(Error::Data("non-finite samples".into()));
        }

        let hop = self.config.hop();
        let nseg = (y1.len() - wl) / hop + 1;
        let n = self.num_bins();
        let mut a = vec![Complex64::new(0.0, 0.0); n];
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        let mut p11 = vec![0.0; n];
        let mut p22 = vec![0.0; n];
        let mut p12 = vec![Complex64::new(0.0, 0.0); n];
        for s in 0..nseg {
            let range = s * hop..s * hop + wl;
            self.fft.forward_windowed(&y1[range.clone()], &self.window, &mut a);
            self.fft.forward_windowed(&y2[range], &self.window, &mut b);
            for k in 0..n {
                p11[k] += a[k].norm_sqr();
                p22[k] += b[k].norm_sqr();
                p12[k] += a[k] * b[k].conj();
            }
        }
        let norm = 1.0 / (nseg as f64 * self.window.iter().map(|w| w * w).sum::<f64>());

        let alpha = if self.updates == 0 {
            1.0
        } else {
            self.config.averaging_constant
        };
        for k in 0..n {
            self.s11[k] = (1.0 - alpha) * self.s11[k] + alpha * p11[k] * norm;
            self.s22[k] = (1.0 - alpha) * self.s22[k] + alpha * p22[k] * norm;
            self.s12[k] = self.s12[k] * (1.0 - alpha) + p12[k] * (alpha * norm);
        }
        self.segments_seen += nseg;
        self.updates += 1;
        Ok(())
    }

    /// Per-bin weights: the mean of the two auto-spectra.
    pub fn weighting(&self) -> Vec<f64> {
        self.s11
            .iter()
            .zip(&self.s22)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    /// Per-bin `|S12|^2 / (S11 S22)`, zero where either auto-spectrum is zero.
    pub fn bin_coherence(&self) -> Vec<f64> {
        (0..self.num_bins())
            .map(|k| {
                let p = self.s11[k] * self.s22[k];
                if p > 0.0 {
                    (self.s12[k].norm_sqr() / p).min(1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Weighted average of the per-bin coherence over informative bins.
    pub fn weighted_msc(&self) -> Result<MscValue> {
        if !self.is_initialized() {
            return Err(Error::UndefinedMeasure("no data has been observed".into()));
        }
        let products: Vec<f64> = self
            .s11
            .iter()
            .zip(&self.s22)
            .map(|(a, b)| a * b)
            .collect();
        let max = products.iter().cloned().fold(0.0, f64::max);
        if !(max > 0.0) {
            return Err(Error::UndefinedMeasure("output spectra are all zero".into()));
        }
        let floor = 1e-12 * max;
        let weights = self.weighting();
        let coherence = self.bin_coherence();
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..self.num_bins() {
            if products[k] < floor {
                continue;
            }
            num += weights[k] * coherence[k];
            den += weights[k];
        }
        if !(den > 0.0) {
            return Err(Error::UndefinedMeasure("zero total weight".into()));
        }
        MscValue::new((num / den).clamp(0.0, 1.0))
    }

    /// CSV dump: `bin,s11,s22,re_s12,im_s12`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bin,s11,s22,re_s12,im_s12")?;
        for k in 0..self.num_bins() {
            writeln!(
                out,
                "{k},{},{},{},{}",
                self.s11[k], self.s22[k], self.s12[k].re, self.s12[k].im
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample(StandardNormal)).collect()
    }

    fn small_cfg() -> WelchConfig {
        WelchConfig {
            window_length: 256,
            ..WelchConfig::default()
        }
    }

    #[test]
    fn identical_channels_are_coherent() {
        let x = noise(1, 256 * 9);
        let mut est = CoherenceEstimator::new(small_cfg()).unwrap();
        est.update(&x, &x).unwrap();
        assert!(est.segments_seen >= 8);
        assert!(est.bin_coherence().iter().skip(1).all(|&c| c > 0.99));
        assert!(est.weighted_msc().unwrap().value() >= 0.99);
    }

    #[test]
    fn zero_block_decays_spectra() {
        let x = noise(2, 1024);
        let y = noise(3, 1024);
        let mut est = CoherenceEstimator::new(small_cfg()).unwrap();
        est.update(&x, &y).unwrap();
        let before = est.clone();
        est.update(&[0.0; 1024], &[0.0; 1024]).unwrap();
        for k in 0..est.num_bins() {
            assert!((est.s11[k] - 0.7 * before.s11[k]).abs() <= 1e-12 * before.s11[k].max(1.0));
            assert!((est.s22[k] - 0.7 * before.s22[k]).abs() <= 1e-12 * before.s22[k].max(1.0));
        }
    }

    #[test]
    fn weighting_is_mean_of_auto_spectra() {
        let mut est = CoherenceEstimator::new(small_cfg()).unwrap();
        est.s11 = vec![2.0; est.num_bins()];
        est.s22 = vec![0.0; est.num_bins()];
        assert!(est.weighting().iter().all(|&w| w == 1.0));
        est.s22 = vec![2.0; est.num_bins()];
        assert!(est.weighting().iter().all(|&w| w == 2.0));
    }

    #[test]
    fn constant_coherence_is_returned_regardless_of_weights() {
        let mut est = CoherenceEstimator::new(small_cfg()).unwrap();
        est.updates = 1;
        let n = est.num_bins();
        let c: f64 = 0.37;
        for k in 0..n {
            let p = 1.0 + k as f64;
            est.s11[k] = p;
            est.s22[k] = 3.0 * p * p;
            est.s12[k] = Complex64::from_polar((c * est.s11[k] * est.s22[k]).sqrt(), k as f64);
        }
        assert!((est.weighted_msc().unwrap().value() - c).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let mut est = CoherenceEstimator::new(small_cfg()).unwrap();
        assert!(matches!(est.weighted_msc(), Err(Error::UndefinedMeasure(_))));
        assert!(matches!(est.update(&[0.0; 100], &[0.0; 100]), Err(Error::Data(_))));
        est.update(&[0.0; 256], &[0.0; 256]).unwrap();
        assert!(matches!(est.weighted_msc(), Err(Error::UndefinedMeasure(_))));
        let bad = WelchConfig {
            window_length: 255,
            overlap_fraction: 0.5,
            ..WelchConfig::default()
        };
        assert!(CoherenceEstimator::new(bad).is_err());
    }

    #[test]
    fn equal_scaling_leaves_measure_unchanged() {
        let x = noise(4, 2048);
        let y: Vec<f64> = noise(5, 2048).iter().zip(&x).map(|(a, b)| a + 0.5 * b).collect();
        let mut e1 = CoherenceEstimator::new(small_cfg()).unwrap();
        e1.update(&x, &y).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| v * 8.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| v * 8.0).collect();
        let mut e2 = CoherenceEstimator::new(small_cfg()).unwrap();
        e2.update(&xs, &ys).unwrap();
        let (a, b) = (e1.weighted_msc().unwrap().value(), e2.weighted_msc().unwrap().value());
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}
