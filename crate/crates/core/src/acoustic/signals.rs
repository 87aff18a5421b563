//! Deterministic speech-like test material.
//!
//! Gaussian noise is shaped by a long-term speech spectrum and gated by a
//! syllable-rate envelope so that second-order separation has the
//! non-stationarity it relies on.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dsp::RealFft;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeechProfile {
    Male,
    Female,
}

impl SpeechProfile {
    /// (spectral knee in Hz, formant centers in Hz)
    fn shape(self) -> (f64, [f64; 3]) {
        match self {
            SpeechProfile::Male => (350.0, [500.0, 1500.0, 2500.0]),
            SpeechProfile::Female => (550.0, [850.0, 2000.0, 3000.0]),
        }
    }

    /// Long-term magnitude response at `freq` Hz.
    pub fn magnitude(self, freq: f64) -> f64 {
        let (knee, formants) = self.shape();
        let highpass = {
            let r = freq / 80.0;
            r * r / (1.0 + r * r)
        };
        // roughly -10 dB/octave above the knee
        let tilt = 1.0 / (1.0 + (freq / knee).powf(1.66));
        let bumps: f64 = formants
            .iter()
            .map(|&f| {
                let bw = 0.25 * f;
                0.6 / (1.0 + ((freq - f) / bw).powi(2))
            })
            .sum();
        highpass * tilt.sqrt() * (1.0 + bumps)
    }
}

/// Speech-shaped, amplitude-modulated noise with unit RMS.
pub fn speech_noise(profile: SpeechProfile, seed: u64, len: usize, fs: f64) -> Vec<f64> {
    if len == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_fft = len.next_power_of_two().max(2);
    let white: Vec<f64> = (0..n_fft).map(|_| rng.sample(StandardNormal)).collect();

    let mut fft = RealFft::new(n_fft);
    let mut spec = vec![Complex64::new(0.0, 0.0); fft.num_bins()];
    fft.forward(&white, &mut spec);
    for (k, s) in spec.iter_mut().enumerate() {
        *s *= profile.magnitude(k as f64 * fs / n_fft as f64);
    }
    let mut shaped = vec![0.0; n_fft];
    fft.inverse(&spec, &mut shaped);
    shaped.truncate(len);

    let envelope = syllable_envelope(&mut rng, len, fs);
    let mut out: Vec<f64> = shaped.iter().zip(&envelope).map(|(x, e)| x * e).collect();
    let rms = (out.iter().map(|x| x * x).sum::<f64>() / len as f64).sqrt();
    if rms > 0.0 {
        out.iter_mut().for_each(|x| *x /= rms);
    }
    out
}

/// Piecewise-constant on/off levels with random durations, smoothed by a
/// 15 ms one-pole filter. Pauses keep a small floor so no block is silent.
fn syllable_envelope(rng: &mut ChaCha8Rng, len: usize, fs: f64) -> Vec<f64> {
    let mut levels = Vec::with_capacity(len);
    while levels.len() < len {
        let dur = (rng.gen_range(0.08..0.45) * fs) as usize;
        let level = if rng.gen_bool(0.6) {
            rng.gen_range(0.5..1.0)
        } else {
            0.05
        };
        levels.extend(std::iter::repeat(level).take(dur.max(1)));
    }
    levels.truncate(len);

    let a = (-1.0 / (0.015 * fs)).exp();
    let mut state = levels[0];
    for v in levels.iter_mut() {
        state = a * state + (1.0 - a) * *v;
        *v = state;
    }
    levels
}
