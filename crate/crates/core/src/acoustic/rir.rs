use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use super::room::{ArrayGeometry, Point3, RoomScenario};
use crate::error::{Error, Result};

const HALF_TAPS: i64 = 4;

/// Impulse responses for every (source, microphone) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RirSet {
    /// Indexed `[source][microphone]`.
    pub impulse_responses: Vec<Vec<Vec<f64>>>,
    pub length: usize,
}

/// Image-method (Allen & Berkley) impulse response from `source` to `mic`.
///
/// Walls share one reflection coefficient, see
/// [`RoomScenario::reflection_coefficient`].
/// Each image is placed with an 8-tap Hann-windowed sinc so off-grid delays
/// keep their sub-sample position. Reverberant responses are high-passed at
/// 100 Hz. With `t60 == 0` only the direct path is rendered, unfiltered.
pub fn generate_rir(scenario: &RoomScenario, source: Point3, mic: Point3) -> Result<Vec<f64>> {
    scenario.validate()?;
    scenario.check_inside(source, "source")?;
    scenario.check_inside(mic, "microphone")?;
    let beta = scenario.reflection_coefficient()?;
    let len = scenario.rir_length();
    let mut h = vec![0.0; len];

    let samples_per_meter = scenario.fs / scenario.speed_of_sound;
    let max_dist = (len as f64 + HALF_TAPS as f64) / samples_per_meter;

    if beta == 0.0 {
        add_image(&mut h, dist(source, mic), 1.0, samples_per_meter);
        return Ok(h);
    }

    for_each_image(scenario, source, mic, max_dist, |r, reflections| {
        add_image(&mut h, r, beta.powi(reflections), samples_per_meter);
    });
    highpass(&mut h, scenario.fs);
    Ok(h)
}

const HIGHPASS_HZ: f64 = 100.0;

/// Allen & Berkley's two-pole high-pass. Positive reflection coefficients
/// pile up a DC component in the late tail that no real room has.
fn highpass(h: &mut [f64], fs: f64) {
    let w = 2.0 * PI * HIGHPASS_HZ / fs;
    let r1 = (-w).exp();
    let (b1, b2) = (2.0 * r1 * w.cos(), -r1 * r1);
    let a1 = -(1.0 + r1);
    let mut y = [0.0; 3];
    for x in h.iter_mut() {
        y[2] = y[1];
        y[1] = y[0];
        y[0] = b1 * y[1] + b2 * y[2] + *x;
        *x = y[0] + a1 * y[1] + r1 * y[2];
    }
}

/// Calls `f(distance, reflection_count)` for every image source within
/// `max_dist` of `mic`.
fn for_each_image(
    scenario: &RoomScenario,
    source: Point3,
    mic: Point3,
    max_dist: f64,
    mut f: impl FnMut(f64, i32),
) {
    let dims = scenario.dimensions;
    let orders: Vec<i64> = dims
        .iter()
        .map(|&l| (max_dist / (2.0 * l)).ceil() as i64 + 1)
        .collect();

    for mx in -orders[0]..=orders[0] {
        for my in -orders[1]..=orders[1] {
            for mz in -orders[2]..=orders[2] {
                for q in 0..2i64 {
                    for u in 0..2i64 {
                        for w in 0..2i64 {
                            let dx = (1 - 2 * q) as f64 * source[0] - mic[0]
                                + 2.0 * mx as f64 * dims[0];
                            let dy = (1 - 2 * u) as f64 * source[1] - mic[1]
                                + 2.0 * my as f64 * dims[1];
                            let dz = (1 - 2 * w) as f64 * source[2] - mic[2]
                                + 2.0 * mz as f64 * dims[2];
                            let r = (dx * dx + dy * dy + dz * dz).sqrt();
                            if r > max_dist {
                                continue;
                            }
                            let reflections = (mx - q).abs()
                                + mx.abs()
                                + (my - u).abs()
                                + my.abs()
                                + (mz - w).abs()
                                + mz.abs();
                            f(r, reflections as i32);
                        }
                    }
                }
            }
        }
    }
}

const CALIBRATION_ROUNDS: usize = 12;
const CALIBRATION_TOLERANCE: f64 = 2e-3;

type CalibrationKey = [u64; 6];

fn calibration_cache() -> &'static Mutex<HashMap<CalibrationKey, f64>> {
    static CACHE: OnceLock<Mutex<HashMap<CalibrationKey, f64>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub(super) fn calibrated_reflection_coefficient(scenario: &RoomScenario) -> Result<f64> {
    let eyring = scenario.eyring_reflection_coefficient()?;
    if eyring == 0.0 {
        return Ok(0.0);
    }
    let [lx, ly, lz] = scenario.dimensions;
    let key = [lx, ly, lz, scenario.t60, scenario.fs, scenario.speed_of_sound].map(f64::to_bits);
    if let Some(&beta) = calibration_cache().lock().unwrap().get(&key) {
        return Ok(beta);
    }

    // off every symmetry plane so no mode family dominates
    let at = |f: [f64; 3]| -> Point3 { [0, 1, 2].map(|i| f[i] * scenario.dimensions[i]) };
    let (src, mic) = (at([0.31, 0.43, 0.47]), at([0.62, 0.57, 0.39]));

    // T60 scales roughly like 1 / -ln(beta)
    let mut log_beta = eyring.ln();
    for _ in 0..CALIBRATION_ROUNDS {
        let env = energy_envelope(scenario, src, mic, log_beta.exp());
        let ratio = estimate_t60(&env, scenario.fs)? / scenario.t60;
        log_beta *= ratio;
        if (ratio - 1.0).abs() < CALIBRATION_TOLERANCE {
            break;
        }
    }
    let beta = log_beta.exp();
    calibration_cache().lock().unwrap().insert(key, beta);
    Ok(beta)
}

/// Square root of the per-sample image energy, a phase-free stand-in for
/// the rendered response with the same decay.
fn energy_envelope(scenario: &RoomScenario, source: Point3, mic: Point3, beta: f64) -> Vec<f64> {
    let len = scenario.rir_length();
    let samples_per_meter = scenario.fs / scenario.speed_of_sound;
    let mut energy = vec![0.0; len];
    for_each_image(scenario, source, mic, len as f64 / samples_per_meter, |r, n| {
        let n_sample = (r * samples_per_meter) as usize;
        if let Some(e) = energy.get_mut(n_sample) {
            *e += (beta.powi(n) / (4.0 * PI * r)).powi(2);
        }
    });
    energy.into_iter().map(f64::sqrt).collect()
}

fn dist(a: Point3, b: Point3) -> f64 {
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn add_image(h: &mut [f64], r: f64, gain: f64, samples_per_meter: f64) {
    let amp = gain / (4.0 * PI * r);
    let delay = r * samples_per_meter;
    let base = delay.floor();
    let frac = delay - base;
    let base = base as i64;
    // sin(pi (k - frac)) = -(-1)^k sin(pi frac), exact zeros on the grid
    let sin_frac = (PI * frac).sin();
    for k in (1 - HALF_TAPS)..=HALF_TAPS {
        let n = base + k;
        if n < 0 || n as usize >= h.len() {
            continue;
        }
        let x = k as f64 - frac;
        let sinc = if x == 0.0 {
            1.0
        } else {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            sign * sin_frac / (PI * x)
        };
        let window = 0.5 * (1.0 + (PI * x / HALF_TAPS as f64).cos());
        h[n as usize] += amp * sinc * window;
    }
}

/// Impulse responses from every scenario source to every microphone of
/// `geometry`.
pub fn generate_rir_set(scenario: &RoomScenario, geometry: &ArrayGeometry) -> Result<RirSet> {
    geometry.validate(scenario)?;
    let mics = geometry.mic_positions();
    let impulse_responses = scenario
        .sources
        .iter()
        .map(|s| {
            let p = scenario.source_position(s, geometry);
            mics.iter()
                .map(|&m| generate_rir(scenario, p, m))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RirSet {
        impulse_responses,
        length: scenario.rir_length(),
    })
}

/// Backward-integrated energy decay curve in dB relative to total energy.
pub fn schroeder_curve_db(h: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut curve = vec![0.0; h.len()];
    for (c, x) in curve.iter_mut().zip(h).rev() {
        acc += x * x;
        *c = acc;
    }
    let total = curve.first().copied().unwrap_or(0.0);
    curve
        .iter()
        .map(|&e| {
            if total > 0.0 {
                10.0 * (e / total).log10()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

/// Reverberation time from a least-squares line through the -5 dB to
/// -25 dB span of the Schroeder curve, extrapolated to -60 dB.
pub fn estimate_t60(h: &[f64], fs: f64) -> Result<f64> {
    let curve = schroeder_curve_db(h);
    let start = curve.iter().position(|&d| d <= -5.0);
    let end = curve.iter().position(|&d| d <= -25.0);
    let (start, end) = match (start, end) {
        (Some(s), Some(e)) if e > s + 1 => (s, e),
        _ => {
            return Err(Error::Measurement(
                "energy decay does not reach -25 dB".into(),
            ))
        }
    };
    let n = (end - start + 1) as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (i, &y) in curve[start..=end].iter().enumerate() {
        let x = i as f64;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if !(slope < 0.0) {
        return Err(Error::Measurement("energy decay is not decreasing".into()));
    }
    Ok(-60.0 / slope / fs)
}

/// Distance at which direct and reverberant energy are equal,
/// `0.057 * sqrt(V / T60)`.
pub fn critical_distance(scenario: &RoomScenario) -> Result<f64> {
    if !(scenario.t60 > 0.0) {
        return Err(Error::Domain(
            "critical distance is undefined for t60 = 0".into(),
        ));
    }
    Ok(0.057 * (scenario.volume() / scenario.t60).sqrt())
}
