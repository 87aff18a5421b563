//! Browser bindings for three small demos: a room impulse response, the
//! competitor spacing sequence and a one-segment separation run.

use adaptive_array::acoustic::{
    critical_distance, estimate_t60, generate_rir, ArrayGeometry, RoomScenario, SourceSpec,
};
use adaptive_array::adapt::{a_max, competitor_spacing};
use adaptive_array::harness::{run_spacing_sweep, ExperimentConfig};
use wasm_bindgen::prelude::*;

const ROOM: [f64; 3] = [4.5, 4.5, 2.5];
const FS: f64 = 16000.0;

fn js_err(e: impl ToString) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct RoomResponse {
    samples: Vec<f64>,
    measured_t60: f64,
    critical_distance: f64,
}

#[wasm_bindgen]
impl RoomResponse {
    /// Impulse response samples at 16 kHz.
    #[wasm_bindgen(getter)]
    pub fn samples(&self) -> Vec<f64> {
        self.samples.clone()
    }

    /// Seconds; NaN for an anechoic room.
    #[wasm_bindgen(getter, js_name = measuredT60)]
    pub fn measured_t60(&self) -> f64 {
        self.measured_t60
    }

    /// Meters; NaN for an anechoic room.
    #[wasm_bindgen(getter, js_name = criticalDistance)]
    pub fn critical_distance(&self) -> f64 {
        self.critical_distance
    }
}

/// Response of the 4.5 x 4.5 x 2.5 m room from a source at `angle_deg` and
/// `distance` meters to the center microphone of the array.
#[wasm_bindgen(js_name = roomResponse)]
pub fn room_response(t60: f64, angle_deg: f64, distance: f64) -> Result<RoomResponse, JsError> {
    let scenario = RoomScenario::new(ROOM, t60, FS);
    let geometry = ArrayGeometry::centered(ROOM, 0.15, 0.2);
    let source = SourceSpec::new(angle_deg, distance, vec![1.0]);
    let h = generate_rir(
        &scenario,
        scenario.source_position(&source, &geometry),
        geometry.center,
    )
    .map_err(js_err)?;
    let (measured_t60, critical_distance) = if t60 > 0.0 {
        (
            estimate_t60(&h, FS).map_err(js_err)?,
            critical_distance(&scenario).map_err(js_err)?,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(RoomResponse {
        samples: h,
        measured_t60,
        critical_distance,
    })
}

/// Competitor spacings around `d_sup` for `a = 1..=a_max(d_sup, epsilon)`.
#[wasm_bindgen(js_name = competitorSequence)]
pub fn competitor_sequence(d_sup: f64, epsilon: f64) -> Result<Vec<f64>, JsError> {
    if !(d_sup > 0.0 && epsilon > 0.0) {
        return Err(JsError::new("d_sup and epsilon must be positive"));
    }
    Ok((1..=a_max(d_sup, epsilon))
        .map(|a| competitor_spacing(d_sup, a))
        .collect())
}

#[wasm_bindgen]
pub struct Separation {
    pub msc: f64,
    #[wasm_bindgen(js_name = inputSir)]
    pub input_sir: f64,
    #[wasm_bindgen(js_name = outputSir)]
    pub output_sir: f64,
}

/// Adapts one sub-array of `spacing` meters for `seconds` on two speech-like
/// sources at `+-angle_deg`, 1 m away, and reports the coherence measure and
/// SIR before and after separation.
#[wasm_bindgen]
pub fn separate(
    angle_deg: f64,
    t60: f64,
    spacing: f64,
    seconds: f64,
    seed: u64,
) -> Result<Separation, JsError> {
    let mut cfg = ExperimentConfig::default();
    cfg.scenario.t60 = t60;
    cfg.scenario.sources[0].angle_deg = angle_deg;
    cfg.scenario.sources[1].angle_deg = -angle_deg;
    cfg.adapt.segment_seconds = seconds;
    cfg.total_duration = seconds;
    cfg.sweep = vec![spacing];
    cfg.seed = seed;
    let row = run_spacing_sweep(&cfg).map_err(js_err)?[0];
    Ok(Separation {
        msc: row.msc,
        input_sir: row.input_sir_mean,
        output_sir: row.sir_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_converges_to_d_sup() {
        let seq = competitor_sequence(0.2, 0.05).unwrap();
        assert_eq!(seq.len(), 3);
        assert!((seq[0] - 0.3).abs() < 1e-12);
        assert!((seq[2] - 0.2).abs() <= 0.05);
    }

    #[test]
    fn separation_improves_sir() {
        let r = separate(40.0, 0.0, 0.2, 2.0, 3).unwrap();
        assert!(r.output_sir > r.input_sir + 3.0);
        assert!((0.0..=1.0).contains(&r.msc));
    }

    #[test]
    fn anechoic_response_has_no_decay_time() {
        let r = room_response(0.0, 0.0, 1.0).unwrap();
        assert!(r.measured_t60().is_nan());
        let r = room_response(0.3, 30.0, 1.0).unwrap();
        assert!((r.measured_t60() - 0.3).abs() < 0.06);
    }
}
