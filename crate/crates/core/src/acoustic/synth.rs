use super::rir::{generate_rir_set, RirSet};
use super::room::{ArrayGeometry, RoomScenario};
use crate::dsp::convolve;
use crate::error::{Error, Result};

/// Synthesized microphone signals with the contribution of every source kept
/// separately.
#[derive(Debug, Clone, PartialEq)]
pub struct MicSignals {
    /// Indexed `[microphone]`.
    pub total: Vec<Vec<f64>>,
    /// Indexed `[source][microphone]`.
    pub components: Vec<Vec<Vec<f64>>>,
    pub fs: f64,
}

impl MicSignals {
    pub fn len(&self) -> usize {
        self.total.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The two mixture channels of a microphone pair.
    pub fn pair(&self, mics: [usize; 2]) -> [&[f64]; 2] {
        [&self.total[mics[0]], &self.total[mics[1]]]
    }

    /// Per-source images at a microphone pair, indexed `[source][channel]`.
    pub fn component_pairs(&self, mics: [usize; 2]) -> Vec<[&[f64]; 2]> {
        self.components
            .iter()
            .map(|c| [c[mics[0]].as_slice(), c[mics[1]].as_slice()])
            .collect()
    }
}

/// Convolves every source signal with its impulse responses for `geometry`.
pub fn synthesize(scenario: &RoomScenario, geometry: &ArrayGeometry) -> Result<MicSignals> {
    scenario.validate()?;
    geometry.validate(scenario)?;
    for s in &scenario.sources {
        scenario.check_inside(scenario.source_position(s, geometry), "source")?;
    }
    let rirs = generate_rir_set(scenario, geometry)?;
    synthesize_with_rirs(scenario, &rirs)
}

/// Synthesis from precomputed impulse responses. Output length is the full
/// convolution length of the longest source.
pub fn synthesize_with_rirs(scenario: &RoomScenario, rirs: &RirSet) -> Result<MicSignals> {
    if rirs.impulse_responses.len() != scenario.sources.len() {
        return Err(Error::Data(format!(
            "{} impulse response sets for {} sources",
            rirs.impulse_responses.len(),
            scenario.sources.len()
        )));
    }
    let num_mics = rirs.impulse_responses.first().map_or(0, Vec::len);
    let longest = scenario.sources.iter().map(|s| s.signal.len()).max().unwrap_or(0);
    let len = if longest == 0 { 0 } else { longest + rirs.length - 1 };

    let components: Vec<Vec<Vec<f64>>> = scenario
        .sources
        .iter()
        .zip(&rirs.impulse_responses)
        .map(|(src, hs)| {
            let scaled: Vec<f64> = src.signal.iter().map(|x| x * src.power_scale).collect();
            hs.iter()
                .map(|h| {
                    let mut y = convolve(&scaled, h);
                    y.resize(len, 0.0);
                    y
                })
                .collect()
        })
        .collect();

    let mut total = vec![vec![0.0; len]; num_mics];
    for comp in &components {
        for (t, c) in total.iter_mut().zip(comp) {
            for (a, b) in t.iter_mut().zip(c) {
                *a += b;
            }
        }
    }
    Ok(MicSignals {
        total,
        components,
        fs: scenario.fs,
    })
}
