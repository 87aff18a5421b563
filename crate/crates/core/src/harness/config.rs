use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::acoustic::signals::{speech_noise, SpeechProfile};
use crate::acoustic::{wav, ArrayGeometry, RoomScenario, SourceSpec};
use crate::adapt::AdaptParams;
use crate::bss::BssConfig;
use crate::error::{Error, Result};
use crate::metrics::WelchConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalConfig {
    /// Built-in speech-shaped modulated noise.
    SpeechNoise {
        profile: SpeechProfile,
        #[serde(default)]
        seed_offset: u64,
    },
    /// Mono WAV at the scenario sample rate; relative paths resolve against
    /// the config file directory.
    Wav { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub angle_deg: f64,
    pub distance: f64,
    #[serde(default = "one")]
    pub power_scale: f64,
    pub signal: SignalConfig,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub room: [f64; 3],
    pub t60: f64,
    pub fs: f64,
    pub speed_of_sound: f64,
    /// Defaults to the middle of the floor plan at 1.2 m.
    pub array_center: Option<[f64; 3]>,
    pub orientation: [f64; 3],
    pub sources: Vec<SourceConfig>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            room: [4.5, 4.5, 2.5],
            t60: 0.2,
            fs: 16000.0,
            speed_of_sound: 343.0,
            array_center: None,
            orientation: [1.0, 0.0, 0.0],
            sources: vec![
                SourceConfig {
                    angle_deg: 20.0,
                    distance: 1.0,
                    power_scale: 1.0,
                    signal: SignalConfig::SpeechNoise {
                        profile: SpeechProfile::Female,
                        seed_offset: 0,
                    },
                },
                SourceConfig {
                    angle_deg: -20.0,
                    distance: 1.0,
                    power_scale: 1.0,
                    signal: SignalConfig::SpeechNoise {
                        profile: SpeechProfile::Male,
                        seed_offset: 0,
                    },
                },
            ],
        }
    }
}

/// Everything needed to run an adaptation experiment or a spacing sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    /// Initial spacings of sub-arrays 1 and 2, meters.
    pub initial_spacings: [f64; 2],
    pub adapt: AdaptParams,
    pub bss: BssConfig,
    pub welch: WelchConfig,
    /// Seconds of source material consumed by the experiment.
    pub total_duration: f64,
    /// Fixed spacings for `sweep`.
    pub sweep: Vec<f64>,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Restart a sub-array's separation from identity when its spacing moves.
    pub reset_bss_on_spacing_change: bool,
    /// Write every block to the trace instead of one row per iteration.
    pub trace_every_block: bool,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioConfig::default(),
            initial_spacings: [0.15, 0.20],
            adapt: AdaptParams::default(),
            bss: BssConfig::default(),
            welch: WelchConfig::default(),
            total_duration: 30.0,
            sweep: vec![0.10, 0.15, 0.20, 0.25],
            seed: 1,
            out_dir: PathBuf::from("out"),
            reset_bss_on_spacing_change: true,
            trace_every_block: false,
            base_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn block_length(&self) -> usize {
        self.bss.block_length
    }

    pub fn blocks_per_segment(&self) -> usize {
        (self.adapt.segment_seconds * self.scenario.fs / self.bss.block_length as f64).floor()
            as usize
    }

    pub fn segment_samples(&self) -> usize {
        self.blocks_per_segment() * self.bss.block_length
    }

    pub fn num_iterations(&self) -> usize {
        (self.total_duration / self.adapt.segment_seconds + 1e-9).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.adapt.validate()?;
        self.bss.validate()?;
        self.welch.validate()?;
        if self.scenario.sources.len() != 2 {
            return Err(Error::Config(format!(
                "exactly two sources are required, got {}",
                self.scenario.sources.len()
            )));
        }
        if self.welch.window_length > self.bss.block_length {
            return Err(Error::Config(format!(
                "welch window {} exceeds the block length {}",
                self.welch.window_length, self.bss.block_length
            )));
        }
        if self.blocks_per_segment() == 0 {
            return Err(Error::Config(
                "segment_seconds is shorter than one block".into(),
            ));
        }
        if self.num_iterations() == 0 {
            return Err(Error::Config(
                "total_duration must cover at least one geometry iteration".into(),
            ));
        }
        for &d in self.initial_spacings.iter().chain(&self.sweep) {
            if !(d > 0.0) {
                return Err(Error::Config(format!("spacing {d} must be positive")));
            }
        }
        let room = self.room()?;
        room.validate()?;
        room.reflection_coefficient()?;
        let [d1, d2] = self.initial_spacings;
        self.geometry(d1, d2).validate(&room)?;
        Ok(())
    }

    /// Scenario without source signals attached.
    pub fn room(&self) -> Result<RoomScenario> {
        let s = &self.scenario;
        Ok(RoomScenario {
            dimensions: s.room,
            t60: s.t60,
            fs: s.fs,
            speed_of_sound: s.speed_of_sound,
            sources: Vec::new(),
        })
    }

    pub fn geometry(&self, d1: f64, d2: f64) -> ArrayGeometry {
        let mut g = ArrayGeometry::centered(self.scenario.room, d1, d2);
        if let Some(c) = self.scenario.array_center {
            g.center = c;
        }
        g.orientation = self.scenario.orientation;
        g
    }

    fn source_seed(&self, index: usize, offset: u64) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((index as u64 + 1).wrapping_mul(0x2545_F491_4F6C_DD1D))
            .wrapping_add(offset)
    }

    /// Source material of at least `len` samples per source.
    pub fn source_material(&self, len: usize) -> Result<Vec<Arc<[f64]>>> {
        self.scenario
            .sources
            .iter()
            .enumerate()
            .map(|(i, src)| match &src.signal {
                SignalConfig::SpeechNoise {
                    profile,
                    seed_offset,
                } => Ok(Arc::from(speech_noise(
                    *profile,
                    self.source_seed(i, *seed_offset),
                    len,
                    self.scenario.fs,
                ))),
                SignalConfig::Wav { path } => {
                    let path = match &self.base_dir {
                        Some(base) if path.is_relative() => base.join(path),
                        _ => path.clone(),
                    };
                    let x = wav::read_mono(&path, self.scenario.fs)?;
                    if x.len() < len {
                        return Err(Error::Data(format!(
                            "{}: {} samples, the experiment needs {len}",
                            path.display(),
                            x.len()
                        )));
                    }
                    Ok(Arc::from(x))
                }
            })
            .collect()
    }

    /// Attaches signals to the room as positioned sources.
    pub fn scenario_with(&self, signals: &[Arc<[f64]>]) -> Result<RoomScenario> {
        let mut room = self.room()?;
        room.sources = self
            .scenario
            .sources
            .iter()
            .zip(signals)
            .map(|(s, sig)| SourceSpec {
                angle_deg: s.angle_deg,
                distance: s.distance,
                signal: sig.clone(),
                power_scale: s.power_scale,
            })
            .collect();
        Ok(room)
    }
}
