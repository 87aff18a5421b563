use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::acoustic::{generate_rir_set, synthesize_with_rirs, ArrayGeometry, MicSignals};
use crate::adapt::{AdaptationState, StepEvent};
use crate::bss::{filter_range, BssState, DemixingFilters};
use crate::error::{Error, Result};
use crate::metrics::{default_assignment, sir, CoherenceEstimator, SirReport};

/// One processed block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// End of the block, seconds from the start of the experiment.
    pub time: f64,
    pub j: usize,
    /// Block index within the geometry iteration.
    pub block: usize,
    pub d1: f64,
    pub d2: f64,
    pub msc1: f64,
    pub msc2: f64,
    pub sir_mean1: f64,
    pub sir_mean2: f64,
    pub sir_mean_out: f64,
    /// 1 or 2.
    pub selected_output: usize,
}

/// Summary of one geometry iteration, taken with the filters reached at the
/// end of its segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub j: usize,
    pub time: f64,
    pub d1: f64,
    pub d2: f64,
    pub a1: u32,
    pub a2: u32,
    pub f1: f64,
    pub f2: f64,
    /// Segment-level mean SIR of each sub-array's final filters.
    pub sir_mean1: f64,
    pub sir_mean2: f64,
    pub sir_mean_out: f64,
    /// 1 or 2.
    pub selected_output: usize,
    /// Spacing update applied after this iteration.
    pub event: StepEvent,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub trace: Vec<TraceRow>,
    pub iterations: Vec<IterationRecord>,
    /// Two output channels of the selected sub-array, block by block.
    pub output_audio: [Vec<f64>; 2],
    pub final_state: AdaptationState,
    /// Separation state of each sub-array at the end of the run.
    pub final_bss: [BssState; 2],
    pub final_estimators: [CoherenceEstimator; 2],
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub spacing: f64,
    pub msc: f64,
    pub sir_mean: f64,
    /// Mean SIR of the unprocessed microphone pair.
    pub input_sir_mean: f64,
}

/// Signals of one sub-array over one segment, with leading context.
struct SegmentSignals {
    mix: [Vec<f64>; 2],
    /// Indexed `[source][channel]`.
    components: Vec<[Vec<f64>; 2]>,
    /// Samples of context before the first processed sample.
    offset: usize,
}

impl SegmentSignals {
    fn from_mics(mics: &MicSignals, pair: [usize; 2], offset: usize) -> Self {
        Self {
            mix: [mics.total[pair[0]].clone(), mics.total[pair[1]].clone()],
            components: mics
                .components
                .iter()
                .map(|c| [c[pair[0]].clone(), c[pair[1]].clone()])
                .collect(),
            offset,
        }
    }

    fn block(&self, b: usize, len: usize) -> std::ops::Range<usize> {
        self.offset + b * len..self.offset + (b + 1) * len
    }

    /// Filter outputs and per-source output images `[output][source]` over
    /// `range`.
    fn evaluate(&self, filters: &DemixingFilters, range: std::ops::Range<usize>) -> ([Vec<f64>; 2], [[Vec<f64>; 2]; 2]) {
        let y = filter_range(filters, [&self.mix[0], &self.mix[1]], range.start, range.end);
        let per_source: Vec<[Vec<f64>; 2]> = self
            .components
            .iter()
            .map(|c| filter_range(filters, [&c[0], &c[1]], range.start, range.end))
            .collect();
        let [s0, s1]: [[Vec<f64>; 2]; 2] = per_source
            .try_into()
            .expect("two sources are validated up front");
        let [s0o0, s0o1] = s0;
        let [s1o0, s1o1] = s1;
        (y, [[s0o0, s1o0], [s0o1, s1o1]])
    }
}

fn sir_of(comps: &[[Vec<f64>; 2]; 2]) -> SirReport {
    sir(comps, default_assignment(comps))
}

/// Source material plus the synthesis recipe shared by experiments and
/// sweeps.
struct Scene<'a> {
    cfg: &'a ExperimentConfig,
    material: Vec<Arc<[f64]>>,
    /// Leading context in samples, covers the room response and the filter
    /// lookback.
    context: usize,
    /// Trailing samples for the filters' lookahead.
    lookahead: usize,
}

impl<'a> Scene<'a> {
    fn new(cfg: &'a ExperimentConfig, segments: usize) -> Result<Self> {
        let room = cfg.room()?;
        let context = room.rir_length().max(cfg.bss.filter_length);
        let lookahead = cfg.bss.filter_length / 2 + 1;
        let needed = segments * cfg.segment_samples() + lookahead;
        let raw = cfg.source_material(needed)?;
        let material = raw
            .into_iter()
            .map(|x| {
                let mut padded = vec![0.0; context];
                padded.extend_from_slice(&x[..needed]);
                Arc::from(padded)
            })
            .collect();
        Ok(Self {
            cfg,
            material,
            context,
            lookahead,
        })
    }

    /// Microphone signals for segment `index` with geometry `geometry`,
    /// cropped to `[context, segment, lookahead]`.
    fn synthesize(&self, geometry: &ArrayGeometry, index: usize) -> Result<MicSignals> {
        let seg = self.cfg.segment_samples();
        let start = index * seg;
        let end = start + self.context + seg + self.lookahead;
        let slices: Vec<Arc<[f64]>> = self
            .material
            .iter()
            .map(|m| Arc::from(&m[start..end]))
            .collect();
        let scenario = self.cfg.scenario_with(&slices)?;
        for s in &scenario.sources {
            scenario.check_inside(scenario.source_position(s, geometry), "source")?;
        }
        let rirs = generate_rir_set(&scenario, geometry)?;
        let mut mics = synthesize_with_rirs(&scenario, &rirs)?;
        let keep = end - start;
        for ch in mics.total.iter_mut() {
            ch.truncate(keep);
        }
        for src in mics.components.iter_mut() {
            for ch in src.iter_mut() {
                ch.truncate(keep);
            }
        }
        Ok(mics)
    }
}

struct SubArrayPipeline {
    bss: BssState,
    estimator: CoherenceEstimator,
}

impl SubArrayPipeline {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(Self {
            bss: BssState::new(cfg.bss.clone())?,
            estimator: CoherenceEstimator::new(cfg.welch.clone())?,
        })
    }

    /// Filters block `b` with the current state, then adapts on it. Returns
    /// (measure, block SIR, block outputs) of the filtering pass, so the
    /// measure never scores a block the filters were fitted to.
    fn process_block(&mut self, sig: &SegmentSignals, b: usize) -> Result<(f64, SirReport, [Vec<f64>; 2])> {
        let r = sig.block(b, self.bss.config().block_length);
        let filters = self.bss.demixing_filters();
        let (y, comps) = sig.evaluate(&filters, r.clone());
        self.estimator.update(&y[0], &y[1])?;
        let msc = self.estimator.weighted_msc()?.value();
        self.bss.adapt_block([&sig.mix[0][r.clone()], &sig.mix[1][r]])?;
        Ok((msc, sir_of(&comps), y))
    }

    /// Weighted coherence of the final filters' output over the segment,
    /// accumulated block by block in a fresh estimator.
    fn segment_msc(&self, sig: &SegmentSignals, blocks: usize) -> Result<f64> {
        let bl = self.bss.config().block_length;
        let filters = self.bss.demixing_filters();
        let mut est = CoherenceEstimator::new(self.estimator.config().clone())?;
        for b in 0..blocks {
            let (y, _) = sig.evaluate(&filters, sig.block(b, bl));
            est.update(&y[0], &y[1])?;
        }
        Ok(est.weighted_msc()?.value())
    }

    fn segment_sir(&self, sig: &SegmentSignals, blocks: usize) -> SirReport {
        let bl = self.bss.config().block_length;
        let range = sig.offset..sig.offset + blocks * bl;
        let (_, comps) = sig.evaluate(&self.bss.demixing_filters(), range);
        sir_of(&comps)
    }
}

/// Full adaptation loop: per geometry iteration, synthesize a fresh segment,
/// adapt both sub-arrays block by block with per-block output selection, then
/// update the spacings from the coherence of each sub-array's final filters
/// over the segment.
pub fn run_adaptation_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let iterations = cfg.num_iterations();
    let blocks = cfg.blocks_per_segment();
    let bl = cfg.block_length();
    let fs = cfg.scenario.fs;
    let scene = Scene::new(cfg, iterations)?;

    let [d1, d2] = cfg.initial_spacings;
    let (mut state, swapped) = AdaptationState::new(d1, d2, &cfg.adapt)?;
    let mut warnings = Vec::new();
    if swapped {
        warnings.push(format!(
            "initial spacings ({d1}, {d2}) are not increasing; sub-array labels swapped"
        ));
    }

    let mut pipes = [SubArrayPipeline::new(cfg)?, SubArrayPipeline::new(cfg)?];
    let mut trace = Vec::with_capacity(iterations * blocks);
    let mut records = Vec::with_capacity(iterations);
    let mut audio: [Vec<f64>; 2] = [Vec::new(), Vec::new()];

    for it in 0..iterations {
        let geometry = cfg.geometry(state.d[0], state.d[1]);
        let mics = scene
            .synthesize(&geometry, it)
            .map_err(|e| e.at_iteration(it))?;
        let sigs = ArrayGeometry::SUB_ARRAY_MICS
            .map(|pair| SegmentSignals::from_mics(&mics, pair, scene.context));

        let mut msc = [0.0; 2];
        for b in 0..blocks {
            let mut sirs = [0.0; 2];
            let mut outs: [[Vec<f64>; 2]; 2] = Default::default();
            for i in 0..2 {
                let (m, s, y) = pipes[i]
                    .process_block(&sigs[i], b)
                    .map_err(|e| e.at_iteration(it))?;
                msc[i] = m;
                sirs[i] = s.sir_mean;
                outs[i] = y;
            }
            state.observe_block(msc, &cfg.adapt);
            let sel = state.selected_output;
            let [o0, o1] = std::mem::take(&mut outs[sel]);
            audio[0].extend(o0);
            audio[1].extend(o1);
            trace.push(TraceRow {
                time: ((it * blocks + b + 1) * bl) as f64 / fs,
                j: it,
                block: b,
                d1: state.d[0],
                d2: state.d[1],
                msc1: msc[0],
                msc2: msc[1],
                sir_mean1: sirs[0],
                sir_mean2: sirs[1],
                sir_mean_out: sirs[sel],
                selected_output: sel + 1,
            });
        }

        let seg_sir = [
            pipes[0].segment_sir(&sigs[0], blocks).sir_mean,
            pipes[1].segment_sir(&sigs[1], blocks).sir_mean,
        ];
        let seg_msc = [
            pipes[0].segment_msc(&sigs[0], blocks).map_err(|e| e.at_iteration(it))?,
            pipes[1].segment_msc(&sigs[1], blocks).map_err(|e| e.at_iteration(it))?,
        ];
        let before = state.d;
        let sel = state.selected_output;
        let step = state
            .geometry_step(seg_msc, &cfg.adapt)
            .map_err(|e| e.at_iteration(it))?;
        records.push(IterationRecord {
            j: it,
            time: ((it + 1) * blocks * bl) as f64 / fs,
            d1: before[0],
            d2: before[1],
            a1: step.a[0],
            a2: step.a[1],
            f1: seg_msc[0],
            f2: seg_msc[1],
            sir_mean1: seg_sir[0],
            sir_mean2: seg_sir[1],
            sir_mean_out: seg_sir[sel],
            selected_output: sel + 1,
            event: step.event,
        });

        if cfg.reset_bss_on_spacing_change {
            for i in 0..2 {
                if state.d[i] != before[i] {
                    pipes[i] = SubArrayPipeline::new(cfg)?;
                }
            }
        }
    }

    let [p1, p2] = pipes;
    Ok(ExperimentResult {
        trace,
        iterations: records,
        output_audio: audio,
        final_state: state,
        final_bss: [p1.bss, p2.bss],
        final_estimators: [p1.estimator, p2.estimator],
        warnings,
    })
}

/// Runs sub-array 2 for one segment at each fixed spacing and reports the
/// final coherence measure next to the oracle SIR.
pub fn run_spacing_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    if cfg.sweep.is_empty() {
        return Err(Error::Config("sweep list is empty".into()));
    }
    let scene = Scene::new(cfg, 1)?;
    let blocks = cfg.blocks_per_segment();
    let d1 = cfg.initial_spacings[0];
    cfg.sweep
        .iter()
        .enumerate()
        .map(|(i, &spacing)| {
            let geometry = cfg.geometry(d1, spacing);
            let mics = scene.synthesize(&geometry, 0).map_err(|e| e.at_iteration(i))?;
            let sig = SegmentSignals::from_mics(&mics, ArrayGeometry::SUB_ARRAY_MICS[1], scene.context);
            let mut pipe = SubArrayPipeline::new(cfg)?;
            let input = pipe.segment_sir(&sig, blocks).sir_mean;
            for b in 0..blocks {
                pipe.process_block(&sig, b).map_err(|e| e.at_iteration(i))?;
            }
            let msc = pipe.segment_msc(&sig, blocks).map_err(|e| e.at_iteration(i))?;
            Ok(SweepRow {
                spacing,
                msc,
                sir_mean: pipe.segment_sir(&sig, blocks).sir_mean,
                input_sir_mean: input,
            })
        })
        .collect()
}
