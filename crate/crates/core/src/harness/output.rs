//! CSV and WAV artifacts of experiments.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::experiment::{ExperimentResult, IterationRecord, SweepRow, TraceRow};
use crate::acoustic::{critical_distance, estimate_t60, generate_rir_set, wav, RirSet};
use crate::error::{Error, Result};

pub const TRACE_HEADER: &str =
    "time_s,j,block,d1,d2,msc1,msc2,sir_mean1,sir_mean2,sir_mean_out,selected_output";
pub const ITERATION_HEADER: &str =
    "j,time_s,d1,d2,a1,a2,f1,f2,sir_mean1,sir_mean2,sir_mean_out,selected_output,event";
pub const SWEEP_HEADER: &str = "spacing,msc,sir_mean,input_sir_mean";
pub const MSC_PLOT_HEADER: &str = "time_s,msc1,msc2";
pub const SIR_PLOT_HEADER: &str = "time_s,sir_mean1,sir_mean2,sir_mean_out,selected_output";
pub const SPACING_PLOT_HEADER: &str = "time_s,j,d1,d2";

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_lines<I, S>(path: &Path, header: &str, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(out, "{header}").map_err(io)?;
    for l in lines {
        writeln!(out, "{}", l.as_ref()).map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn trace_line(r: &TraceRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.time,
        r.j,
        r.block,
        r.d1,
        r.d2,
        r.msc1,
        r.msc2,
        r.sir_mean1,
        r.sir_mean2,
        r.sir_mean_out,
        r.selected_output
    )
}

/// Trace CSV; with `every_block == false` only the last block of each
/// geometry iteration is kept.
pub fn write_trace_csv(path: impl AsRef<Path>, trace: &[TraceRow], every_block: bool) -> Result<()> {
    let rows = trace.iter().enumerate().filter(|(i, r)| {
        every_block || trace.get(i + 1).is_none_or(|next| next.j != r.j)
    });
    write_lines(path.as_ref(), TRACE_HEADER, rows.map(|(_, r)| trace_line(r)))
}

pub fn write_iterations_csv(path: impl AsRef<Path>, records: &[IterationRecord]) -> Result<()> {
    write_lines(
        path.as_ref(),
        ITERATION_HEADER,
        records.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.j,
                r.time,
                r.d1,
                r.d2,
                r.a1,
                r.a2,
                r.f1,
                r.f2,
                r.sir_mean1,
                r.sir_mean2,
                r.sir_mean_out,
                r.selected_output,
                r.event.as_str()
            )
        }),
    )
}

pub fn write_sweep_csv(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<()> {
    write_lines(
        path.as_ref(),
        SWEEP_HEADER,
        rows.iter()
            .map(|r| format!("{},{},{},{}", r.spacing, r.msc, r.sir_mean, r.input_sir_mean)),
    )
}

/// Three tidy series: coherence over time, SIR over time with the selected
/// output, spacings over time. Returns the written paths.
pub fn emit_plot_data(trace: &[TraceRow], dir: impl AsRef<Path>) -> Result<[PathBuf; 3]> {
    if trace.is_empty() {
        return Err(Error::Data("cannot plot an empty trace".into()));
    }
    let dir = dir.as_ref();
    let paths = [
        dir.join("msc_vs_time.csv"),
        dir.join("sir_vs_time.csv"),
        dir.join("spacing_vs_iteration.csv"),
    ];
    write_lines(
        &paths[0],
        MSC_PLOT_HEADER,
        trace.iter().map(|r| format!("{},{},{}", r.time, r.msc1, r.msc2)),
    )?;
    write_lines(
        &paths[1],
        SIR_PLOT_HEADER,
        trace.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.time, r.sir_mean1, r.sir_mean2, r.sir_mean_out, r.selected_output
            )
        }),
    )?;
    write_lines(
        &paths[2],
        SPACING_PLOT_HEADER,
        trace
            .iter()
            .map(|r| format!("{},{},{},{}", r.time, r.j, r.d1, r.d2)),
    )?;
    Ok(paths)
}

/// Final unmixing spectra (`bss_spectrum{1,2}.csv`) and cross-spectral
/// estimator states (`coherence{1,2}.csv`) of both sub-arrays.
pub fn write_final_states(result: &ExperimentResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut written = Vec::new();
    for i in 0..2 {
        let path = dir.join(format!("bss_spectrum{}.csv", i + 1));
        let mut out = create(&path)?;
        result.final_bss[i]
            .write_spectrum_csv(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(&path, e))?;
        written.push(path);

        let path = dir.join(format!("coherence{}.csv", i + 1));
        let mut out = create(&path)?;
        result.final_estimators[i]
            .write_csv(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn write_output_wav(path: impl AsRef<Path>, audio: &[Vec<f64>; 2], fs: f64) -> Result<()> {
    wav::write_multichannel(path, audio, fs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RirReport {
    pub rirs: RirSet,
    /// Measured reverberation time per (source, microphone).
    pub t60: Vec<Vec<f64>>,
    pub critical_distance: Option<f64>,
}

/// Impulse responses for the initial geometry, written as
/// `rirs.csv` (`sample,s1_m1,...`) and one 3-channel WAV per source.
pub fn dump_rirs(cfg: &ExperimentConfig, dir: impl AsRef<Path>) -> Result<RirReport> {
    cfg.validate()?;
    let dir = dir.as_ref();
    let material: Vec<std::sync::Arc<[f64]>> =
        cfg.scenario.sources.iter().map(|_| std::sync::Arc::from(vec![0.0])).collect();
    let scenario = cfg.scenario_with(&material)?;
    let [d1, d2] = cfg.initial_spacings;
    let rirs = generate_rir_set(&scenario, &cfg.geometry(d1, d2))?;

    let mut header = String::from("sample");
    for s in 0..rirs.impulse_responses.len() {
        for m in 0..3 {
            header.push_str(&format!(",s{}_m{}", s + 1, m + 1));
        }
    }
    write_lines(
        &dir.join("rirs.csv"),
        &header,
        (0..rirs.length).map(|n| {
            let mut line = n.to_string();
            for src in &rirs.impulse_responses {
                for h in src {
                    line.push_str(&format!(",{}", h[n]));
                }
            }
            line
        }),
    )?;
    for (s, src) in rirs.impulse_responses.iter().enumerate() {
        wav::write_multichannel(dir.join(format!("rir_source{}.wav", s + 1)), src, cfg.scenario.fs)?;
    }

    let t60 = if scenario.t60 > 0.0 {
        rirs.impulse_responses
            .iter()
            .map(|src| {
                src.iter()
                    .map(|h| estimate_t60(h, scenario.fs))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(RirReport {
        critical_distance: critical_distance(&scenario).ok(),
        rirs,
        t60,
    })
}
