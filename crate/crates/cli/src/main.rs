use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adaptive_array::harness::{
    dump_rirs, emit_plot_data, run_adaptation_experiment, run_spacing_sweep, write_final_states,
    write_iterations_csv, write_output_wav, write_sweep_csv, write_trace_csv, ExperimentConfig,
};
use adaptive_array::metrics::spearman;
use adaptive_array::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adaptive-array", version, about = "Blind microphone spacing adaptation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adaptation loop and write trace, audio and plot data.
    Run(Common),
    /// Evaluate sub-array 2 at each fixed spacing of the config's sweep list.
    Sweep(Common),
    /// Dump the room impulse responses of the initial geometry.
    Rir(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; `{}` selects the reference scenario.
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write one trace row per block instead of one per iteration.
    #[arg(long)]
    trace_every_block: bool,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        // An unreadable config file is a config problem, not a runtime one.
        let mut cfg = ExperimentConfig::from_json_file(&self.config).map_err(|e| match e {
            Error::Io { .. } => Error::Config(e.to_string()),
            e => e,
        })?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        cfg.trace_every_block |= self.trace_every_block;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cfg: &ExperimentConfig) -> Result<(), Error> {
    let out = &cfg.out_dir;
    let result = run_adaptation_experiment(cfg)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    write_trace_csv(out.join("trace.csv"), &result.trace, cfg.trace_every_block)?;
    write_iterations_csv(out.join("iterations.csv"), &result.iterations)?;
    emit_plot_data(&result.trace, out)?;
    write_final_states(&result, out)?;
    write_output_wav(out.join("output.wav"), &result.output_audio, cfg.scenario.fs)?;

    println!("j\td1\td2\tf1\tf2\tsir_out\tselected\tevent");
    for r in &result.iterations {
        println!(
            "{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}\t{:.2}\t{}\t{}",
            r.j,
            r.d1,
            r.d2,
            r.f1,
            r.f2,
            r.sir_mean_out,
            r.selected_output,
            r.event.as_str()
        );
    }
    let s = &result.final_state;
    println!("final spacings: d1 = {:.4} m, d2 = {:.4} m", s.d[0], s.d[1]);
    println!("wrote {}", out.display());
    Ok(())
}

fn sweep(cfg: &ExperimentConfig) -> Result<(), Error> {
    let rows = run_spacing_sweep(cfg)?;
    let path = cfg.out_dir.join("sweep.csv");
    write_sweep_csv(&path, &rows)?;
    println!("spacing\tmsc\tsir_mean\tinput_sir");
    for r in &rows {
        println!(
            "{:.3}\t{:.4}\t{:.2}\t{:.2}",
            r.spacing, r.msc, r.sir_mean, r.input_sir_mean
        );
    }
    let msc: Vec<f64> = rows.iter().map(|r| r.msc).collect();
    let sir: Vec<f64> = rows.iter().map(|r| r.sir_mean).collect();
    if let Some(rho) = spearman(&msc, &sir) {
        println!("spearman(msc, sir_mean) = {rho:.3}");
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn rir(cfg: &ExperimentConfig) -> Result<(), Error> {
    let report = dump_rirs(cfg, &cfg.out_dir)?;
    println!(
        "{} responses of {} samples",
        report.rirs.impulse_responses.len() * 3,
        report.rirs.length
    );
    for (s, per_mic) in report.t60.iter().enumerate() {
        let ms: Vec<String> = per_mic.iter().map(|t| format!("{:.0}", t * 1e3)).collect();
        println!("source {}: measured T60 [ms] = {}", s + 1, ms.join(", "));
    }
    if let Some(rc) = report.critical_distance {
        println!("critical distance: {rc:.3} m");
    }
    println!("wrote {}", Path::new(&cfg.out_dir).display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, action): (&Common, fn(&ExperimentConfig) -> Result<(), Error>) = match &cli.command {
        Command::Run(c) => (c, run),
        Command::Sweep(c) => (c, sweep),
        Command::Rir(c) => (c, rir),
    };
    let outcome = common.load().and_then(|cfg| action(&cfg));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
