//! Experiment orchestration: configuration, the adaptation loop, spacing
//! sweeps and their file outputs.

mod config;
mod experiment;
mod output;

pub use config::{ExperimentConfig, ScenarioConfig, SignalConfig, SourceConfig};
pub use experiment::{
    run_adaptation_experiment, run_spacing_sweep, ExperimentResult, IterationRecord, SweepRow,
    TraceRow,
};
pub use output::{
    dump_rirs, emit_plot_data, trace_line, write_final_states, write_iterations_csv, write_output_wav,
    write_sweep_csv, write_trace_csv, RirReport, ITERATION_HEADER, MSC_PLOT_HEADER,
    SIR_PLOT_HEADER, SPACING_PLOT_HEADER, SWEEP_HEADER, TRACE_HEADER,
};
