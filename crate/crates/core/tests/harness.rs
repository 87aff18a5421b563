use adaptive_array::adapt::StepEvent;
use adaptive_array::harness::{
    emit_plot_data, run_adaptation_experiment, run_spacing_sweep, write_sweep_csv,
    write_trace_csv, ExperimentConfig, MSC_PLOT_HEADER, SIR_PLOT_HEADER, SPACING_PLOT_HEADER,
    SWEEP_HEADER, TRACE_HEADER,
};
use adaptive_array::Error;

/// Reference scenario with short segments so a run takes a fraction of a
/// second.
fn short(segment_seconds: f64, segments: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.adapt.segment_seconds = segment_seconds;
    cfg.total_duration = segment_seconds * segments as f64;
    cfg
}

fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn one_segment_is_one_geometry_iteration() {
    let cfg = short(3.0, 1);
    let r = run_adaptation_experiment(&cfg).unwrap();
    assert_eq!(r.iterations.len(), 1);
    assert_eq!(r.trace.len(), cfg.blocks_per_segment());
    assert!(r.trace.iter().all(|row| row.j == 0));
    assert_eq!(r.final_state.j, 1);
    // one of the two spacings moved, the other did not
    let moved = [0, 1].map(|i| r.final_state.d[i] != cfg.initial_spacings[i]);
    assert_eq!(moved.iter().filter(|m| **m).count(), 1);
    assert_eq!(r.output_audio[0].len(), cfg.segment_samples());
}

#[test]
fn trace_rows_are_consistent() {
    let cfg = short(2.0, 3);
    let r = run_adaptation_experiment(&cfg).unwrap();
    let blocks = cfg.blocks_per_segment();
    assert_eq!(r.trace.len(), 3 * blocks);
    for row in &r.trace {
        let own = if row.selected_output == 1 {
            row.sir_mean1
        } else {
            row.sir_mean2
        };
        assert_eq!(row.sir_mean_out, own);
        assert!((0.0..=1.0).contains(&row.msc1) && (0.0..=1.0).contains(&row.msc2));
    }
    // spacings only move between iterations
    for w in r.trace.windows(2) {
        if w[0].j == w[1].j {
            assert_eq!((w[0].d1, w[0].d2), (w[1].d1, w[1].d2));
        }
        assert!(w[1].time > w[0].time);
    }
    for (rec, next) in r.iterations.iter().zip(r.iterations.iter().skip(1)) {
        let first = r.trace.iter().find(|t| t.j == next.j).unwrap();
        assert_eq!((first.d1, first.d2), (next.d1, next.d2));
        assert_ne!(rec.event, StepEvent::Held, "converged within three steps");
    }
    for rec in &r.iterations {
        let own = [rec.sir_mean1, rec.sir_mean2][rec.selected_output - 1];
        assert_eq!(rec.sir_mean_out, own);
    }
}

#[test]
fn trace_csv_is_deterministic_and_has_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short(2.0, 2);
    let a = run_adaptation_experiment(&cfg).unwrap();
    let b = run_adaptation_experiment(&cfg).unwrap();
    write_trace_csv(dir.path().join("a.csv"), &a.trace, true).unwrap();
    write_trace_csv(dir.path().join("b.csv"), &b.trace, true).unwrap();
    let (ta, tb) = (read(&dir.path().join("a.csv")), read(&dir.path().join("b.csv")));
    assert_eq!(ta, tb);
    assert_eq!(ta.lines().next(), Some(TRACE_HEADER));
    assert_eq!(ta.lines().count(), a.trace.len() + 1);

    // per-iteration trace keeps the last block of each iteration
    write_trace_csv(dir.path().join("c.csv"), &a.trace, false).unwrap();
    let tc = read(&dir.path().join("c.csv"));
    assert_eq!(tc.lines().count(), 1 + 2);
    let blocks = cfg.blocks_per_segment();
    assert!(tc.lines().nth(1).unwrap().contains(&format!(",0,{},", blocks - 1)));

    let mut other = cfg.clone();
    other.seed += 1;
    let c = run_adaptation_experiment(&other).unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn plot_data_has_one_row_per_trace_row() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_adaptation_experiment(&short(2.0, 1)).unwrap();
    let paths = emit_plot_data(&r.trace, dir.path()).unwrap();
    let headers = [MSC_PLOT_HEADER, SIR_PLOT_HEADER, SPACING_PLOT_HEADER];
    for (p, h) in paths.iter().zip(headers) {
        let text = read(p);
        assert_eq!(text.lines().next(), Some(h));
        assert_eq!(text.lines().count(), r.trace.len() + 1);
    }
    assert!(matches!(emit_plot_data(&[], dir.path()), Err(Error::Data(_))));
}

#[test]
fn wide_anechoic_sources_separate_within_one_segment() {
    let mut cfg = short(5.0, 1);
    cfg.scenario.t60 = 0.0;
    cfg.scenario.sources[0].angle_deg = 60.0;
    cfg.scenario.sources[1].angle_deg = -60.0;
    let r = run_adaptation_experiment(&cfg).unwrap();
    let rec = &r.iterations[0];
    assert!(rec.f1 < 0.2 && rec.f2 < 0.2, "{rec:?}");
    assert!(rec.sir_mean1 > 10.0 && rec.sir_mean2 > 10.0, "{rec:?}");
}

#[test]
fn sweep_rows_follow_the_spacing_list() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = short(2.0, 1);
    cfg.sweep = vec![0.12];
    let rows = run_spacing_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].spacing, 0.12);
    assert!(rows[0].sir_mean > rows[0].input_sir_mean);

    // repeated spacings are independent runs on the same material
    cfg.sweep = vec![0.2, 0.2];
    let rows = run_spacing_sweep(&cfg).unwrap();
    assert_eq!(rows[0], rows[1]);
    let path = dir.path().join("sweep.csv");
    write_sweep_csv(&path, &rows).unwrap();
    let text = read(&path);
    assert_eq!(text.lines().next(), Some(SWEEP_HEADER));
    assert_eq!(text.lines().count(), 3);

    cfg.sweep.clear();
    assert!(matches!(run_spacing_sweep(&cfg), Err(Error::Config(_))));
}

#[test]
fn invalid_configs_are_config_errors() {
    let mut cfg = short(2.0, 1);
    cfg.total_duration = 1.0;
    assert!(run_adaptation_experiment(&cfg).unwrap_err().is_config());
    let mut cfg = short(2.0, 1);
    cfg.scenario.sources.pop();
    assert!(run_adaptation_experiment(&cfg).unwrap_err().is_config());
    assert!(ExperimentConfig::from_json_str("{\"bogus\": 1}").unwrap_err().is_config());
}
