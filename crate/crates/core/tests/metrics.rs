use adaptive_array::metrics::{
    default_assignment, sir, spearman, CoherenceEstimator, Taper, WelchConfig,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex64;

fn white(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn welch(window_length: usize) -> WelchConfig {
    WelchConfig {
        window_length,
        ..WelchConfig::default()
    }
}

/// Length that yields exactly `k` Welch segments.
fn span(cfg: &WelchConfig, k: usize) -> usize {
    cfg.window_length + (k - 1) * cfg.hop()
}

#[test]
fn independent_noise_coherence_bias_matches_one_over_k() {
    let cfg = welch(256);
    let k = 32;
    let n = span(&cfg, k);
    let mut total = 0.0;
    let runs = 40;
    for r in 0..runs {
        let mut est = CoherenceEstimator::new(cfg.clone()).unwrap();
        est.update(&white(2 * r, n), &white(2 * r + 1, n)).unwrap();
        assert_eq!(est.segments_seen, k);
        let c = est.bin_coherence();
        // DC and Nyquist are real-valued and biased differently
        total += c[1..c.len() - 1].iter().sum::<f64>() / (c.len() - 2) as f64;
    }
    let mean = total / runs as f64;
    let expected = 1.0 / k as f64;
    assert!(
        mean > 0.5 * expected && mean < 2.0 * expected,
        "mean coherence {mean}, 1/K = {expected}"
    );
}

#[test]
fn zero_block_decays_spectra() {
    let cfg = WelchConfig {
        averaging_constant: 0.25,
        ..welch(128)
    };
    let mut est = CoherenceEstimator::new(cfg).unwrap();
    let x = white(5, 1024);
    est.update(&x, &x).unwrap();
    let before = est.s11.clone();
    est.update(&[0.0; 1024], &[0.0; 1024]).unwrap();
    for (a, b) in est.s11.iter().zip(&before) {
        assert!((a - 0.75 * b).abs() <= 1e-12 * b.max(1.0));
    }
}

#[test]
fn rectangular_taper_is_supported() {
    let cfg = WelchConfig {
        window: Taper::Rectangular,
        ..welch(64)
    };
    let mut est = CoherenceEstimator::new(cfg).unwrap();
    let x = white(8, 640);
    est.update(&x, &x).unwrap();
    assert!(est.weighted_msc().unwrap().value() > 0.99);
}

#[test]
fn estimator_dump_has_one_row_per_bin() {
    let mut est = CoherenceEstimator::new(welch(64)).unwrap();
    est.update(&white(1, 256), &white(2, 256)).unwrap();
    let mut out = Vec::new();
    est.write_csv(&mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("bin,s11,s22,re_s12,im_s12"));
    assert_eq!(lines.count(), est.num_bins());
}

/// Spearman correlation by the textbook formula on distinct values.
fn spearman_distinct(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| v.iter().filter(|b| *b < a).count() as f64)
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn distinct(v: &[f64]) -> bool {
    v.iter()
        .enumerate()
        .all(|(i, a)| v[i + 1..].iter().all(|b| a != b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn weighted_msc_is_a_fraction(
        bins in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0, 0.0f64..1.0, -3.2f64..3.2), 2..64)
    ) {
        let n = bins.len();
        let wl = 2 * (n - 1);
        let mut est = CoherenceEstimator::new(welch(wl)).unwrap();
        est.update(&white(1, wl), &white(2, wl)).unwrap();
        // Any state satisfying Cauchy-Schwarz per bin.
        for (k, (p1, p2, rho, phase)) in bins.iter().enumerate() {
            est.s11[k] = *p1;
            est.s22[k] = *p2;
            est.s12[k] = Complex64::from_polar(rho * (p1 * p2).sqrt(), *phase);
        }
        let any_power = bins.iter().any(|b| b.0 * b.1 > 0.0);
        match est.weighted_msc() {
            Ok(v) => prop_assert!((0.0..=1.0).contains(&v.value())),
            Err(_) => prop_assert!(!any_power),
        }
        // decaying the state keeps Cauchy-Schwarz
        est.update(&vec![0.0; wl], &vec![0.0; wl]).unwrap();
        for k in 0..n {
            prop_assert!(est.s12[k].norm_sqr() <= est.s11[k] * est.s22[k] + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn common_scaling_leaves_msc_unchanged(seed in 0u64..1000, gain in 0.01f64..100.0) {
        let cfg = welch(128);
        let a = white(seed, 1024);
        let b: Vec<f64> = white(seed + 1, 1024).iter().zip(&a).map(|(x, y)| x + 0.5 * y).collect();
        let mut e1 = CoherenceEstimator::new(cfg.clone()).unwrap();
        e1.update(&a, &b).unwrap();
        let sa: Vec<f64> = a.iter().map(|v| gain * v).collect();
        let sb: Vec<f64> = b.iter().map(|v| gain * v).collect();
        let mut e2 = CoherenceEstimator::new(cfg).unwrap();
        e2.update(&sa, &sb).unwrap();
        let (m1, m2) = (e1.weighted_msc().unwrap().value(), e2.weighted_msc().unwrap().value());
        prop_assert!((m1 - m2).abs() < 1e-9);

        // one channel scaled: per-bin coherence unchanged
        let mut e3 = CoherenceEstimator::new(welch(128)).unwrap();
        e3.update(&sa, &b).unwrap();
        for (p, q) in e1.bin_coherence().iter().zip(e3.bin_coherence()) {
            prop_assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn sir_scaling_laws(
        seed in 0u64..1000,
        common in 0.01f64..100.0,
        desired in 0.01f64..100.0,
    ) {
        let c = [[white(seed, 64), white(seed + 1, 64)], [white(seed + 2, 64), white(seed + 3, 64)]];
        let asg = [0, 1];
        let base = sir(&c, asg);
        let scaled = c.clone().map(|row| row.map(|v| v.iter().map(|x| common * x).collect::<Vec<f64>>()));
        prop_assert!((sir(&scaled, asg).sir_mean - base.sir_mean).abs() < 1e-9);
        let mut boosted = c.clone();
        for o in 0..2 {
            boosted[o][asg[o]].iter_mut().for_each(|x| *x *= desired);
        }
        let shift = 20.0 * desired.log10();
        prop_assert!((sir(&boosted, asg).sir_mean - base.sir_mean - shift).abs() < 1e-9);
    }

    #[test]
    fn default_assignment_never_loses_to_the_other_permutation(
        e in prop::array::uniform4(0.01f64..10.0),
    ) {
        let c = [[vec![e[0]], vec![e[1]]], [vec![e[2]], vec![e[3]]]];
        let chosen = sir(&c, default_assignment(&c));
        let identity = sir(&c, [0, 1]);
        let swapped = sir(&c, [1, 0]);
        let dominant = |o: usize, s: usize| c[o][s][0] >= c[o][1 - s][0];
        if dominant(0, 0) && dominant(1, 1) {
            prop_assert_eq!(default_assignment(&c), [0, 1]);
        } else if !dominant(0, 0) && !dominant(1, 1) {
            prop_assert_eq!(default_assignment(&c), [1, 0]);
        } else {
            prop_assert!(chosen.sir_mean >= identity.sir_mean.max(swapped.sir_mean) - 1e-12);
        }
    }

    #[test]
    fn spearman_matches_textbook_formula(
        x in prop::collection::vec(-100.0f64..100.0, 3..12),
        seed in 0u64..1000,
    ) {
        prop_assume!(distinct(&x));
        let y: Vec<f64> = white(seed, x.len());
        prop_assume!(distinct(&y));
        let got = spearman(&x, &y).unwrap();
        prop_assert!((got - spearman_distinct(&x, &y)).abs() < 1e-9);
    }
}
