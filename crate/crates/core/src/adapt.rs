//! Competitive spacing search over two sub-arrays sharing a center
//! microphone.
//!
//! After each geometry iteration the sub-array with the lower coherence
//! measure is superior and keeps its spacing; the other one is moved to a new
//! competitor spacing that oscillates around the superior spacing with
//! shrinking amplitude. If the superior measure keeps worsening for `t_max`
//! iterations the inferior spacing is doubled to reopen the search. Output
//! selection switches sub-arrays only after `m_max` consecutive blocks in
//! which the other sub-array measured strictly better.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptParams {
    /// Termination threshold on `|d_sup - d_inf|`, meters.
    pub epsilon: f64,
    /// Geometry iterations of worsening that trigger doubling.
    pub t_max: usize,
    /// Consecutive better blocks needed to switch the output.
    pub m_max: usize,
    pub d_min: f64,
    pub d_max: f64,
    /// Seconds of signal per BSS adaptation phase.
    pub segment_seconds: f64,
}

impl Default for AdaptParams {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            t_max: 3,
            m_max: 3,
            d_min: 0.02,
            d_max: 0.6,
            segment_seconds: 10.0,
        }
    }
}

impl AdaptParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config("epsilon must be > 0".into()));
        }
        if self.t_max < 1 || self.m_max < 1 {
            return Err(Error::Config("t_max and m_max must be >= 1".into()));
        }
        if !(self.d_min > 0.0 && self.d_min < self.d_max && self.d_max.is_finite()) {
            return Err(Error::Config(format!(
                "need 0 < d_min < d_max, got {} and {}",
                self.d_min, self.d_max
            )));
        }
        if !(self.segment_seconds > 0.0) {
            return Err(Error::Config("segment_seconds must be > 0".into()));
        }
        Ok(())
    }
}

/// `(1 + (-1)^(a+1) / (a+1)) * d_sup`
pub fn competitor_spacing(d_sup: f64, a: u32) -> f64 {
    let a = a as f64;
    let sign = if (a as u64) % 2 == 1 { 1.0 } else { -1.0 };
    (1.0 + sign / (a + 1.0)) * d_sup
}

/// Smallest `a >= 1` with `d_sup / (a + 1) <= epsilon`.
pub fn a_max(d_sup: f64, epsilon: f64) -> u32 {
    let mut a = ((d_sup / epsilon).ceil() - 1.0).max(1.0) as u32;
    // guard against rounding in the division
    while a > 1 && d_sup / a as f64 <= epsilon {
        a -= 1;
    }
    while d_sup / (a as f64 + 1.0) > epsilon {
        a += 1;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepEvent {
    /// New competitor spacing from the oscillating rule.
    Competitor,
    /// Degradation detected, inferior spacing doubled.
    Doubled,
    /// Search converged, inferior spacing parked at the superior one.
    Held,
    /// The new spacing hit a reach limit.
    Clamped,
}

impl StepEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            StepEvent::Competitor => "competitor",
            StepEvent::Doubled => "doubled",
            StepEvent::Held => "held",
            StepEvent::Clamped => "clamped",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupRecord {
    pub j: usize,
    /// 0 or 1.
    pub sub_array: usize,
    pub d_sup: f64,
    pub f_sup: f64,
}

/// Outcome of one geometry iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub j: usize,
    pub superior: usize,
    pub f: [f64; 2],
    pub spacings_before: [f64; 2],
    pub spacings_after: [f64; 2],
    pub a: [u32; 2],
    pub event: StepEvent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptationState {
    pub j: usize,
    /// Spacings of sub-arrays 1 and 2.
    pub d: [f64; 2],
    /// Competitor counters.
    pub a: [u32; 2],
    /// Iterations since the degradation window was last reset.
    pub t: usize,
    pub superior: Option<usize>,
    pub sup_history: Vec<SupRecord>,
    /// Index into `sup_history` where the current degradation window starts.
    window_start: usize,
    /// Sub-array whose output is the system output, 0 or 1.
    pub selected_output: usize,
    pub switch_streak: usize,
}

impl AdaptationState {
    /// Starts from `(d1, d2)`, swapping them if needed so that `d1 < d2`.
    /// Returns whether a swap happened.
    pub fn new(d1: f64, d2: f64, params: &AdaptParams) -> Result<(Self, bool)> {
        params.validate()?;
        for d in [d1, d2] {
            if !(d >= params.d_min && d <= params.d_max) {
                return Err(Error::Config(format!(
                    "initial spacing {d} outside [{}, {}]",
                    params.d_min, params.d_max
                )));
            }
        }
        let swapped = d1 > d2;
        let d = if swapped { [d2, d1] } else { [d1, d2] };
        Ok((
            Self {
                j: 0,
                d,
                a: [1, 1],
                t: 0,
                superior: None,
                sup_history: Vec::new(),
                window_start: 0,
                selected_output: 0,
                switch_streak: 0,
            },
            swapped,
        ))
    }

    /// One geometry iteration from the converged measures of both sub-arrays.
    pub fn geometry_step(&mut self, f: [f64; 2], params: &AdaptParams) -> Result<StepRecord> {
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Measurement(format!("non-finite measures {f:?}")));
        }
        let before = self.d;
        let sup = if f[0] < f[1] {
            0
        } else if f[1] < f[0] {
            1
        } else {
            self.superior.unwrap_or(0)
        };
        let inf = 1 - sup;
        self.superior = Some(sup);
        self.a[sup] = 1;
        let d_sup = self.d[sup];
        self.sup_history.push(SupRecord {
            j: self.j,
            sub_array: sup,
            d_sup,
            f_sup: f[sup],
        });

        let n = self.sup_history.len() - 1;
        self.t = n - self.window_start;
        let degraded = self.t >= params.t_max && {
            let reference = self.sup_history[n - params.t_max].f_sup;
            self.sup_history[n - params.t_max + 1..=n]
                .iter()
                .all(|r| r.f_sup > reference)
        };

        let (target, mut event) = if degraded {
            self.window_start = n;
            self.t = 0;
            (2.0 * self.d[inf], StepEvent::Doubled)
        } else if self.a[inf] <= a_max(d_sup, params.epsilon) {
            let next = competitor_spacing(d_sup, self.a[inf]);
            self.a[inf] += 1;
            (next, StepEvent::Competitor)
        } else {
            (d_sup, StepEvent::Held)
        };
        let clamped = target.clamp(params.d_min, params.d_max);
        if clamped != target {
            event = StepEvent::Clamped;
        }
        self.d[inf] = clamped;

        let record = StepRecord {
            j: self.j,
            superior: sup,
            f,
            spacings_before: before,
            spacings_after: self.d,
            a: self.a,
            event,
        };
        self.j += 1;
        Ok(record)
    }

    /// Hysteresis on the system output. Returns true if the output switched.
    pub fn select_output(&mut self, f_selected: f64, f_other: f64, params: &AdaptParams) -> bool {
        if f_other < f_selected {
            self.switch_streak += 1;
        } else {
            self.switch_streak = 0;
        }
        if self.switch_streak >= params.m_max {
            self.selected_output = 1 - self.selected_output;
            self.switch_streak = 0;
            true
        } else {
            false
        }
    }

    /// [`AdaptationState::select_output`] with the measures of sub-arrays 1
    /// and 2 in order.
    pub fn observe_block(&mut self, f: [f64; 2], params: &AdaptParams) -> bool {
        let s = self.selected_output;
        self.select_output(f[s], f[1 - s], params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> AdaptParams {
        AdaptParams::default()
    }

    #[test]
    fn competitor_examples() {
        assert!((competitor_spacing(0.20, 1) - 0.30).abs() < 1e-12);
        assert!((competitor_spacing(0.30, 2) - 0.20).abs() < 1e-12);
        let expected = [1.5, 2.0 / 3.0, 1.25, 0.8, 7.0 / 6.0, 6.0 / 7.0, 1.125, 8.0 / 9.0];
        for (a, e) in (1..=8).zip(expected) {
            assert!((competitor_spacing(1.0, a) - e).abs() < 1e-9);
        }
    }

    #[test]
    fn a_max_examples() {
        assert_eq!(a_max(0.20, 0.05), 3);
        assert_eq!(a_max(0.20, 0.2), 1);
        assert_eq!(a_max(0.20, 0.5), 1);
        assert!(a_max(0.20, 1e-6) > 100_000);
        assert_eq!(a_max(0.30, 0.01), 29);
    }

    #[test]
    fn first_iteration_of_reference_run() {
        let (mut s, swapped) = AdaptationState::new(0.15, 0.20, &params()).unwrap();
        assert!(!swapped);
        let r = s.geometry_step([0.3, 0.2], &params()).unwrap();
        assert_eq!(r.superior, 1);
        assert!((s.d[0] - 0.30).abs() < 1e-12);
        assert_eq!(s.d[1], 0.20);
        assert_eq!(s.a, [2, 1]);
        assert_eq!(r.event, StepEvent::Competitor);

        // sub-array 1 now better: d2 moves, d1 stays
        let r = s.geometry_step([0.1, 0.2], &params()).unwrap();
        assert_eq!(r.superior, 0);
        assert!((s.d[0] - 0.30).abs() < 1e-12);
        assert!((s.d[1] - 0.45).abs() < 1e-12);
        assert_eq!(s.j, 2);
    }

    #[test]
    fn tie_keeps_incumbent() {
        let (mut s, _) = AdaptationState::new(0.15, 0.20, &params()).unwrap();
        let r = s.geometry_step([0.2, 0.2], &params()).unwrap();
        assert_eq!(r.superior, 0);
        s.geometry_step([0.3, 0.1], &params()).unwrap();
        let r = s.geometry_step([0.2, 0.2], &params()).unwrap();
        assert_eq!(r.superior, 1);
    }

    #[test]
    fn worsening_superior_doubles_inferior() {
        let p = params();
        let (mut s, _) = AdaptationState::new(0.15, 0.20, &p).unwrap();
        // sub-array 2 always superior, its measure rises every step
        let events: Vec<StepEvent> = [0.10, 0.11, 0.12, 0.13]
            .iter()
            .map(|&f2| s.geometry_step([0.5, f2], &p).unwrap().event)
            .collect();
        assert_eq!(events[..3], [StepEvent::Competitor; 3]);
        assert_eq!(events[3], StepEvent::Doubled);
    }

    #[test]
    fn converged_search_holds_at_superior() {
        let p = AdaptParams {
            epsilon: 0.1,
            ..params()
        };
        let (mut s, _) = AdaptationState::new(0.15, 0.20, &p).unwrap();
        // a_max(0.2, 0.1) = 1: one competitor then hold
        let r = s.geometry_step([0.5, 0.1], &p).unwrap();
        assert_eq!(r.event, StepEvent::Competitor);
        let r = s.geometry_step([0.5, 0.1], &p).unwrap();
        assert_eq!(r.event, StepEvent::Held);
        assert_eq!(s.d[0], s.d[1]);
    }

    #[test]
    fn clamping_to_reach() {
        let p = AdaptParams {
            d_max: 0.25,
            ..params()
        };
        let (mut s, _) = AdaptationState::new(0.15, 0.20, &p).unwrap();
        let r = s.geometry_step([0.5, 0.1], &p).unwrap();
        assert_eq!(r.event, StepEvent::Clamped);
        assert_eq!(s.d[0], 0.25);
    }

    #[test]
    fn non_finite_measure_is_rejected() {
        let (mut s, _) = AdaptationState::new(0.15, 0.20, &params()).unwrap();
        assert!(matches!(
            s.geometry_step([f64::NAN, 0.1], &params()),
            Err(Error::Measurement(_))
        ));
    }

    #[test]
    fn initial_order_is_normalized() {
        let (s, swapped) = AdaptationState::new(0.3, 0.1, &params()).unwrap();
        assert!(swapped);
        assert_eq!(s.d, [0.1, 0.3]);
    }

    #[test]
    fn hysteresis_examples() {
        let p = params();
        let (mut s, _) = AdaptationState::new(0.15, 0.20, &p).unwrap();
        assert!(!s.select_output(0.5, 0.4, &p));
        assert!(!s.select_output(0.5, 0.4, &p));
        assert!(s.select_output(0.5, 0.4, &p));
        assert_eq!(s.selected_output, 1);

        let (mut s, _) = AdaptationState::new(0.15, 0.20, &p).unwrap();
        for (sel, other) in [(0.5, 0.4), (0.5, 0.4), (0.4, 0.5), (0.5, 0.4)] {
            assert!(!s.select_output(sel, other, &p));
        }
        assert_eq!(s.selected_output, 0);

        let (mut s, _) = AdaptationState::new(0.15, 0.20, &p).unwrap();
        for _ in 0..10 {
            assert!(!s.select_output(0.4, 0.4, &p));
        }
    }
}
