use serde::{Deserialize, Serialize};

use crate::dsp::energy;

/// Desired source index for each of the two outputs.
pub type Assignment = [usize; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirReport {
    /// dB per output; `+inf` without interference, `-inf` without the desired
    /// source.
    pub sir_per_output: [f64; 2],
    pub sir_mean: f64,
}

fn ratio_db(desired: f64, interference: f64) -> f64 {
    if interference == 0.0 {
        f64::INFINITY
    } else if desired == 0.0 {
        f64::NEG_INFINITY
    } else {
        10.0 * (desired / interference).log10()
    }
}

/// Segment-level signal-to-interference ratio from oracle components indexed
/// `[output][source]`.
pub fn sir<T: AsRef<[f64]>>(components: &[[T; 2]; 2], assignment: Assignment) -> SirReport {
    let mut per = [0.0; 2];
    for (o, comps) in components.iter().enumerate() {
        let d = assignment[o];
        per[o] = ratio_db(energy(comps[d].as_ref()), energy(comps[1 - d].as_ref()));
    }
    SirReport {
        sir_per_output: per,
        sir_mean: 0.5 * (per[0] + per[1]),
    }
}

/// Each output is credited with the source that dominates it. If both outputs
/// are dominated by the same source, the permutation with the larger mean SIR
/// wins; ties resolve to the identity.
pub fn default_assignment<T: AsRef<[f64]>>(components: &[[T; 2]; 2]) -> Assignment {
    let e = [0, 1].map(|o| {
        let c = &components[o];
        [energy(c[0].as_ref()), energy(c[1].as_ref())]
    });
    let claim = |o: usize| -> usize {
        if e[o][1 - o] > e[o][o] {
            1 - o
        } else {
            o
        }
    };
    let (c0, c1) = (claim(0), claim(1));
    if c0 != c1 {
        return [c0, c1];
    }
    let identity = sir(components, [0, 1]).sir_mean;
    let swapped = sir(components, [1, 0]).sir_mean;
    if swapped > identity {
        [1, 0]
    } else {
        [0, 1]
    }
}
