//! Resonant probe atom: Rabi oscillations in the field's photon statistics.
//!
//! An atom entering in `|g>` with a resonant field in state `sum c_n |n>` is
//! found in `|g>` after time `t` with probability
//! `sum_n p(n) cos^2(g t sqrt(n))`. The spread of `sqrt(n)` collapses the
//! oscillation; the discreteness of `n` brings it back. Compass states only
//! populate `n = 4p`, cat states `n = 2p`, so their revivals come earlier.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::states::{photon_distribution, CoherentSuperposition};
use crate::wigner::{compass_norm_sqr, NORMALIZATION_TOLERANCE};
use crate::{Error, Result, C64};

/// Moving-RMS window as a fraction of the trace length.
pub const ENVELOPE_WINDOW_FRACTION: f64 = 0.05;
/// A revival peak must rise above the collapse floor by this fraction of
/// the initial envelope.
pub const REVIVAL_MIN_PROMINENCE: f64 = 0.1;

fn checked_distribution(field: &CoherentSuperposition) -> Result<Vec<f64>> {
    let norm_sqr = field.norm_sqr();
    if (norm_sqr - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr });
    }
    let mut p = photon_distribution(field, field.default_cutoff())?;
    // renormalize away the (tolerated) truncation loss
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(p)
}

fn check_times(g: f64, t: f64) -> Result<()> {
    if !(g >= 0.0 && t >= 0.0 && g.is_finite() && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "coupling and time must be finite and >= 0 (g={g}, t={t})"
        )));
    }
    Ok(())
}

/// `(P_g->g, P_g->e)` for an atom entering in `|g>`.
pub fn resonant_detection_probs(
    field: &CoherentSuperposition,
    g: f64,
    t: f64,
) -> Result<(f64, f64)> {
    check_times(g, t)?;
    Ok(probs_from_distribution(
        &checked_distribution(field)?,
        g * t,
        0,
    ))
}

/// `(P_e->e, P_e->g)` for an atom entering in `|e>`, which couples `|e,n>` to `|g,n+1>`.
pub fn resonant_detection_probs_excited(
    field: &CoherentSuperposition,
    g: f64,
    t: f64,
) -> Result<(f64, f64)> {
    check_times(g, t)?;
    Ok(probs_from_distribution(
        &checked_distribution(field)?,
        g * t,
        1,
    ))
}

fn probs_from_distribution(p: &[f64], gt: f64, shift: usize) -> (f64, f64) {
    let mut stay = 0.0;
    let mut flip = 0.0;
    for (n, &pn) in p.iter().enumerate() {
        let s = (gt * ((n + shift) as f64).sqrt()).sin();
        let s2 = s * s;
        stay += pn * (1.0 - s2);
        flip += pn * s2;
    }
    (stay, flip)
}

/// Compass-specific sums over `n = 4p`, with
/// `p(4p) = 16 |N|^2 e^{-|a|^2} |a|^{8p} / (4p)!` and `cos(2 g t sqrt(p))`.
pub fn compass_detection_probs(alpha: C64, g: f64, t: f64) -> Result<(f64, f64)> {
    check_times(g, t)?;
    let r2 = alpha.norm_sqr();
    let n2 = compass_norm_sqr(alpha);
    let pmax = crate::default_cutoff(alpha.norm()) / 4 + 1;
    let mut stay = 0.0;
    let mut flip = 0.0;
    let mut ln_fact = 0.0; // ln((4p)!)
    for p in 0..=pmax {
        if p > 0 {
            for k in (4 * p - 3)..=(4 * p) {
                ln_fact += (k as f64).ln();
            }
        }
        let weight = if r2 == 0.0 {
            if p == 0 {
                16.0 * n2
            } else {
                0.0
            }
        } else {
            16.0 * n2 * (-r2 + 4.0 * p as f64 * r2.ln() - ln_fact).exp()
        };
        let cos = (2.0 * g * t * (p as f64).sqrt()).cos();
        stay += weight * cos * cos;
        flip += weight * (1.0 - cos * cos);
    }
    Ok((stay, flip))
}

/// `P_g->g` sampled uniformly on `[0, t_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevivalTrace {
    pub g: f64,
    pub t_max: f64,
    pub times: Vec<f64>,
    pub p_gg: Vec<f64>,
}

impl RevivalTrace {
    /// A trace from precomputed samples, assumed uniform in time.
    pub fn from_samples(g: f64, times: Vec<f64>, p_gg: Vec<f64>) -> Result<Self> {
        if times.len() != p_gg.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: p_gg.len(),
            });
        }
        if times.len() < 2 {
            return Err(Error::InvalidParameter(
                "a trace needs at least 2 samples".into(),
            ));
        }
        let t_max = times[times.len() - 1];
        Ok(Self {
            g,
            t_max,
            times,
            p_gg,
        })
    }

    pub fn p_ge(&self) -> Vec<f64> {
        self.p_gg.iter().map(|p| 1.0 - p).collect()
    }
}

pub fn revival_trace(
    field: &CoherentSuperposition,
    g: f64,
    t_max: f64,
    samples: usize,
) -> Result<RevivalTrace> {
    if samples < 2 {
        return Err(Error::InvalidParameter(format!(
            "revival trace needs >= 2 samples, got {samples}"
        )));
    }
    check_times(g, t_max)?;
    let p = checked_distribution(field)?;
    let step = t_max / (samples - 1) as f64;
    let times: Vec<f64> = (0..samples).map(|i| i as f64 * step).collect();
    let p_gg = times
        .par_iter()
        .map(|&t| probs_from_distribution(&p, g * t, 0).0)
        .collect();
    Ok(RevivalTrace {
        g,
        t_max,
        times,
        p_gg,
    })
}

/// Centered moving RMS of `P - mean(P)`, window [`ENVELOPE_WINDOW_FRACTION`] of `t_max`.
pub fn envelope(trace: &RevivalTrace) -> Vec<f64> {
    let n = trace.p_gg.len();
    let mean = trace.p_gg.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = trace.p_gg.iter().map(|p| (p - mean) * (p - mean)).collect();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + dev[i];
    }
    let half = ((ENVELOPE_WINDOW_FRACTION * (n - 1) as f64) / 2.0)
        .round()
        .max(1.0) as usize;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            ((prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64).sqrt()
        })
        .collect()
}

/// Time of the first envelope maximum after the initial collapse.
///
/// The collapse is the first local minimum of the envelope; the revival is
/// the highest point of the first excursion that rises more than
/// [`REVIVAL_MIN_PROMINENCE`] (relative to the starting envelope) above the
/// running minimum.
pub fn revival_time_estimate(trace: &RevivalTrace) -> Result<f64> {
    let env = envelope(trace);
    let n = env.len();
    if n < 3 {
        return Err(Error::NoRevivalFound);
    }
    let scale = env[0];
    if !(scale > 0.0) {
        return Err(Error::NoRevivalFound);
    }
    let threshold = REVIVAL_MIN_PROMINENCE * scale;
    // walk down into the collapse
    let mut i = 1;
    while i < n && env[i] <= env[i - 1] {
        i += 1;
    }
    let mut floor = env[i - 1];
    let mut peak: Option<usize> = None;
    while i < n {
        match peak {
            None => {
                if env[i] < floor {
                    floor = env[i];
                } else if env[i] - floor > threshold {
                    peak = Some(i);
                }
            }
            Some(p) => {
                if env[i] > env[p] {
                    peak = Some(i);
                } else if env[p] - env[i] > threshold {
                    return Ok(trace.times[p]);
                }
            }
        }
        i += 1;
    }
    // a peak that rose but never came back down is not resolved
    Err(Error::NoRevivalFound)
}

/// Revival times of compass, cat and coherent states of the same `|alpha|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevivalComparison {
    pub alpha: f64,
    pub compass: f64,
    pub cat: f64,
    pub coherent: f64,
}

impl RevivalComparison {
    pub fn ordered(&self) -> bool {
        self.compass < self.cat && self.cat < self.coherent
    }
}

/// Default trace length: 1.5 coherent-state revival periods, `3 pi |alpha| / g`.
pub fn default_t_max(alpha_magnitude: f64, g: f64) -> f64 {
    3.0 * PI * alpha_magnitude / g
}

/// The three probe states at a common amplitude `alpha` on the real axis.
pub fn probe_states(alpha_magnitude: f64) -> [(&'static str, CoherentSuperposition); 3] {
    let a = C64::new(alpha_magnitude, 0.0);
    [
        ("compass", CoherentSuperposition::compass(a)),
        ("cat", CoherentSuperposition::cat(a)),
        ("coherent", CoherentSuperposition::coherent(a)),
    ]
}

pub fn compare_revivals(alpha_magnitude: f64, g: f64, samples: usize) -> Result<RevivalComparison> {
    let t_max = default_t_max(alpha_magnitude, g);
    let mut times = [0.0; 3];
    for (slot, (_, s)) in times.iter_mut().zip(probe_states(alpha_magnitude)) {
        *slot = revival_time_estimate(&revival_trace(&s, g, t_max, samples)?)?;
    }
    Ok(RevivalComparison {
        alpha: alpha_magnitude,
        compass: times[0],
        cat: times[1],
        coherent: times[2],
    })
}
