//! Zero-temperature amplitude damping of coherent superpositions.
//!
//! Under `d rho/dt = -(kappa/2)(a^dag a rho - 2 a rho a^dag + rho a^dag a)` a
//! coherent dyad evolves as
//!
//! ```text
//! |a><b|  ->  <b|a>^(1 - e^{-kappa t}) |a e^{-kappa t/2}><b e^{-kappa t/2}|
//! ```
//!
//! so a superposition of coherent states stays a finite sum of dyads. The
//! number-basis matrix is assembled from that sum; the RK4 integrator in
//! [`crate::numerics`] is the independent check.

use serde::{Deserialize, Serialize};

use crate::numerics::{default_lindblad_step, lindblad_rk4};
use crate::states::{to_fock, CoherentSuperposition, DensityMatrixFock};
use crate::wigner::{negativity_volume, GridSpec, PureWigner};
use crate::{Error, Result, C64};

/// Relative tolerance on `t_c = 1 / kappa`.
pub const LIFETIME_CONSISTENCY_TOLERANCE: f64 = 1e-12;

/// Damping rate, elapsed time and cavity lifetime `t_c = 1/kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    pub kappa: f64,
    pub t: f64,
    pub t_c: f64,
}

impl DecayParams {
    pub fn new(kappa: f64, t: f64) -> Result<Self> {
        let p = Self {
            kappa,
            t,
            t_c: 1.0 / kappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_lifetime(t_c: f64, t: f64) -> Result<Self> {
        let p = Self {
            kappa: 1.0 / t_c,
            t,
            t_c,
        };
        p.validate()?;
        Ok(p)
    }

    /// `kappa = 1`, so `t` is measured in units of the cavity lifetime.
    pub fn scaled(kappa_t: f64) -> Result<Self> {
        Self::new(1.0, kappa_t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa >= 0.0 && self.t >= 0.0 && self.t_c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay parameters need kappa >= 0, t >= 0, t_c > 0 (kappa={}, t={}, t_c={})",
                self.kappa, self.t, self.t_c
            )));
        }
        if !(self.kappa * self.t).is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kappa*t = {} is not finite",
                self.kappa * self.t
            )));
        }
        let mismatch = (self.kappa * self.t_c - 1.0).abs();
        if self.t_c.is_finite() && mismatch > LIFETIME_CONSISTENCY_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "t_c = {} is not 1/kappa = {}",
                self.t_c,
                1.0 / self.kappa
            )));
        }
        Ok(())
    }

    pub fn kappa_t(&self) -> f64 {
        self.kappa * self.t
    }

    /// Amplitude shrink factor `e^{-kappa t/2}`.
    pub fn amplitude_factor(&self) -> f64 {
        (-0.5 * self.kappa_t()).exp()
    }

    /// `1 - e^{-kappa t}`, the fraction of energy lost.
    pub fn loss(&self) -> f64 {
        -(-self.kappa_t()).exp_m1()
    }
}

/// One dyad `coef |ket><bra|` of a damped superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dyad {
    pub coef: C64,
    pub ket: C64,
    pub bra: C64,
}

/// Damped superposition as a sum of coherent dyads.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoheredState {
    dyads: Vec<Dyad>,
    /// number of terms of the original superposition; dyad `j*n + k` is `(j, k)`
    n: usize,
}

impl DecoheredState {
    pub fn dyads(&self) -> &[Dyad] {
        &self.dyads
    }

    pub fn dyad(&self, j: usize, k: usize) -> Dyad {
        self.dyads[j * self.n + k]
    }

    /// `sum c_jk <bra_k|ket_j>`.
    pub fn trace(&self) -> C64 {
        self.dyads
            .iter()
            .map(|d| d.coef * crate::states::overlap(d.ket, d.bra))
            .sum()
    }

    /// Number-basis matrix, failing if any ket loses more than the usual
    /// truncation tolerance.
    pub fn to_fock(&self, cutoff: usize) -> Result<DensityMatrixFock> {
        let mut kets = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let center = self.dyads[j * self.n + j].ket;
            kets.push(to_fock(&CoherentSuperposition::coherent(center), cutoff)?.to_dvector());
        }
        let dim = cutoff + 1;
        let mut m = nalgebra::DMatrix::<C64>::zeros(dim, dim);
        for j in 0..self.n {
            for k in 0..self.n {
                let d = self.dyad(j, k);
                m += &kets[j] * kets[k].adjoint() * d.coef;
            }
        }
        DensityMatrixFock::new(m)
    }

    /// Closed-form Wigner kernel of the mixture.
    pub fn wigner(&self) -> PureWigner {
        PureWigner::from_dyads(self.dyads.iter().map(|d| (d.coef, d.ket, d.bra)))
    }

    /// `|c_jk| / |c_jk(0)|`, the surviving fraction of one coherence.
    pub fn coherence_weight(&self, original: &CoherentSuperposition, j: usize, k: usize) -> f64 {
        let w = original.terms();
        (self.dyad(j, k).coef / (w[j].weight * w[k].weight.conj())).norm()
    }

    pub fn max_center_norm(&self) -> f64 {
        self.dyads.iter().map(|d| d.ket.norm()).fold(0.0, f64::max)
    }
}

/// Damp an arbitrary normalized superposition.
pub fn decohere(s: &CoherentSuperposition, params: &DecayParams) -> Result<DecoheredState> {
    params.validate()?;
    let loss = params.loss();
    let shrink = params.amplitude_factor();
    let terms = s.terms();
    let n = terms.len();
    let mut dyads = Vec::with_capacity(n * n);
    for tj in terms {
        for tk in terms {
            let (a, b) = (tj.center, tk.center);
            let log_overlap = -0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + b.conj() * a;
            dyads.push(Dyad {
                coef: tj.weight * tk.weight.conj() * (log_overlap * loss).exp(),
                ket: a * shrink,
                bra: b * shrink,
            });
        }
    }
    Ok(DecoheredState { dyads, n })
}

/// Damped compass state in the number basis, at the default cutoff for `|alpha|`.
pub fn decohere_compass(alpha: C64, params: &DecayParams) -> Result<DensityMatrixFock> {
    decohere_compass_with_cutoff(alpha, params, crate::default_cutoff(alpha.norm()))
}

pub fn decohere_compass_with_cutoff(
    alpha: C64,
    params: &DecayParams,
    cutoff: usize,
) -> Result<DensityMatrixFock> {
    let compass = CoherentSuperposition::compass(alpha);
    // the undamped state sets the truncation requirement
    to_fock(&compass, cutoff)?;
    decohere(&compass, params)?.to_fock(cutoff)
}

/// Surviving fraction `e^{-2|alpha|^2 (1 - e^{-kappa t})}` of the coherence
/// between opposite components `|alpha>` and `|-alpha>`.
pub fn coherence_factor(alpha: C64, params: &DecayParams) -> f64 {
    (-2.0 * alpha.norm_sqr() * params.loss()).exp()
}

/// `t_c / (2|alpha|^2)`.
pub fn compass_lifetime(alpha: C64, t_c: f64) -> Result<f64> {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    Ok(t_c / (2.0 * r2))
}

/// Upper bound on `|coherence_factor - e^{-1}|` at `t = t_c / (2|alpha|^2)`.
///
/// With `x = kappa t = 1/(2|alpha|^2)` the exponent `(1 - e^{-x})/x` lies in
/// `[1 - x/2, 1]`, so the factor sits in `[e^{-1}, e^{-1} e^{x/2}]`.
pub fn lifetime_correction_bound(alpha: C64) -> Result<f64> {
    let r2 = alpha.norm_sqr();
    if r2 == 0.0 {
        return Err(Error::ZeroAmplitude);
    }
    Ok((-1.0f64).exp() * (1.0 / (4.0 * r2)).exp_m1())
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrixFock) -> f64 {
    rho.purity()
}

/// Trace distance between the analytic damped compass and RK4 integration
/// of the master equation from the undamped projector.
pub fn rk4_trace_distance(alpha: C64, kappa_t: f64, dt: Option<f64>) -> Result<f64> {
    let params = DecayParams::scaled(kappa_t)?;
    let cutoff = crate::default_cutoff(alpha.norm());
    let initial =
        DensityMatrixFock::from_pure(&to_fock(&CoherentSuperposition::compass(alpha), cutoff)?);
    if kappa_t == 0.0 {
        return initial.trace_distance(&decohere_compass_with_cutoff(alpha, &params, cutoff)?);
    }
    let dt = dt.unwrap_or_else(|| default_lindblad_step(1.0, kappa_t));
    let numeric = lindblad_rk4(&initial, 1.0, kappa_t, dt)?;
    numeric.trace_distance(&decohere_compass_with_cutoff(alpha, &params, cutoff)?)
}

/// One row of a decay curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCurveRow {
    pub kappa_t: f64,
    pub coherence_factor: f64,
    pub purity: f64,
    pub negativity_volume: f64,
}

/// Coherence, purity and Wigner negativity of the damped compass over `kappa_t`.
pub fn decay_curve(alpha: C64, kappa_ts: &[f64], grid: &GridSpec) -> Result<Vec<DecayCurveRow>> {
    let compass = CoherentSuperposition::compass(alpha);
    let cutoff = compass.default_cutoff();
    kappa_ts
        .iter()
        .map(|&kt| {
            let params = DecayParams::scaled(kt)?;
            let state = decohere(&compass, &params)?;
            let rho = state.to_fock(cutoff)?;
            let kernel = state.wigner();
            let g = crate::wigner::evaluate_grid(grid, "decohered compass", |z| kernel.eval(z))?;
            Ok(DecayCurveRow {
                kappa_t: kt,
                coherence_factor: coherence_factor(alpha, &params),
                purity: purity(&rho),
                negativity_volume: negativity_volume(&g),
            })
        })
        .collect()
}
