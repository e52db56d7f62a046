//! Wigner functions of coherent superpositions and phase-space grids.
//!
//! For `|psi> = sum_j w_j |alpha_j>` the Gaussian integral over coherent
//! states closes to a pairwise sum
//!
//! ```text
//! W(gamma) = (2/pi) sum_{j,k} w_j conj(w_k)
//!            exp(-2|gamma|^2 + 2 conj(gamma) alpha_j + 2 gamma conj(alpha_k)
//!                - |alpha_j|^2/2 - |alpha_k|^2/2 - conj(alpha_k) alpha_j)
//! ```
//!
//! whose real part of the exponent is `-|2 gamma - alpha_j - alpha_k|^2 / 2`,
//! so no term can overflow. This generic sum is the reference; the
//! six-term compass expression and the displaced-parity Fock evaluation are
//! both checked against it.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::math::default_cutoff;
use crate::numerics::displacement_block;
use crate::states::{CoherentSuperposition, DensityMatrixFock, FockVector};
use crate::{Error, Result, C64};

/// `1/e` footprint of the vacuum Wigner function, the Planck-cell reference.
pub const VACUUM_FOOTPRINT: f64 = FRAC_PI_2;
/// Largest imaginary residue tolerated before a pairwise sum is declared broken.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Tolerance on `<psi|psi> = 1` for Wigner evaluation.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;
/// Sign alternations required along each central axis for a chessboard.
pub const CHESSBOARD_MIN_ALTERNATIONS: usize = 3;
/// Largest width ratio between the central crossing interval and its neighbours.
pub const CHESSBOARD_MAX_SPACING_RATIO: f64 = 1.5;
/// Half-width of the window scanned for central crossings.
pub const CENTRAL_WINDOW: f64 = 2.0;
/// Population of the top Fock level above which the oracle refuses a state.
pub const FOCK_EDGE_TOLERANCE: f64 = 1e-12;

/// Pairwise Gaussian kernel of a pure superposition, prepared once per state.
#[derive(Debug, Clone)]
pub struct PureWigner {
    pairs: Vec<PairTerm>,
}

#[derive(Debug, Clone, Copy)]
struct PairTerm {
    coef: C64,
    two_alpha_j: C64,
    two_conj_alpha_k: C64,
    offset: C64,
}

impl PureWigner {
    /// Fails with [`Error::NotNormalized`] unless `<psi|psi> = 1`.
    pub fn new(s: &CoherentSuperposition) -> Result<Self> {
        let norm_sqr = s.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let dyads = s.terms().iter().flat_map(|a| {
            s.terms()
                .iter()
                .map(move |b| (a.weight * b.weight.conj(), a.center, b.center))
        });
        Ok(Self::from_dyads(dyads))
    }

    /// Kernel for `sum c_jk |alpha_j><alpha_k|` given as `(c_jk, alpha_j, alpha_k)`.
    pub fn from_dyads(dyads: impl IntoIterator<Item = (C64, C64, C64)>) -> Self {
        let pairs = dyads
            .into_iter()
            .map(|(coef, aj, ak)| PairTerm {
                coef: coef * (2.0 / PI),
                two_alpha_j: aj * 2.0,
                two_conj_alpha_k: ak.conj() * 2.0,
                offset: -0.5 * aj.norm_sqr() - 0.5 * ak.norm_sqr() - ak.conj() * aj,
            })
            .collect();
        Self { pairs }
    }

    /// Complex pairwise sum before the imaginary part is dropped.
    pub fn eval_complex(&self, gamma: C64) -> C64 {
        let g2 = -2.0 * gamma.norm_sqr();
        let gc = gamma.conj();
        self.pairs
            .iter()
            .map(|t| {
                t.coef * (g2 + gc * t.two_alpha_j + gamma * t.two_conj_alpha_k + t.offset).exp()
            })
            .sum()
    }

    pub fn eval(&self, gamma: C64) -> Result<f64> {
        let w = self.eval_complex(gamma);
        if w.im.abs() > IMAGINARY_TOLERANCE {
            return Err(Error::ImaginaryResidue {
                residue: w.im.abs(),
            });
        }
        Ok(w.re)
    }
}

/// Closed-form Wigner function of a normalized coherent superposition.
pub fn wigner_superposition(s: &CoherentSuperposition, gamma: C64) -> Result<f64> {
    PureWigner::new(s)?.eval(gamma)
}

/// Squared compass normalization `|N|^2 = 1 / (4 + 4 e^{-2|a|^2} + 8 e^{-|a|^2} cos|a|^2)`.
pub fn compass_norm_sqr(alpha: C64) -> f64 {
    let r2 = alpha.norm_sqr();
    1.0 / (4.0 + 4.0 * (-2.0 * r2).exp() + 8.0 * (-r2).exp() * r2.cos())
}

/// The six-term compass Wigner function.
///
/// With `u = (1+i) a conj(g) + (1-i) conj(a) g` and
/// `v = (1-i) a conj(g) + (1+i) conj(a) g` (both real):
/// the first two terms come from the diagonal pairs `(a, -a)`, `(ia, -ia)`,
/// the last four from the adjacent pairs.
pub fn wigner_compass(alpha: C64, gamma: C64) -> f64 {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let ag = alpha * gamma.conj();
    let u = ((one + i) * ag + (one - i) * ag.conj()).re;
    let v = ((one - i) * ag + (one + i) * ag.conj()).re;
    let r2 = alpha.norm_sqr();
    let bracket = 2.0 * (-2.0 * r2).exp() * u.cosh() * v.cosh()
        + 2.0 * u.cos() * v.cos()
        + (-(r2 - u)).exp() * (r2 - u).cos()
        + (-(r2 - v)).exp() * (r2 - v).cos()
        + (-(r2 + u)).exp() * (r2 + u).cos()
        + (-(r2 + v)).exp() * (r2 + v).cos();
    compass_norm_sqr(alpha) * 4.0 * (-2.0 * gamma.norm_sqr()).exp() / PI * bracket
}

/// A number-basis state handed to the displaced-parity oracle.
#[derive(Debug, Clone, Copy)]
pub enum FockState<'a> {
    Pure(&'a FockVector),
    Mixed(&'a DensityMatrixFock),
}

impl<'a> From<&'a FockVector> for FockState<'a> {
    fn from(v: &'a FockVector) -> Self {
        FockState::Pure(v)
    }
}

impl<'a> From<&'a DensityMatrixFock> for FockState<'a> {
    fn from(r: &'a DensityMatrixFock) -> Self {
        FockState::Mixed(r)
    }
}

/// Displaced-parity evaluator `W = (2/pi) sum_n (-1)^n <n|D(-g) rho D(g)|n>`.
///
/// Mixed states are reduced to their spectral terms once. The displaced
/// vectors are computed in a larger space than the input so that
/// displacement does not push amplitude past the truncation.
#[derive(Debug, Clone)]
pub struct FockWigner {
    terms: Vec<(f64, FockVector)>,
    /// radius (in `sqrt(n)`) of the populated part of the input
    radius: f64,
}

impl FockWigner {
    pub fn new<'a>(state: impl Into<FockState<'a>>) -> Result<Self> {
        let terms = match state.into() {
            FockState::Pure(v) => vec![(1.0, v.clone())],
            FockState::Mixed(rho) => rho.spectral_terms(1e-15),
        };
        let mut radius: f64 = 0.0;
        for (lambda, v) in &terms {
            let amps = v.amplitudes();
            let norm = v.norm_sqr();
            let top = amps[amps.len() - 1].norm_sqr() / norm;
            if top > FOCK_EDGE_TOLERANCE {
                return Err(Error::CutoffTooSmall {
                    cutoff: v.cutoff(),
                    retained: 1.0 - top,
                    lost: top,
                });
            }
            let populated = amps
                .iter()
                .rposition(|a| lambda.abs() * a.norm_sqr() > 1e-20)
                .unwrap_or(0);
            radius = radius.max((populated as f64).sqrt());
        }
        Ok(Self { terms, radius })
    }

    /// Output cutoff used when evaluating points with `|gamma| <= reach`.
    pub fn output_cutoff(&self, reach: f64) -> usize {
        let input = self
            .terms
            .iter()
            .map(|(_, v)| v.cutoff())
            .max()
            .unwrap_or(0);
        default_cutoff(self.radius + reach).max(input)
    }

    pub fn eval(&self, gamma: C64) -> f64 {
        self.eval_with_cutoff(gamma, self.output_cutoff(gamma.norm()))
    }

    pub fn eval_with_cutoff(&self, gamma: C64, out_cutoff: usize) -> f64 {
        let mut acc = 0.0;
        let cols = self.terms.iter().map(|(_, v)| v.dim()).max().unwrap_or(1);
        let d = displacement_block(-gamma, out_cutoff + 1, cols);
        for (lambda, v) in &self.terms {
            let mut parity = 0.0;
            for m in 0..=out_cutoff {
                let phi: C64 = v
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .map(|(n, a)| d[(m, n)] * a)
                    .sum();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                parity += sign * phi.norm_sqr();
            }
            acc += lambda * parity;
        }
        2.0 / PI * acc
    }
}

/// Displaced-parity Wigner value of a number-basis state (oracle path).
pub fn wigner_fock_numeric<'a>(state: impl Into<FockState<'a>>, gamma: C64) -> Result<f64> {
    Ok(FockWigner::new(state)?.eval(gamma))
}

/// Bounds and resolution of a rectangular phase-space grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    /// `[-half, half]^2` with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            nx: n,
            np: n,
        }
    }

    /// Bounds `+-(|alpha| + 4)`, spacing `<= min(0.05, pi / (8|alpha|))`.
    pub fn default_for(alpha_magnitude: f64) -> Self {
        let half = alpha_magnitude + 4.0;
        let mut spacing: f64 = 0.05;
        if alpha_magnitude > 0.0 {
            spacing = spacing.min(PI / (8.0 * alpha_magnitude));
        }
        let n = (2.0 * half / spacing).ceil() as usize + 1;
        // odd count puts a sample on each axis
        let n = if n.is_multiple_of(2) { n + 1 } else { n };
        Self::square(half, n)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::InvertedBounds {
                min: self.x_min,
                max: self.x_max,
            });
        }
        if !(self.p_max > self.p_min) || !self.p_min.is_finite() || !self.p_max.is_finite() {
            return Err(Error::InvertedBounds {
                min: self.p_min,
                max: self.p_max,
            });
        }
        if self.nx < 2 || self.np < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs >= 2 points per axis, got {}x{}",
                self.nx, self.np
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    /// Largest `|gamma|` on the grid.
    pub fn reach(&self) -> f64 {
        let x = self.x_min.abs().max(self.x_max.abs());
        let p = self.p_min.abs().max(self.p_max.abs());
        x.hypot(p)
    }
}

/// Wigner values sampled on a [`GridSpec`], stored x-outer (`values[i * np + j]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub state_label: String,
}

impl PhaseSpaceGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.np + j]
    }

    /// Largest pointwise difference to another grid with the same layout.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                got: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Evaluate `f` on every grid point. Rows are computed in parallel; the
/// result does not depend on the number of worker threads.
pub fn evaluate_grid<F>(spec: &GridSpec, label: impl Into<String>, f: F) -> Result<PhaseSpaceGrid>
where
    F: Fn(C64) -> Result<f64> + Sync,
{
    spec.validate()?;
    let rows: Vec<Vec<f64>> = (0..spec.nx)
        .into_par_iter()
        .map(|i| {
            let x = spec.x(i);
            (0..spec.np)
                .map(|j| f(C64::new(x, spec.p(j))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite Wigner value {bad}"
        )));
    }
    Ok(PhaseSpaceGrid {
        spec: *spec,
        values,
        state_label: label.into(),
    })
}

/// Source of a Wigner grid: a pure superposition (closed form) or a
/// number-basis density matrix (displaced-parity oracle).
#[derive(Debug, Clone, Copy)]
pub enum WignerSource<'a> {
    Pure(&'a CoherentSuperposition),
    Mixed(&'a DensityMatrixFock),
}

impl<'a> From<&'a CoherentSuperposition> for WignerSource<'a> {
    fn from(s: &'a CoherentSuperposition) -> Self {
        WignerSource::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrixFock> for WignerSource<'a> {
    fn from(r: &'a DensityMatrixFock) -> Self {
        WignerSource::Mixed(r)
    }
}

/// Sample the Wigner function of `source` on `spec`.
pub fn wigner_grid<'a>(
    source: impl Into<WignerSource<'a>>,
    spec: &GridSpec,
    label: &str,
) -> Result<PhaseSpaceGrid> {
    spec.validate()?;
    match source.into() {
        WignerSource::Pure(s) => {
            let kernel = PureWigner::new(s)?;
            evaluate_grid(spec, label, |g| kernel.eval(g))
        }
        WignerSource::Mixed(rho) => {
            let oracle = FockWigner::new(rho)?;
            let out_cutoff = oracle.output_cutoff(spec.reach());
            evaluate_grid(spec, label, |g| Ok(oracle.eval_with_cutoff(g, out_cutoff)))
        }
    }
}

/// Trapezoidal weight of sample `i` on an axis with `n` samples.
fn trapezoid_weight(i: usize, n: usize) -> f64 {
    if i == 0 || i + 1 == n {
        0.5
    } else {
        1.0
    }
}

/// Trapezoidal integral of the grid over its bounds.
pub fn integrate_grid(g: &PhaseSpaceGrid) -> f64 {
    weighted_sum(g, |w| w)
}

/// Integral of `max(0, -W)`.
pub fn negativity_volume(g: &PhaseSpaceGrid) -> f64 {
    weighted_sum(g, |w| (-w).max(0.0))
}

fn weighted_sum(g: &PhaseSpaceGrid, f: impl Fn(f64) -> f64) -> f64 {
    let (nx, np) = (g.spec.nx, g.spec.np);
    let mut acc = 0.0;
    for i in 0..nx {
        let wi = trapezoid_weight(i, nx);
        let mut row = 0.0;
        for j in 0..np {
            row += trapezoid_weight(j, np) * f(g.value(i, j));
        }
        acc += wi * row;
    }
    acc * g.spec.dx() * g.spec.dp()
}

/// Central interference structure of a Wigner grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileReport {
    pub central_value: f64,
    /// Zero crossings along the `p = 0` axis inside the central window.
    pub zero_crossings_x: Vec<f64>,
    /// Zero crossings along the `x = 0` axis inside the central window.
    pub zero_crossings_p: Vec<f64>,
    pub zero_crossing_spacings_x: Vec<f64>,
    pub zero_crossing_spacings_p: Vec<f64>,
    /// Product of the two crossing intervals enclosing the origin, if both exist.
    pub central_tile_area: Option<f64>,
    pub tile_area_over_vacuum_footprint: Option<f64>,
    /// At least three crossings on each axis with regular tiles around the origin.
    pub has_chessboard: bool,
    pub window: f64,
}

/// Expected spacing between central zero crossings of a compass state whose
/// chessboard is aligned with the grid axes (`arg alpha = pi/4`).
pub fn expected_crossing_spacing(alpha_magnitude: f64) -> f64 {
    PI / (2.0 * 2f64.sqrt() * alpha_magnitude)
}

/// Zero crossings of W along the two axes through the origin.
///
/// Crossings are located by linear interpolation between adjacent samples.
/// The compass chessboard lines run along `x` and `p` when `arg alpha = pi/4`
/// (mod `pi/2`); for other orientations the axes cut through tile corners.
pub fn central_tile_metrics(g: &PhaseSpaceGrid, alpha_magnitude: f64) -> Result<TileReport> {
    let s = &g.spec;
    let window = CENTRAL_WINDOW;
    if s.x_min > -window || s.x_max < window || s.p_min > -window || s.p_max < window {
        return Err(Error::GridTooSmall { needed: window });
    }
    if alpha_magnitude > 0.0 {
        let fringe = expected_crossing_spacing(alpha_magnitude);
        let spacing = s.dx().max(s.dp());
        if spacing > 0.5 * fringe {
            return Err(Error::GridTooCoarse { spacing, fringe });
        }
    }

    // W along p = 0 and along x = 0, interpolated between the bracketing lines
    let (jl, jt) = bracket(s.p_min, s.dp(), s.np);
    let x_axis: Vec<(f64, f64)> = (0..s.nx)
        .map(|i| {
            (
                s.x(i),
                (1.0 - jt) * g.value(i, jl) + jt * g.value(i, (jl + 1).min(s.np - 1)),
            )
        })
        .collect();
    let (il, it) = bracket(s.x_min, s.dx(), s.nx);
    let p_axis: Vec<(f64, f64)> = (0..s.np)
        .map(|j| {
            (
                s.p(j),
                (1.0 - it) * g.value(il, j) + it * g.value((il + 1).min(s.nx - 1), j),
            )
        })
        .collect();

    let central_value = {
        let a = (1.0 - it) * g.value(il, jl) + it * g.value((il + 1).min(s.nx - 1), jl);
        let b = (1.0 - it) * g.value(il, (jl + 1).min(s.np - 1))
            + it * g.value((il + 1).min(s.nx - 1), (jl + 1).min(s.np - 1));
        (1.0 - jt) * a + jt * b
    };

    let cx = zero_crossings(&x_axis, window);
    let cp = zero_crossings(&p_axis, window);
    let span = |c: &[f64]| -> Option<f64> {
        let left = c
            .iter()
            .copied()
            .filter(|&z| z < 0.0)
            .fold(None, |m: Option<f64>, z| Some(m.map_or(z, |m| m.max(z))));
        let right = c
            .iter()
            .copied()
            .filter(|&z| z > 0.0)
            .fold(None, |m: Option<f64>, z| Some(m.map_or(z, |m| m.min(z))));
        Some(right? - left?)
    };
    let central_tile_area = match (span(&cx), span(&cp)) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    };
    let has_chessboard = is_regular_board(&cx) && is_regular_board(&cp);
    Ok(TileReport {
        central_value,
        zero_crossing_spacings_x: cx.windows(2).map(|w| w[1] - w[0]).collect(),
        zero_crossing_spacings_p: cp.windows(2).map(|w| w[1] - w[0]).collect(),
        zero_crossings_x: cx,
        zero_crossings_p: cp,
        central_tile_area,
        tile_area_over_vacuum_footprint: central_tile_area.map(|a| a / VACUUM_FOOTPRINT),
        has_chessboard,
        window,
    })
}

/// At least [`CHESSBOARD_MIN_ALTERNATIONS`] crossings, and the intervals on
/// either side of the central one are of comparable width. A lone central
/// lobe (two crossings bounding a wide positive blob) fails the second test.
fn is_regular_board(crossings: &[f64]) -> bool {
    if crossings.len() < CHESSBOARD_MIN_ALTERNATIONS {
        return false;
    }
    let Some(k) = crossings.iter().position(|&z| z > 0.0) else {
        return false;
    };
    if k < 2 || k + 1 >= crossings.len() {
        return false;
    }
    let central = crossings[k] - crossings[k - 1];
    [
        crossings[k - 1] - crossings[k - 2],
        crossings[k + 1] - crossings[k],
    ]
    .iter()
    .all(|&w| {
        let ratio = if w > central {
            w / central
        } else {
            central / w
        };
        ratio <= CHESSBOARD_MAX_SPACING_RATIO
    })
}

/// Index of the sample at or below 0 and the fractional offset to the next.
fn bracket(min: f64, step: f64, n: usize) -> (usize, f64) {
    let pos = (-min / step).clamp(0.0, (n - 1) as f64);
    let lo = (pos.floor() as usize).min(n - 2);
    (lo, pos - lo as f64)
}

/// Linearly interpolated sign changes of `(coord, value)` samples with
/// `|coord| <= window`. Exact zeros are skipped over.
fn zero_crossings(samples: &[(f64, f64)], window: f64) -> Vec<f64> {
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(c, v)| c.abs() <= window + 1e-12 && *v != 0.0)
        .collect();
    inside
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .map(|w| {
            let ((c0, v0), (c1, v1)) = (w[0], w[1]);
            c0 + (c1 - c0) * v0 / (v0 - v1)
        })
        .collect()
}
