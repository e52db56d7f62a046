//! Finite superpositions of coherent states and their number-basis forms.
//!
//! A [`CoherentSuperposition`] is a list of `(weight, center)` pairs standing
//! for `sum_j w_j |alpha_j>`. Everything that can be done analytically (norms,
//! inner products, fidelities) goes through the coherent-state overlap
//! `<beta|alpha> = exp(-|alpha|^2/2 - |beta|^2/2 + conj(beta) alpha)`.
//! Identical centers are never merged, so the terms of a state produced by
//! the cavity protocol keep a one-to-one relation with its atomic branches.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::math::{coherent_amplitudes, default_cutoff};
use crate::{Error, Result, C64};

/// Squared norm below which a superposition is treated as the zero vector.
pub const DEGENERATE_NORM_SQR: f64 = 1e-300;
/// Largest fraction of the norm that truncation may drop before
/// [`to_fock`] refuses.
pub const TRUNCATION_LOSS_TOLERANCE: f64 = 1e-6;

/// `<beta|alpha>` for coherent states `|alpha>`, `|beta>`.
pub fn overlap(alpha: C64, beta: C64) -> C64 {
    (-0.5 * alpha.norm_sqr() - 0.5 * beta.norm_sqr() + beta.conj() * alpha).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: C64,
    pub center: C64,
}

impl Term {
    pub fn new(weight: C64, center: C64) -> Self {
        Self { weight, center }
    }
}

/// `sum_j w_j |alpha_j>`, optionally flagged as normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentSuperposition {
    terms: Vec<Term>,
    normalized: bool,
}

impl CoherentSuperposition {
    /// Unnormalized superposition. Fails on an empty term list or all-zero weights.
    pub fn new(terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter("superposition has no terms".into()));
        }
        if terms.iter().all(|t| t.weight == C64::new(0.0, 0.0)) {
            return Err(Error::InvalidParameter(
                "all superposition weights are zero".into(),
            ));
        }
        if terms
            .iter()
            .any(|t| !(t.weight.is_finite() && t.center.is_finite()))
        {
            return Err(Error::InvalidParameter(
                "non-finite weight or center".into(),
            ));
        }
        Ok(Self {
            terms,
            normalized: false,
        })
    }

    pub fn from_pairs(pairs: &[(C64, C64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(w, c)| Term::new(w, c)).collect())
    }

    /// The coherent state `|alpha>`.
    pub fn coherent(alpha: C64) -> Self {
        Self {
            terms: vec![Term::new(C64::new(1.0, 0.0), alpha)],
            normalized: true,
        }
    }

    pub fn vacuum() -> Self {
        Self::coherent(C64::new(0.0, 0.0))
    }

    /// Normalized even cat `N0 (|alpha> + |-alpha>)`.
    pub fn cat(alpha: C64) -> Self {
        let one = C64::new(1.0, 0.0);
        let s = Self {
            terms: vec![Term::new(one, alpha), Term::new(one, -alpha)],
            normalized: false,
        };
        normalize(&s).expect("even cat never degenerates")
    }

    /// Unnormalized compass `|alpha> + |i alpha> + |-alpha> + |-i alpha>`.
    pub fn compass_unnormalized(alpha: C64) -> Self {
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        Self {
            terms: vec![
                Term::new(one, alpha),
                Term::new(one, i * alpha),
                Term::new(one, -alpha),
                Term::new(one, -i * alpha),
            ],
            normalized: false,
        }
    }

    /// Normalized compass state `N (|alpha> + |i alpha> + |-alpha> + |-i alpha>)`.
    pub fn compass(alpha: C64) -> Self {
        normalize(&Self::compass_unnormalized(alpha)).expect("compass never degenerates")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `<self|other>` from pairwise coherent overlaps.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &other.terms {
                acc += a.weight.conj() * b.weight * overlap(b.center, a.center);
            }
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    /// Gram matrix `G_jk = <alpha_j|alpha_k>` of the term centers.
    pub fn gram_matrix(&self) -> DMatrix<C64> {
        let n = self.terms.len();
        DMatrix::from_fn(n, n, |j, k| {
            overlap(self.terms[k].center, self.terms[j].center)
        })
    }

    /// Largest `|alpha_j|`.
    pub fn max_center_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.center.norm())
            .fold(0.0, f64::max)
    }

    /// Cutoff meeting the default truncation rule for this state.
    pub fn default_cutoff(&self) -> usize {
        default_cutoff(self.max_center_norm())
    }

    /// All weights multiplied by `factor`. The normalized flag survives only
    /// for unit-modulus factors.
    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.weight * factor, t.center))
                .collect(),
            normalized: self.normalized && (factor.norm() - 1.0).abs() < 1e-15,
        }
    }

    /// Phase-space rotation: every center multiplied by `e^{i angle}`.
    pub fn rotated(&self, angle: f64) -> Self {
        let r = C64::from_polar(1.0, angle);
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.weight, t.center * r))
                .collect(),
            normalized: self.normalized,
        }
    }

    /// Concatenation `self + other` (unnormalized).
    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self {
            terms,
            normalized: false,
        }
    }

    pub(crate) fn with_flag(terms: Vec<Term>, normalized: bool) -> Self {
        Self { terms, normalized }
    }
}

/// Rescale the weights by one positive factor so that `<psi|psi> = 1`.
pub fn normalize(s: &CoherentSuperposition) -> Result<CoherentSuperposition> {
    let norm_sqr = s.norm_sqr();
    if !(norm_sqr > DEGENERATE_NORM_SQR) {
        return Err(Error::DegenerateState { norm_sqr });
    }
    let f = 1.0 / norm_sqr.sqrt();
    Ok(CoherentSuperposition {
        terms: s
            .terms
            .iter()
            .map(|t| Term::new(t.weight * f, t.center))
            .collect(),
        normalized: true,
    })
}

/// `|<a|b>|^2 / (<a|a><b|b>)`, computed from pairwise overlaps.
pub fn fidelity(a: &CoherentSuperposition, b: &CoherentSuperposition) -> f64 {
    let ab = a.inner(b);
    (ab.norm_sqr() / (a.norm_sqr() * b.norm_sqr())).min(1.0)
}

/// Truncated number-basis vector `(psi_0, ..., psi_cutoff)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<C64>,
}

impl FockVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter(
                "Fock vector needs at least one amplitude".into(),
            ));
        }
        Ok(Self { amplitudes })
    }

    /// The number state `|n>` in a space of the given cutoff.
    pub fn number_state(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::DimensionMismatch {
                expected: cutoff,
                got: n,
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); cutoff + 1];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`; the shorter vector is zero-padded.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum::<f64>()
            / self.norm_sqr()
    }

    pub fn to_dvector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amplitudes)
    }
}

/// Amplitudes `sum_j w_j e^{-|alpha_j|^2/2} alpha_j^n / sqrt(n!)` for `n <= cutoff`.
///
/// Fails with [`Error::CutoffTooSmall`] when truncation drops more than
/// [`TRUNCATION_LOSS_TOLERANCE`] of the analytic norm.
pub fn to_fock(s: &CoherentSuperposition, cutoff: usize) -> Result<FockVector> {
    let v = to_fock_unchecked(s, cutoff);
    let exact = s.norm_sqr();
    let kept = v.norm_sqr();
    let lost = if exact > 0.0 { 1.0 - kept / exact } else { 0.0 };
    if lost > TRUNCATION_LOSS_TOLERANCE {
        return Err(Error::CutoffTooSmall {
            cutoff,
            retained: kept / exact,
            lost,
        });
    }
    Ok(v)
}

/// [`to_fock`] without the truncation check.
pub fn to_fock_unchecked(s: &CoherentSuperposition, cutoff: usize) -> FockVector {
    let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
    for t in &s.terms {
        for (a, c) in amps.iter_mut().zip(coherent_amplitudes(t.center, cutoff)) {
            *a += t.weight * c;
        }
    }
    FockVector { amplitudes: amps }
}

/// Photon-number distribution `p(n) = |<n|psi>|^2` for `n <= cutoff`.
pub fn photon_distribution(s: &CoherentSuperposition, cutoff: usize) -> Result<Vec<f64>> {
    Ok(to_fock(s, cutoff)?
        .amplitudes
        .iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// Truncated number-basis density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixFock {
    matrix: DMatrix<C64>,
}

impl DensityMatrixFock {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(v: &FockVector) -> Self {
        let col = v.to_dvector();
        Self {
            matrix: &col * col.adjoint(),
        }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
        m[(0, 0)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn cutoff(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // Tr(rho rho) = sum_jk rho_jk rho_kj = sum_jk |rho_jk|^2 for Hermitian rho
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `|rho_jk - conj(rho_kj)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((self.matrix[(j, k)] - self.matrix[(k, j)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = hermitian_part(&self.matrix)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Eigenpairs `(lambda, v)` of the Hermitian part with `|lambda| > threshold`.
    pub fn spectral_terms(&self, threshold: f64) -> Vec<(f64, FockVector)> {
        let eig = hermitian_part(&self.matrix).symmetric_eigen();
        let mut out = Vec::new();
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda.abs() > threshold {
                let v = eig.eigenvectors.column(i).iter().copied().collect();
                out.push((lambda, FockVector { amplitudes: v }));
            }
        }
        out
    }

    /// `<psi|rho|psi>` for a vector of the same dimension (zero-padded otherwise).
    pub fn expectation(&self, v: &FockVector) -> C64 {
        let n = self.dim().min(v.dim());
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += v.amplitudes[j].conj() * self.matrix[(j, k)] * v.amplitudes[k];
            }
        }
        acc
    }

    /// Half the trace norm of `self - other`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let diff = hermitian_part(&(&self.matrix - &other.matrix));
        Ok(0.5
            * diff
                .symmetric_eigenvalues()
                .iter()
                .map(|l| l.abs())
                .sum::<f64>())
    }

    /// Same state embedded in (or truncated to) a space of a different cutoff.
    pub fn resized(&self, cutoff: usize) -> Self {
        let n = cutoff + 1;
        let keep = n.min(self.dim());
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (keep, keep))
            .copy_from(&self.matrix.view((0, 0), (keep, keep)));
        Self { matrix: m }
    }
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}
