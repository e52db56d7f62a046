//! Dispersive cavity-QED preparation of coherent-state superpositions.
//!
//! Atoms cross a cavity holding a coherent field. In the dispersive limit an
//! atom in `|g>` rotates the field by `e^{-i phi}` and an atom in `|e>` by
//! `e^{+i phi}` (plus the common free rotation `e^{-i delta tau}`), and the
//! excited branch picks up the extra phase `e^{i phi}`:
//!
//! ```text
//! |g, a>  ->  |g, a e^{-i phi - i delta tau}>
//! |e, a>  ->  e^{i phi} |e, a e^{i phi - i delta tau}>
//! ```
//!
//! Detecting the atoms in chosen Ramsey states projects the field onto a
//! superposition of the rotated coherent states. With two atoms at
//! `phi = pi/4`, `phi' = pi/2` and matched Ramsey phases the field is left
//! in the compass state.
//!
//! Atoms are ordered by passage: outcome sequences and detection lists are
//! indexed A, B, ... in the order the atoms crossed the cavity.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::math::wrap_angle;
use crate::states::{fidelity, normalize, overlap, CoherentSuperposition, Term};
use crate::{Error, Result, C64};

/// Tolerance on the compass phase conditions checked by [`make_compass`].
pub const PHASE_CONDITION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomLevel {
    Excited,
    Ground,
}

/// Two-level atom `c_e |e> + c_g |g>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomState {
    pub c_e: C64,
    pub c_g: C64,
}

impl AtomState {
    /// Fails unless `|c_e|^2 + |c_g|^2 = 1` within 1e-12.
    pub fn new(c_e: C64, c_g: C64) -> Result<Self> {
        let n = c_e.norm_sqr() + c_g.norm_sqr();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("atom state norm {n} != 1")));
        }
        Ok(Self { c_e, c_g })
    }

    pub fn excited() -> Self {
        Self {
            c_e: C64::new(1.0, 0.0),
            c_g: C64::new(0.0, 0.0),
        }
    }

    pub fn ground() -> Self {
        Self {
            c_e: C64::new(0.0, 0.0),
            c_g: C64::new(1.0, 0.0),
        }
    }

    pub fn amplitude(&self, level: AtomLevel) -> C64 {
        match level {
            AtomLevel::Excited => self.c_e,
            AtomLevel::Ground => self.c_g,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_e.norm_sqr() + self.c_g.norm_sqr()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.c_e.conj() * other.c_e + self.c_g.conj() * other.c_g
    }

    /// The state orthogonal to `self` (fixed phase convention).
    pub fn orthogonal(&self) -> Self {
        Self {
            c_e: -self.c_g.conj(),
            c_g: self.c_e.conj(),
        }
    }
}

/// Ramsey-zone output `(e^{i eta} |e> + e^{i theta} |g>) / sqrt(2)`.
pub fn ramsey_atom(eta: f64, theta: f64) -> AtomState {
    AtomState {
        c_e: C64::from_polar(FRAC_1_SQRT_2, eta),
        c_g: C64::from_polar(FRAC_1_SQRT_2, theta),
    }
}

/// Dispersive phase `g^2 tau / delta` accumulated by one atom.
pub fn phi_from_physical(g: f64, tau: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    Ok(g * g * tau / delta)
}

/// Interaction time giving the dispersive phase `phi`.
pub fn tau_for_phase(phi: f64, g: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::ZeroDetuning);
    }
    if g == 0.0 {
        return Err(Error::InvalidParameter("zero coupling".into()));
    }
    Ok(phi * delta / (g * g))
}

/// One term of an entangled atoms-plus-field state: the atoms sit in the
/// product of `outcomes`, the field in `field`, with overall factor `weight`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub outcomes: Vec<AtomLevel>,
    pub weight: C64,
    pub field: CoherentSuperposition,
}

/// `sum_b weight_b |outcomes_b> (x) |field_b>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomFieldState {
    branches: Vec<Branch>,
}

impl AtomFieldState {
    /// The bare field, before any atom has crossed.
    pub fn from_field(field: CoherentSuperposition) -> Self {
        Self {
            branches: vec![Branch {
                outcomes: Vec::new(),
                weight: C64::new(1.0, 0.0),
                field,
            }],
        }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn num_atoms(&self) -> usize {
        self.branches.first().map_or(0, |b| b.outcomes.len())
    }

    /// Total norm. Branches with different outcome strings are orthogonal.
    pub fn norm_sqr(&self) -> f64 {
        let mut total = 0.0;
        for (i, b) in self.branches.iter().enumerate() {
            for c in &self.branches[i..] {
                if b.outcomes != c.outcomes {
                    continue;
                }
                let term = b.weight.conj() * c.weight * b.field.inner(&c.field);
                total += if std::ptr::eq(b, c) {
                    term.re
                } else {
                    2.0 * term.re
                };
            }
        }
        total
    }

    /// Send one more atom through the cavity.
    pub fn pass_atom(&self, atom: &AtomState, phi: f64, delta_tau: f64) -> Self {
        let rot_e = phi - delta_tau;
        let rot_g = -phi - delta_tau;
        let phase_e = C64::from_polar(1.0, phi);
        let mut branches = Vec::with_capacity(2 * self.branches.len());
        for b in &self.branches {
            for (level, amp, rot) in [
                (AtomLevel::Excited, atom.c_e * phase_e, rot_e),
                (AtomLevel::Ground, atom.c_g, rot_g),
            ] {
                let mut outcomes = b.outcomes.clone();
                outcomes.push(level);
                branches.push(Branch {
                    outcomes,
                    weight: b.weight * amp,
                    field: b.field.rotated(rot),
                });
            }
        }
        Self { branches }
    }
}

/// One atom crossing a cavity that holds `field`.
pub fn dispersive_pass(
    field: &CoherentSuperposition,
    atom: &AtomState,
    phi: f64,
    delta_tau: f64,
) -> AtomFieldState {
    AtomFieldState::from_field(field.clone()).pass_atom(atom, phi, delta_tau)
}

/// Project onto the joint detection `detection[0] (x) detection[1] (x) ...`.
///
/// Returns the unnormalized field `<chi|Psi>` and its squared norm, the
/// probability of that detection record. A zero-probability record yields a
/// field whose weights are all zero.
pub fn conditional_project(
    state: &AtomFieldState,
    detection: &[AtomState],
) -> Result<(CoherentSuperposition, f64)> {
    let n = state.num_atoms();
    if detection.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: detection.len(),
        });
    }
    let mut terms = Vec::new();
    for b in &state.branches {
        let amp = b
            .outcomes
            .iter()
            .zip(detection)
            .fold(b.weight, |acc, (&level, det)| {
                acc * det.amplitude(level).conj()
            });
        terms.extend(
            b.field
                .terms()
                .iter()
                .map(|t| Term::new(t.weight * amp, t.center)),
        );
    }
    let field = CoherentSuperposition::with_flag(terms, false);
    let p = field.norm_sqr().max(0.0);
    Ok((field, p))
}

/// Atom passes through the cavity and is then detected in `detection`.
pub fn detected_pass(
    field: &CoherentSuperposition,
    atom: &AtomState,
    detection: &AtomState,
    phi: f64,
    delta_tau: f64,
) -> (CoherentSuperposition, f64) {
    let state = dispersive_pass(field, atom, phi, delta_tau);
    conditional_project(&state, std::slice::from_ref(detection)).expect("one atom, one detection")
}

/// Every phase and amplitude of the two-atom sequence.
///
/// Atom A is prepared as `ramsey_atom(eta_a, theta_a)` and detected in
/// `ramsey_atom(eta_a_prime, theta_a_prime)`; likewise for B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub alpha: C64,
    pub phi: f64,
    pub phi_prime: f64,
    pub delta_tau: f64,
    pub delta_tau_prime: f64,
    pub eta_a: f64,
    pub theta_a: f64,
    pub eta_b: f64,
    pub theta_b: f64,
    pub eta_a_prime: f64,
    pub theta_a_prime: f64,
    pub eta_b_prime: f64,
    pub theta_b_prime: f64,
    /// Rotate the prepared field so that `alpha_0 = alpha e^{i pi/4}`, which
    /// makes the compass output `compass(alpha)` literally.
    pub align_alpha0: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self::compass(C64::new(1.0, 0.0))
    }
}

impl ProtocolConfig {
    /// Compass-preparing settings: `phi = pi/4`, `phi' = pi/2`, all
    /// detection phases zero, `theta_1 = pi/4`, `theta_2 = pi/2`.
    pub fn compass(alpha: C64) -> Self {
        Self {
            alpha,
            phi: FRAC_PI_4,
            phi_prime: FRAC_PI_2,
            delta_tau: 0.0,
            delta_tau_prime: 0.0,
            eta_a: 0.0,
            theta_a: FRAC_PI_4,
            eta_b: 0.0,
            theta_b: FRAC_PI_2,
            eta_a_prime: 0.0,
            theta_a_prime: 0.0,
            eta_b_prime: 0.0,
            theta_b_prime: 0.0,
            align_alpha0: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.phi,
            self.phi_prime,
            self.delta_tau,
            self.delta_tau_prime,
            self.eta_a,
            self.theta_a,
            self.eta_b,
            self.theta_b,
            self.eta_a_prime,
            self.theta_a_prime,
            self.eta_b_prime,
            self.theta_b_prime,
        ];
        if !self.alpha.is_finite() || all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite protocol parameter".into(),
            ));
        }
        Ok(())
    }

    pub fn eta1(&self) -> f64 {
        self.eta_a - self.eta_a_prime
    }
    pub fn eta2(&self) -> f64 {
        self.eta_b - self.eta_b_prime
    }
    pub fn theta1(&self) -> f64 {
        self.theta_a - self.theta_a_prime
    }
    pub fn theta2(&self) -> f64 {
        self.theta_b - self.theta_b_prime
    }

    /// Field amplitude after both free rotations, `alpha e^{-i delta tau - i delta tau'}`.
    pub fn alpha0(&self) -> C64 {
        self.alpha * C64::from_polar(1.0, -self.delta_tau - self.delta_tau_prime)
    }

    pub fn atom_a(&self) -> AtomState {
        ramsey_atom(self.eta_a, self.theta_a)
    }
    pub fn atom_b(&self) -> AtomState {
        ramsey_atom(self.eta_b, self.theta_b)
    }
    pub fn detection_a(&self) -> AtomState {
        ramsey_atom(self.eta_a_prime, self.theta_a_prime)
    }
    pub fn detection_b(&self) -> AtomState {
        ramsey_atom(self.eta_b_prime, self.theta_b_prime)
    }

    /// Every phase uniform in `[-pi, pi)`, both components of `alpha` uniform
    /// in `[-alpha_box, alpha_box)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, alpha_box: f64) -> Self {
        let alpha = C64::new(
            rng.gen_range(-alpha_box..alpha_box),
            rng.gen_range(-alpha_box..alpha_box),
        );
        let mut ang = || rng.gen_range(-PI..PI);
        Self {
            alpha,
            phi: ang(),
            phi_prime: ang(),
            delta_tau: ang(),
            delta_tau_prime: ang(),
            eta_a: ang(),
            theta_a: ang(),
            eta_b: ang(),
            theta_b: ang(),
            eta_a_prime: ang(),
            theta_a_prime: ang(),
            eta_b_prime: ang(),
            theta_b_prime: ang(),
            align_alpha0: true,
        }
    }

    /// Same config with the scanned phase differences `theta_1 - eta_1` and
    /// `theta_2 - eta_2` set to `d1`, `d2` (by moving `theta_A`, `theta_B`).
    pub fn with_phase_offsets(&self, d1: f64, d2: f64) -> Self {
        let mut c = *self;
        c.theta_a = self.theta_a_prime + self.eta1() + d1;
        c.theta_b = self.theta_b_prime + self.eta2() + d2;
        c
    }
}

/// Atoms A then B cross a cavity initially holding `|alpha>`.
pub fn two_atom_pass(config: &ProtocolConfig) -> AtomFieldState {
    AtomFieldState::from_field(CoherentSuperposition::coherent(config.alpha))
        .pass_atom(&config.atom_a(), config.phi, config.delta_tau)
        .pass_atom(&config.atom_b(), config.phi_prime, config.delta_tau_prime)
}

/// Field left after detecting A and B in the configured Ramsey states,
/// normalized, together with the detection probability.
pub fn prepare_field(config: &ProtocolConfig) -> Result<(CoherentSuperposition, f64)> {
    config.validate()?;
    let (field, p) = conditional_project(
        &two_atom_pass(config),
        &[config.detection_a(), config.detection_b()],
    )?;
    let mut field = normalize(&field)?;
    if config.align_alpha0 {
        field = field.rotated(FRAC_PI_4 + config.delta_tau + config.delta_tau_prime);
    }
    Ok((field, p))
}

/// Prepare the compass state; fails unless `phi = pi/4`, `phi' = pi/2`,
/// `theta_1 = eta_1 + pi/4` and `theta_2 = eta_2 + pi/2` (mod 2 pi).
pub fn make_compass(config: &ProtocolConfig) -> Result<CoherentSuperposition> {
    let checks = [
        ("phi = pi/4", config.phi - FRAC_PI_4),
        ("phi' = pi/2", config.phi_prime - FRAC_PI_2),
        (
            "theta_1 = eta_1 + pi/4",
            config.theta1() - config.eta1() - FRAC_PI_4,
        ),
        (
            "theta_2 = eta_2 + pi/2",
            config.theta2() - config.eta2() - FRAC_PI_2,
        ),
    ];
    for (name, residual) in checks {
        let r = wrap_angle(residual);
        if r.abs() > PHASE_CONDITION_TOLERANCE {
            return Err(Error::PhaseConditionViolated(format!(
                "{name} (off by {r:e} rad)"
            )));
        }
    }
    Ok(prepare_field(config)?.0)
}

/// Joint detection probability as the six-overlap interference sum
/// `1/4 + 1/8 Re sum_{j<k} e^{i(psi_k - psi_j)} <beta_j|beta_k>`.
///
/// The branch phases `psi` and centers `beta` are written out from the
/// Ramsey phases directly, independently of [`conditional_project`].
pub fn joint_probability(config: &ProtocolConfig) -> f64 {
    let (e1, e2, t1, t2) = (
        config.eta1(),
        config.eta2(),
        config.theta1(),
        config.theta2(),
    );
    let (p, q) = (config.phi, config.phi_prime);
    let a0 = config.alpha0();
    let phases = [e1 + e2 + p + q, e1 + t2 + p, t1 + e2 + q, t1 + t2];
    let centers = [
        a0 * C64::from_polar(1.0, p + q),
        a0 * C64::from_polar(1.0, p - q),
        a0 * C64::from_polar(1.0, -p + q),
        a0 * C64::from_polar(1.0, -p - q),
    ];
    let mut interference = 0.0;
    for j in 0..4 {
        for k in (j + 1)..4 {
            let z = C64::from_polar(1.0, phases[k] - phases[j]) * overlap(centers[k], centers[j]);
            interference += z.re;
        }
    }
    0.25 + 0.125 * interference
}

/// Probabilities of the four joint outcomes in the detection basis
/// `{|Phi'>, |Phi'_perp>}` per atom, ordered (++, +-, -+, --).
pub fn outcome_probabilities(config: &ProtocolConfig) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (i, (sa, sb)) in [(0.0, 0.0), (0.0, PI), (PI, 0.0), (PI, PI)]
        .into_iter()
        .enumerate()
    {
        let mut c = *config;
        c.eta_a_prime += sa;
        c.eta_b_prime += sb;
        out[i] = joint_probability(&c);
    }
    out
}

/// One sample of a fringe scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeSample {
    pub theta1: f64,
    pub theta2: f64,
    pub p: f64,
}

/// `P` over `(theta_1 - eta_1, theta_2 - eta_2)` on an `n x n` grid of `[0, 2 pi)`.
pub fn fringe_scan(config: &ProtocolConfig, n: usize) -> Vec<FringeSample> {
    let step = 2.0 * PI / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (d1, d2) = (i as f64 * step, j as f64 * step);
            out.push(FringeSample {
                theta1: d1,
                theta2: d2,
                p: joint_probability(&config.with_phase_offsets(d1, d2)),
            });
        }
    }
    out
}

/// Peak-to-trough spread of a fringe scan.
pub fn fringe_contrast(scan: &[FringeSample]) -> f64 {
    let max = scan.iter().map(|s| s.p).fold(f64::NEG_INFINITY, f64::max);
    let min = scan.iter().map(|s| s.p).fold(f64::INFINITY, f64::min);
    max - min
}

/// Single-atom detection probability
/// `|c_e d_e*|^2 + |c_g d_g*|^2 + 2 Re(c_g* d_g c_e d_e* e^{i phi} <a e^{-i(phi+dt)}|a e^{i(phi-dt)}>)`.
pub fn single_atom_fringe(
    c: &AtomState,
    detection: &AtomState,
    phi: f64,
    delta_tau: f64,
    alpha: C64,
) -> f64 {
    let ce_de = c.c_e * detection.c_e.conj();
    let cg_dg = c.c_g * detection.c_g.conj();
    let field_overlap = overlap(
        alpha * C64::from_polar(1.0, phi - delta_tau),
        alpha * C64::from_polar(1.0, -phi - delta_tau),
    );
    let cross = cg_dg.conj() * ce_de * C64::from_polar(1.0, phi) * field_overlap;
    ce_de.norm_sqr() + cg_dg.norm_sqr() + 2.0 * cross.re
}

/// An atom crosses undetected: returns the two field branches left behind,
/// `(p_e, field_e)` and `(p_g, field_g)`, each field normalized.
pub fn undetected_atom_pass(
    field: &CoherentSuperposition,
    atom: &AtomState,
    phi: f64,
    delta_t: f64,
) -> Result<Vec<(f64, CoherentSuperposition)>> {
    let state = dispersive_pass(field, atom, phi, delta_t);
    let total = state.norm_sqr();
    let mut out = Vec::with_capacity(2);
    for b in state.branches() {
        let branch = b.field.scaled(b.weight);
        let p = branch.norm_sqr() / total;
        if p > 0.0 {
            out.push((p, normalize(&branch)?));
        }
    }
    Ok(out)
}

/// Which kind of extra atom crosses undetected in the robustness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UndetectedAtom {
    /// Same preparation and phase as atom A, crossing after A.
    LikeA,
    /// Same preparation and phase as atom B, crossing between A and B.
    LikeB,
}

/// Result of the detection-efficiency check for one ensemble branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustBranch {
    pub probability: f64,
    /// Phase-space rotation of the compass this branch ends up in.
    pub rotation: f64,
    pub fidelity: f64,
}

/// Run A (detected), one undetected atom, then B (detected) and compare each
/// branch with the rotated compass `compass(alpha e^{i rotation})`.
pub fn undetected_robustness(
    config: &ProtocolConfig,
    extra: UndetectedAtom,
) -> Result<Vec<RobustBranch>> {
    config.validate()?;
    let field = CoherentSuperposition::coherent(config.alpha);
    let (after_a, _) = detected_pass(
        &field,
        &config.atom_a(),
        &config.detection_a(),
        config.phi,
        config.delta_tau,
    );
    let after_a = normalize(&after_a)?;
    let (atom, phi) = match extra {
        UndetectedAtom::LikeA => (config.atom_a(), config.phi),
        UndetectedAtom::LikeB => (config.atom_b(), config.phi_prime),
    };
    let mut out = Vec::new();
    for (probability, branch) in undetected_atom_pass(&after_a, &atom, phi, 0.0)? {
        let (after_b, _) = detected_pass(
            &branch,
            &config.atom_b(),
            &config.detection_b(),
            config.phi_prime,
            config.delta_tau_prime,
        );
        let after_b = normalize(&after_b)?;
        let c = after_b.terms()[0].center;
        let rotation = wrap_angle(c.arg() - config.alpha.arg());
        let target = CoherentSuperposition::compass(config.alpha * C64::from_polar(1.0, rotation));
        out.push(RobustBranch {
            probability,
            rotation,
            fidelity: fidelity(&after_b, &target),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_config(rng: &mut ChaCha8Rng) -> ProtocolConfig {
        ProtocolConfig::random(rng, 2.0)
    }

    #[test]
    fn phi_from_physical_examples() {
        assert_eq!(phi_from_physical(1.0, 1.0, 4.0).unwrap(), 0.25);
        assert_eq!(phi_from_physical(3.0, 0.0, 2.0).unwrap(), 0.0);
        assert_eq!(phi_from_physical(1.0, 1.0, 0.0), Err(Error::ZeroDetuning));
        let g = 2.0 * PI * 50e3;
        let delta = 20.0 * g;
        let tau = tau_for_phase(FRAC_PI_4, g, delta).unwrap();
        assert!((phi_from_physical(g, tau, delta).unwrap() - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn ramsey_examples() {
        let a = ramsey_atom(0.0, 0.0);
        assert!((a.c_e - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert!((a.c_g - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        let a = ramsey_atom(PI, 0.0);
        assert!((a.c_e - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        for (e, t) in [(0.3, 2.1), (-1.0, 5.0)] {
            assert!((ramsey_atom(e, t).norm_sqr() - 1.0).abs() < 1e-15);
        }
        assert!(AtomState::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn dispersive_pass_pure_atoms() {
        let alpha = c(1.2, -0.4);
        let phi = 0.37;
        let field = CoherentSuperposition::coherent(alpha);
        let s = dispersive_pass(&field, &AtomState::ground(), phi, 0.0);
        let g = &s.branches()[1];
        assert_eq!(g.outcomes, vec![AtomLevel::Ground]);
        assert!((g.field.terms()[0].center - alpha * C64::from_polar(1.0, -phi)).norm() < 1e-15);
        assert_eq!(s.branches()[0].weight, c(0.0, 0.0));

        let s = dispersive_pass(&field, &AtomState::excited(), phi, 0.0);
        let e = &s.branches()[0];
        assert!((e.weight - C64::from_polar(1.0, phi)).norm() < 1e-15);
        assert!((e.field.terms()[0].center - alpha * C64::from_polar(1.0, phi)).norm() < 1e-15);
    }

    #[test]
    fn dispersive_pass_reproduces_entangled_output() {
        let (alpha, phi, dt) = (c(0.8, 0.5), 0.6, 1.3);
        let atom = ramsey_atom(0.4, -0.9);
        let s = dispersive_pass(&CoherentSuperposition::coherent(alpha), &atom, phi, dt);
        let e = &s.branches()[0];
        let g = &s.branches()[1];
        assert!((e.weight - atom.c_e * C64::from_polar(1.0, phi)).norm() < 1e-15);
        assert!(
            (e.field.terms()[0].center - alpha * C64::from_polar(1.0, phi - dt)).norm() < 1e-15
        );
        assert!((g.weight - atom.c_g).norm() < 1e-15);
        assert!(
            (g.field.terms()[0].center - alpha * C64::from_polar(1.0, -phi - dt)).norm() < 1e-15
        );
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_atom_centers() {
        let mut cfg = ProtocolConfig::compass(c(1.0, 0.5));
        cfg.phi = 0.0;
        cfg.phi_prime = 0.0;
        let s = two_atom_pass(&cfg);
        for b in s.branches() {
            assert!((b.field.terms()[0].center - cfg.alpha0()).norm() < 1e-15);
            let expected = b
                .outcomes
                .iter()
                .zip([cfg.atom_a(), cfg.atom_b()])
                .fold(c(1.0, 0.0), |acc, (&l, a)| acc * a.amplitude(l));
            assert!((b.weight - expected).norm() < 1e-15);
        }

        let cfg = ProtocolConfig::compass(c(1.5, 0.0));
        let s = two_atom_pass(&cfg);
        let a0 = cfg.alpha0();
        let expected = [3.0 * FRAC_PI_4, -FRAC_PI_4, FRAC_PI_4, -3.0 * FRAC_PI_4];
        for (b, ang) in s.branches().iter().zip(expected) {
            assert!((b.field.terms()[0].center - a0 * C64::from_polar(1.0, ang)).norm() < 1e-14);
        }
    }

    #[test]
    fn random_two_atom_pass_has_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let cfg = random_config(&mut rng);
            assert!((two_atom_pass(&cfg).norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_on_excited_collapses_field() {
        let (alpha, phi, dt) = (c(1.1, 0.0), 0.7, 0.2);
        let atom = ramsey_atom(0.3, 1.0);
        let s = dispersive_pass(&CoherentSuperposition::coherent(alpha), &atom, phi, dt);
        let (f, p) = conditional_project(&s, &[AtomState::excited()]).unwrap();
        assert!((p - atom.c_e.norm_sqr()).abs() < 1e-15);
        let target = CoherentSuperposition::coherent(alpha * C64::from_polar(1.0, phi - dt));
        assert!((fidelity(&normalize(&f).unwrap(), &target) - 1.0).abs() < 1e-14);
        assert!(matches!(
            conditional_project(&s, &[AtomState::excited(), AtomState::ground()]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn compass_configuration_gives_eq21_form() {
        // literal four-term form with generic Ramsey phases, alpha_0 = alpha e^{i pi/4}
        let alpha = c(1.3, 0.2);
        let mut cfg = ProtocolConfig::compass(alpha);
        cfg.delta_tau = -FRAC_PI_4;
        cfg.align_alpha0 = false;
        (cfg.eta_a, cfg.theta_a, cfg.eta_b, cfg.theta_b) = (0.3, -1.1, 0.8, 2.0);
        (
            cfg.eta_a_prime,
            cfg.theta_a_prime,
            cfg.eta_b_prime,
            cfg.theta_b_prime,
        ) = (0.1, 0.5, -0.4, 0.9);
        let (e1, e2, t1, t2) = (cfg.eta1(), cfg.eta2(), cfg.theta1(), cfg.theta2());
        let i = c(0.0, 1.0);
        let literal = CoherentSuperposition::from_pairs(&[
            (C64::from_polar(0.25, e1 + e2 + 3.0 * FRAC_PI_4), -alpha),
            (C64::from_polar(0.25, e1 + t2 + FRAC_PI_4), alpha),
            (C64::from_polar(0.25, t1 + e2 + FRAC_PI_2), i * alpha),
            (C64::from_polar(0.25, t1 + t2), -i * alpha),
        ])
        .unwrap();
        let (f, p) = conditional_project(
            &two_atom_pass(&cfg),
            &[cfg.detection_a(), cfg.detection_b()],
        )
        .unwrap();
        assert!((p - literal.norm_sqr()).abs() < 1e-14);
        assert!((f.inner(&literal) - c(literal.norm_sqr(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn completeness_over_joint_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let cfg = random_config(&mut rng);
            let s = two_atom_pass(&cfg);
            let (a, b) = (cfg.detection_a(), cfg.detection_b());
            let mut total = 0.0;
            for da in [a, a.orthogonal()] {
                for db in [b, b.orthogonal()] {
                    total += conditional_project(&s, &[da, db]).unwrap().1;
                }
            }
            assert!((total - 1.0).abs() < 1e-10);
            assert!((outcome_probabilities(&cfg).iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn make_compass_examples() {
        for alpha in [c(1.0, 0.0), c(2.0, 1.0)] {
            let s = make_compass(&ProtocolConfig::compass(alpha)).unwrap();
            assert!((fidelity(&s, &CoherentSuperposition::compass(alpha)) - 1.0).abs() < 1e-10);
        }
        let mut bad = ProtocolConfig::compass(c(1.0, 0.0));
        bad.theta_a = bad.eta_a; // theta_1 = eta_1
        assert!(matches!(
            make_compass(&bad),
            Err(Error::PhaseConditionViolated(_))
        ));
        let (f, _) = prepare_field(&bad).unwrap();
        assert!(fidelity(&f, &CoherentSuperposition::compass(c(1.0, 0.0))) < 1.0 - 1e-3);
    }

    #[test]
    fn make_compass_with_free_rotation_and_ramsey_offsets() {
        let mut cfg = ProtocolConfig::compass(c(0.7, -1.4));
        cfg.delta_tau = 0.9;
        cfg.delta_tau_prime = -2.3;
        cfg.eta_a = 0.4;
        cfg.theta_a = 0.4 + FRAC_PI_4 + 2.0 * PI;
        cfg.eta_b_prime = 1.1;
        cfg.theta_b_prime = 1.1;
        cfg.eta_b = 2.2;
        cfg.theta_b = 2.2 + FRAC_PI_2;
        let s = make_compass(&cfg).unwrap();
        assert!((fidelity(&s, &CoherentSuperposition::compass(cfg.alpha)) - 1.0).abs() < 1e-10);
    }

    /// The six-overlap sum written exactly as printed for phi = pi/4,
    /// phi' = pi/2 and alpha_0 = alpha e^{i pi/4}.
    fn six_overlap_closed_form(alpha: C64, e1: f64, e2: f64, t1: f64, t2: f64) -> f64 {
        let i = c(0.0, 1.0);
        let ov = |a: C64, b: C64| overlap(b, a); // <a|b>
        let e = |x: f64| C64::from_polar(1.0, x);
        let s = e(t2 - e2 - FRAC_PI_2) * ov(-alpha, alpha)
            + e(t1 - e1 - FRAC_PI_4) * ov(-alpha, i * alpha)
            + e(t1 + t2 - e1 - e2 - 3.0 * FRAC_PI_4) * ov(-alpha, -i * alpha)
            + e(t1 - e1 - FRAC_PI_4) * ov(alpha, -i * alpha)
            + e(t1 + e2 - e1 - t2 + FRAC_PI_4) * ov(alpha, i * alpha)
            + e(t2 - e2 - FRAC_PI_2) * ov(i * alpha, -i * alpha);
        0.25 + 0.125 * s.re
    }

    #[test]
    fn joint_probability_matches_printed_six_overlap_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let alpha = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let mut cfg = ProtocolConfig::compass(alpha);
            cfg.delta_tau = -FRAC_PI_4;
            cfg.theta_a = rng.gen_range(-PI..PI);
            cfg.theta_b = rng.gen_range(-PI..PI);
            cfg.eta_a = rng.gen_range(-PI..PI);
            cfg.eta_b_prime = rng.gen_range(-PI..PI);
            let lit =
                six_overlap_closed_form(alpha, cfg.eta1(), cfg.eta2(), cfg.theta1(), cfg.theta2());
            assert!((joint_probability(&cfg) - lit).abs() < 1e-13);
        }
    }

    #[test]
    fn joint_probability_equals_projected_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let cfg = random_config(&mut rng);
            let (_, p) = conditional_project(
                &two_atom_pass(&cfg),
                &[cfg.detection_a(), cfg.detection_b()],
            )
            .unwrap();
            let q = joint_probability(&cfg);
            assert!((p - q).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&q));
        }
    }

    #[test]
    fn joint_probability_at_vacuum() {
        // all overlaps are 1: P = |1/4 sum_j e^{i psi_j}|^2
        let mut cfg = ProtocolConfig::compass(c(0.0, 0.0));
        cfg.theta_a = 0.3;
        cfg.theta_b = -1.2;
        let (e1, e2, t1, t2) = (cfg.eta1(), cfg.eta2(), cfg.theta1(), cfg.theta2());
        let s: C64 = [
            e1 + e2 + 3.0 * FRAC_PI_4,
            e1 + t2 + FRAC_PI_4,
            t1 + e2 + FRAC_PI_2,
            t1 + t2,
        ]
        .iter()
        .map(|&x| C64::from_polar(0.25, x))
        .sum();
        assert!((joint_probability(&cfg) - s.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn global_phase_shift_of_atom_a_is_invisible() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let cfg = random_config(&mut rng);
            let mut shifted = cfg;
            let k = rng.gen_range(-PI..PI);
            shifted.eta_a += k;
            shifted.eta_a_prime += k;
            assert!((joint_probability(&cfg) - joint_probability(&shifted)).abs() < 1e-12);
        }
    }

    #[test]
    fn fringe_contrast_drops_with_amplitude() {
        let small = fringe_contrast(&fringe_scan(&ProtocolConfig::compass(c(1.0, 0.0)), 64));
        let large = fringe_contrast(&fringe_scan(&ProtocolConfig::compass(c(3.0, 0.0)), 64));
        assert!(small > large, "{small} vs {large}");
        assert!(small > 0.1);
    }

    #[test]
    fn single_atom_fringe_examples() {
        // alpha = 0, phi = 0: plain Ramsey fringe cos^2(theta/2)
        for theta in [0.0, 0.7, 2.0, PI] {
            let p = single_atom_fringe(
                &ramsey_atom(0.0, theta),
                &ramsey_atom(0.0, 0.0),
                0.0,
                0.0,
                c(0.0, 0.0),
            );
            assert!((p - (theta / 2.0).cos().powi(2)).abs() < 1e-15);
        }
        let (a, d) = (ramsey_atom(0.2, 1.0), ramsey_atom(-0.5, 0.3));
        let prod = (a.c_g.conj() * d.c_g * a.c_e * d.c_e.conj()).norm();
        assert!((prod - 0.25).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let a = ramsey_atom(rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            let d = AtomState::new(
                C64::from_polar(0.6, 0.3),
                C64::from_polar(0.8, rng.gen_range(-PI..PI)),
            )
            .unwrap();
            let (phi, dt) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
            let alpha = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (_, p) = detected_pass(&CoherentSuperposition::coherent(alpha), &a, &d, phi, dt);
            assert!((single_atom_fringe(&a, &d, phi, dt, alpha) - p).abs() < 1e-13);
        }
    }

    #[test]
    fn undetected_atom_examples() {
        let field = CoherentSuperposition::cat(c(1.0, 0.3));
        let dt = 0.8;
        let branches = undetected_atom_pass(&field, &ramsey_atom(0.1, 0.2), 0.0, dt).unwrap();
        assert_eq!(branches.len(), 2);
        for (_, f) in &branches {
            assert!((fidelity(f, &field.rotated(-dt)) - 1.0).abs() < 1e-14);
        }
        let field = CoherentSuperposition::coherent(c(4.0, 0.0));
        let branches =
            undetected_atom_pass(&field, &ramsey_atom(0.0, 0.0), FRAC_PI_4, 0.0).unwrap();
        let ps: Vec<f64> = branches.iter().map(|b| b.0).collect();
        assert!((ps.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ps.iter().all(|p| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn undetected_atom_leaves_rotated_compass() {
        for extra in [UndetectedAtom::LikeA, UndetectedAtom::LikeB] {
            for alpha in [c(1.0, 0.0), c(2.0, -1.0)] {
                let out = undetected_robustness(&ProtocolConfig::compass(alpha), extra).unwrap();
                assert_eq!(out.len(), 2);
                for b in out {
                    assert!((b.fidelity - 1.0).abs() < 1e-10, "{extra:?} {alpha} {b:?}");
                }
            }
        }
    }
}
