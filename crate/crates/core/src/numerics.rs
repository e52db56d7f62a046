//! Truncated Fock-space oracles.
//!
//! Nothing in here shares code with the closed-form modules beyond the state
//! containers: the Jaynes-Cummings propagator diagonalises each excitation
//! manifold exactly, the Lindblad integrator is a fixed-step RK4 on the full
//! density matrix, and displacement matrices come from the normalized
//! associated-Laguerre recurrence along each diagonal.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::math::ln_factorials;
use crate::protocol::{dispersive_pass, AtomState};
use crate::states::{to_fock, CoherentSuperposition, DensityMatrixFock, FockVector};
use crate::{Error, Result, C64};

/// Population allowed in states the truncated propagator cannot represent.
pub const EDGE_POPULATION_TOLERANCE: f64 = 1e-14;
/// Largest `kappa * dt * cutoff` accepted by [`lindblad_rk4`]; RK4 on the
/// damping spectrum `-kappa (m + n) / 2` is stable below ~2.78.
pub const RK4_STABILITY_LIMIT: f64 = 2.5;
/// Largest trace drift tolerated over a single RK4 step.
pub const RK4_TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Atom (x) field state as two number-basis rows, `|e, n>` and `|g, n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub excited: Vec<C64>,
    pub ground: Vec<C64>,
}

impl JointState {
    pub fn product(field: &FockVector, atom: &AtomState) -> Self {
        Self {
            excited: field.amplitudes().iter().map(|a| atom.c_e * a).collect(),
            ground: field.amplitudes().iter().map(|a| atom.c_g * a).collect(),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.ground.len() - 1
    }

    pub fn excited_population(&self) -> f64 {
        self.excited.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn ground_population(&self) -> f64 {
        self.ground.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.excited_population() + self.ground_population()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        let e: C64 = self
            .excited
            .iter()
            .zip(&other.excited)
            .map(|(a, b)| a.conj() * b)
            .sum();
        let g: C64 = self
            .ground
            .iter()
            .zip(&other.ground)
            .map(|(a, b)| a.conj() * b)
            .sum();
        e + g
    }

    /// `|<self|other>|^2 / (|self|^2 |other|^2)`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }
}

/// Exact evolution under `delta a^dag a + g (|e><g| a + |g><e| a^dag)` for time `tau`.
///
/// The Hamiltonian couples `|e, k-1>` and `|g, k>` only, so each manifold is
/// a 2x2 block exponentiated in closed form. The topmost `|e, cutoff>`
/// partners a state outside the space; it must start (numerically) empty.
pub fn jc_propagate(
    field: &FockVector,
    atom: &AtomState,
    g: f64,
    delta: f64,
    tau: f64,
) -> Result<JointState> {
    jc_propagate_joint(&JointState::product(field, atom), g, delta, tau)
}

/// [`jc_propagate`] for an arbitrary (possibly entangled) initial state.
pub fn jc_propagate_joint(state: &JointState, g: f64, delta: f64, tau: f64) -> Result<JointState> {
    let cutoff = state.cutoff();
    let edge = state.excited[cutoff].norm_sqr();
    if edge > EDGE_POPULATION_TOLERANCE {
        return Err(Error::CutoffTooSmall {
            cutoff,
            retained: 1.0 - edge,
            lost: edge,
        });
    }
    let mut out = JointState {
        excited: vec![C64::new(0.0, 0.0); cutoff + 1],
        ground: vec![C64::new(0.0, 0.0); cutoff + 1],
    };
    // |g, 0> is a dark state with zero energy.
    out.ground[0] = state.ground[0];
    for k in 1..=cutoff {
        let (ce, cg) = (state.excited[k - 1], state.ground[k]);
        let coupling = g * (k as f64).sqrt();
        let omega = (0.25 * delta * delta + coupling * coupling).sqrt();
        let global = C64::from_polar(1.0, -delta * (k as f64 - 0.5) * tau);
        let cos = (omega * tau).cos();
        // sin(omega tau) / omega, continuous at omega -> 0
        let sinc = if omega * tau.abs() < 1e-12 {
            tau
        } else {
            (omega * tau).sin() / omega
        };
        let mi = C64::new(0.0, -1.0);
        // exp(-i B tau) = cos I - i sinc B, with B = [[-delta/2, c], [c, delta/2]]
        let u_ee = cos + mi * sinc * (-0.5 * delta);
        let u_gg = cos + mi * sinc * (0.5 * delta);
        let u_eg = mi * sinc * coupling;
        out.excited[k - 1] = global * (u_ee * ce + u_eg * cg);
        out.ground[k] = global * (u_eg * ce + u_gg * cg);
    }
    out.excited[cutoff] =
        state.excited[cutoff] * C64::from_polar(1.0, -delta * cutoff as f64 * tau);
    Ok(out)
}

/// Joint state predicted by the effective dispersive map, in number basis.
pub fn dispersive_map_fock(
    field: &CoherentSuperposition,
    atom: &AtomState,
    phi: f64,
    delta_tau: f64,
    cutoff: usize,
) -> Result<JointState> {
    let state = dispersive_pass(field, atom, phi, delta_tau);
    let mut rows = [
        vec![C64::new(0.0, 0.0); cutoff + 1],
        vec![C64::new(0.0, 0.0); cutoff + 1],
    ];
    for b in state.branches() {
        let row = match b.outcomes[0] {
            crate::protocol::AtomLevel::Excited => 0,
            crate::protocol::AtomLevel::Ground => 1,
        };
        let v = to_fock(&b.field.scaled(b.weight), cutoff).or_else(|e| match e {
            // a branch with zero weight has nothing to truncate
            Error::CutoffTooSmall { .. } if b.weight.norm() == 0.0 => Ok(
                crate::states::to_fock_unchecked(&b.field.scaled(b.weight), cutoff),
            ),
            other => Err(other),
        })?;
        for (dst, a) in rows[row].iter_mut().zip(v.amplitudes()) {
            *dst += a;
        }
    }
    let [excited, ground] = rows;
    Ok(JointState { excited, ground })
}

/// Infidelity between exact JC evolution and the effective dispersive map
/// for a coherent field `|alpha>`, coupling `g`, detuning `delta`, and an
/// interaction time chosen so that `g^2 tau / delta = phi`.
pub fn dispersive_infidelity(
    alpha: C64,
    atom: &AtomState,
    g: f64,
    delta: f64,
    phi: f64,
) -> Result<f64> {
    let tau = crate::protocol::tau_for_phase(phi, g, delta)?;
    let field = CoherentSuperposition::coherent(alpha);
    let cutoff = field.default_cutoff();
    let exact = jc_propagate(&to_fock(&field, cutoff)?, atom, g, delta, tau)?;
    let effective = dispersive_map_fock(&field, atom, phi, delta * tau, cutoff)?;
    Ok(1.0 - exact.fidelity(&effective))
}

/// Default RK4 step: `kappa dt = min(1e-3, kappa t / 1000)`.
pub fn default_lindblad_step(kappa: f64, t: f64) -> f64 {
    if kappa <= 0.0 {
        return t.max(f64::MIN_POSITIVE);
    }
    (1e-3 / kappa).min(t / 1000.0)
}

/// `d rho / dt = -(kappa/2)(n rho + rho n - 2 a rho a^dag)` elementwise.
fn damping_rhs(rho: &DMatrix<C64>, kappa: f64, sqrt_n: &[f64]) -> DMatrix<C64> {
    let d = rho.nrows();
    DMatrix::from_fn(d, d, |m, n| {
        let mut v = rho[(m, n)] * ((m + n) as f64);
        if m + 1 < d && n + 1 < d {
            v -= rho[(m + 1, n + 1)] * (2.0 * sqrt_n[m + 1] * sqrt_n[n + 1]);
        }
        v * (-0.5 * kappa)
    })
}

/// Fixed-step RK4 integration of zero-temperature amplitude damping.
///
/// The number of steps is `ceil(t / dt)`, with the step shrunk to land on
/// `t` exactly. The state is re-symmetrised after each step.
pub fn lindblad_rk4(
    rho0: &DensityMatrixFock,
    kappa: f64,
    t: f64,
    dt: f64,
) -> Result<DensityMatrixFock> {
    if !(kappa >= 0.0 && t >= 0.0 && kappa.is_finite() && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa={kappa}, t={t}")));
    }
    if t == 0.0 || kappa == 0.0 {
        return Ok(rho0.clone());
    }
    if !(dt > 0.0) || dt > t {
        return Err(Error::InvalidParameter(format!(
            "step dt={dt} must lie in (0, t={t}]"
        )));
    }
    let steps = (t / dt).ceil() as usize;
    let h = t / steps as f64;
    let cutoff = rho0.cutoff();
    if kappa * h * cutoff as f64 > RK4_STABILITY_LIMIT {
        return Err(Error::StepTooLarge(format!(
            "kappa*dt*cutoff = {}",
            kappa * h * cutoff as f64
        )));
    }
    let sqrt_n: Vec<f64> = (0..=cutoff).map(|n| (n as f64).sqrt()).collect();
    let f = |r: &DMatrix<C64>| damping_rhs(r, kappa, &sqrt_n);
    let half = C64::new(0.5 * h, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut rho = rho0.matrix().clone();
    for _ in 0..steps {
        let tr_before = rho.trace();
        let k1 = f(&rho);
        let k2 = f(&(&rho + &k1 * half));
        let k3 = f(&(&rho + &k2 * half));
        let k4 = f(&(&rho + &k3 * full));
        rho += (k1 + k2 * two + k3 * two + k4) * sixth;
        rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let drift = (rho.trace() - tr_before).norm();
        if !(drift <= RK4_TRACE_DRIFT_LIMIT) {
            return Err(Error::StepTooLarge(format!(
                "trace drift {drift:e} in one step"
            )));
        }
    }
    DensityMatrixFock::new(rho)
}

/// `<m|D(gamma)|n>` for `m <= rows - 1`, `n <= cols - 1`.
///
/// Along each diagonal `m - n = k` the entries are
/// `f_n = sqrt(n!/(n+k)!) |g|^k e^{-|g|^2/2} L_n^(k)(|g|^2)` times a phase
/// (`e^{ik arg g}` below the diagonal, `(-e^{-i arg g})^k` above). `f_n` obeys
/// the normalized Laguerre recurrence
/// `f_{n+1} = ((2n+1+k-x) f_n - sqrt(n(n+k)) f_{n-1}) / sqrt((n+1)(n+k+1))`,
/// run with an explicit log scale so that tiny starting values do not
/// underflow. Entries do not depend on the truncation of the other axis.
pub fn displacement_block(gamma: C64, rows: usize, cols: usize) -> DMatrix<C64> {
    let mut d = DMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    let r = gamma.norm();
    let theta = gamma.arg();
    if r == 0.0 {
        for k in 0..rows.min(cols) {
            d[(k, k)] = C64::new(1.0, 0.0);
        }
        return d;
    }
    let x = r * r;
    let lf = ln_factorials(rows.max(cols));
    let ln_r = r.ln();
    let kmax = rows.max(cols) - 1;
    for k in 0..=kmax {
        let below = C64::from_polar(1.0, k as f64 * theta);
        let above = C64::from_polar(1.0, k as f64 * (PI - theta));
        // diagonal k reaches n <= len - 1 in either triangle
        let len_below = if k < rows { (rows - k).min(cols) } else { 0 };
        let len_above = if k < cols { (cols - k).min(rows) } else { 0 };
        let len = len_below.max(len_above);
        if len == 0 {
            continue;
        }
        let kf = k as f64;
        // f values are stored as (mantissa, log scale): value = m * e^{s}
        let mut scale = -0.5 * x + kf * ln_r - 0.5 * lf[k];
        let mut prev = 0.0;
        let mut cur = 1.0;
        for n in 0..len {
            let value = cur * scale.exp();
            if n < len_below {
                d[(n + k, n)] = below * value;
            }
            if k > 0 && n < len_above {
                d[(n, n + k)] = above * value;
            }
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0 + kf - x) * cur - (nf * (nf + kf)).sqrt() * prev)
                / ((nf + 1.0) * (nf + kf + 1.0)).sqrt();
            prev = cur;
            cur = next;
            let big = cur.abs().max(prev.abs());
            if big > 1e100 || (big < 1e-100 && big > 0.0) {
                scale += big.ln();
                prev /= big;
                cur /= big;
            }
        }
    }
    d
}

/// Square displacement matrix on the space `n <= cutoff`.
pub fn displacement_matrix(gamma: C64, cutoff: usize) -> DMatrix<C64> {
    displacement_block(gamma, cutoff + 1, cutoff + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::ramsey_atom;
    use crate::states::CoherentSuperposition;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Generalized Laguerre polynomial by explicit finite sum.
    fn laguerre(n: usize, k: usize, x: f64) -> f64 {
        let binom = |a: usize, b: usize| -> f64 {
            (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64)
        };
        let mut s = 0.0;
        let mut fact = 1.0;
        for i in 0..=n {
            if i > 0 {
                fact *= i as f64;
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * binom(n + k, n - i) * x.powi(i as i32) / fact;
        }
        s
    }

    #[test]
    fn displacement_matches_laguerre_closed_form() {
        let gamma = c(0.6, -0.45);
        let d = displacement_matrix(gamma, 12);
        let x = gamma.norm_sqr();
        let fact = |n: usize| (1..=n).fold(1.0, |a, k| a * k as f64);
        for m in 0..=12 {
            for n in 0..=12 {
                let expected = if m >= n {
                    (fact(n) / fact(m)).sqrt()
                        * gamma.powu((m - n) as u32)
                        * (-0.5 * x).exp()
                        * laguerre(n, m - n, x)
                } else {
                    (fact(m) / fact(n)).sqrt()
                        * (-gamma.conj()).powu((n - m) as u32)
                        * (-0.5 * x).exp()
                        * laguerre(m, n - m, x)
                };
                assert!(
                    (d[(m, n)] - expected).norm() < 1e-13,
                    "({m},{n}) {} vs {}",
                    d[(m, n)],
                    expected
                );
            }
        }
    }

    #[test]
    fn displacement_identity_and_first_column() {
        let d = displacement_matrix(c(0.0, 0.0), 8);
        assert_eq!(d, DMatrix::identity(9, 9));
        let gamma = c(1.2, 0.7);
        let d = displacement_matrix(gamma, 30);
        let v = to_fock(&CoherentSuperposition::coherent(gamma), 30).unwrap();
        for (m, a) in v.amplitudes().iter().enumerate() {
            assert!((d[(m, 0)] - a).norm() < 1e-14);
        }
    }

    #[test]
    fn displacement_inverse_and_isometry() {
        let cutoff = 90;
        let gamma = c(2.1, -1.5); // |gamma| = 2.58 < sqrt(90)/3 = 3.16
        let big = cutoff + 120;
        let plus = displacement_block(gamma, big + 1, big + 1);
        let minus = displacement_block(-gamma, big + 1, big + 1);
        let prod = &plus * &minus;
        for m in 0..=cutoff {
            for n in 0..=cutoff {
                let target = if m == n { 1.0 } else { 0.0 };
                assert!((prod[(m, n)] - c(target, 0.0)).norm() < 1e-8, "({m},{n})");
            }
        }
        let tall = displacement_block(gamma, big + 1, cutoff + 1);
        let gram = tall.adjoint() * &tall;
        assert!((gram - DMatrix::<C64>::identity(cutoff + 1, cutoff + 1)).camax() < 1e-8);
    }

    #[test]
    fn jc_free_evolution() {
        let alpha = c(1.0, 0.5);
        let v = to_fock(&CoherentSuperposition::coherent(alpha), 40).unwrap();
        let (delta, tau) = (0.7, 1.9);
        let out = jc_propagate(&v, &AtomState::ground(), 0.0, delta, tau).unwrap();
        for (n, (a, b)) in out.ground.iter().zip(v.amplitudes()).enumerate() {
            assert!((a - b * C64::from_polar(1.0, -(n as f64) * delta * tau)).norm() < 1e-14);
        }
    }

    #[test]
    fn jc_single_manifold_rabi() {
        let v = FockVector::number_state(1, 5).unwrap();
        let (g, tau) = (1.3, 0.77);
        let out = jc_propagate(&v, &AtomState::ground(), g, 0.0, tau).unwrap();
        assert!((out.ground[1] - c((g * tau).cos(), 0.0)).norm() < 1e-15);
        assert!((out.excited[0] - c(0.0, -(g * tau).sin())).norm() < 1e-15);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn jc_conserves_norm_and_manifolds() {
        let field = to_fock(&CoherentSuperposition::compass(c(2.0, 0.0)), 50).unwrap();
        let out = jc_propagate(&field, &ramsey_atom(0.3, 1.1), 0.8, 0.4, 3.7).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        // excitation number n + [e] is conserved: compass support n = 4p
        // means |e, n> only for n = 4p - 1 and |g, n> for n = 4p, plus the
        // initial e-component at 4p which maps to manifold 4p + 1.
        for n in 0..=50 {
            let ok_g = n % 4 == 0 || n % 4 == 1;
            let ok_e = n % 4 == 3 || n % 4 == 0;
            if !ok_g {
                assert!(out.ground[n].norm() < 1e-14);
            }
            if !ok_e {
                assert!(out.excited[n].norm() < 1e-14);
            }
        }
    }

    #[test]
    fn jc_rejects_populated_edge() {
        let v = FockVector::number_state(5, 5).unwrap();
        assert!(matches!(
            jc_propagate(&v, &AtomState::excited(), 1.0, 0.0, 1.0),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn dispersive_limit_is_approached() {
        let atom = ramsey_atom(0.0, 0.0);
        let g = 1.0;
        let inf20 = dispersive_infidelity(c(1.0, 0.0), &atom, g, 20.0, PI / 8.0).unwrap();
        assert!(inf20 < 1e-2, "{inf20}");
        let inf40 = dispersive_infidelity(c(1.0, 0.0), &atom, g, 40.0, PI / 8.0).unwrap();
        assert!(inf40 < inf20);
    }

    #[test]
    fn lindblad_vacuum_is_dark() {
        let rho = DensityMatrixFock::vacuum(10);
        let out = lindblad_rk4(&rho, 1.0, 0.5, 1e-3).unwrap();
        assert!(out.trace_distance(&rho).unwrap() < 1e-15);
    }

    #[test]
    fn lindblad_coherent_state_stays_coherent() {
        let alpha = c(1.5, -0.5);
        let cutoff = 40;
        let rho0 = DensityMatrixFock::from_pure(
            &to_fock(&CoherentSuperposition::coherent(alpha), cutoff).unwrap(),
        );
        let (kappa, t) = (2.0, 0.4);
        let out = lindblad_rk4(&rho0, kappa, t, default_lindblad_step(kappa, t)).unwrap();
        let at = alpha * (-0.5 * kappa * t).exp();
        let target = DensityMatrixFock::from_pure(
            &to_fock(&CoherentSuperposition::coherent(at), cutoff).unwrap(),
        );
        assert!(out.trace_distance(&target).unwrap() < 1e-6);
        assert!((out.trace().re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn lindblad_rejects_unstable_step() {
        let rho = DensityMatrixFock::vacuum(50);
        assert!(matches!(
            lindblad_rk4(&rho, 1.0, 1.0, 0.5),
            Err(Error::StepTooLarge(_))
        ));
        assert!(lindblad_rk4(&rho, 1.0, 1.0, 2.0).is_err());
    }
}
