//! End-to-end acceptance checks.
//!
//! Each criterion returns a [`CriterionOutcome`] with a one-line verdict and
//! the measured quantities, so the same code backs the `acceptance` test
//! target and the CLI `selftest` command. Random inputs come from fixed
//! seeds.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decoherence::{
    coherence_factor, compass_lifetime, decohere, lifetime_correction_bound, rk4_trace_distance,
    DecayParams,
};
use crate::numerics::{dispersive_infidelity, jc_propagate};
use crate::probe::{compare_revivals, resonant_detection_probs};
use crate::protocol::{
    conditional_project, fringe_contrast, fringe_scan, joint_probability, make_compass,
    outcome_probabilities, ramsey_atom, two_atom_pass, undetected_robustness, AtomState,
    ProtocolConfig, UndetectedAtom,
};
use crate::states::{fidelity, normalize, to_fock, CoherentSuperposition, Term};
use crate::wigner::{
    central_tile_metrics, integrate_grid, wigner_compass, wigner_grid, FockWigner, GridSpec,
    PureWigner,
};
use crate::{Result, C64};

/// Verdict for one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_s: f64,
    pub time_limit_s: Option<f64>,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let limit = self
            .time_limit_s
            .map(|l| format!(" / {l:.0} s"))
            .unwrap_or_default();
        format!(
            "[{verdict}] {:>2} {} ({:.2} s{limit}): {}",
            self.id, self.title, self.elapsed_s, self.detail
        )
    }
}

fn timed(
    id: u8,
    title: &'static str,
    time_limit_s: Option<f64>,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionOutcome {
    let start = Instant::now();
    let result = body();
    let elapsed_s = start.elapsed().as_secs_f64();
    let (ok, detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let in_time = time_limit_s.is_none_or(|l| elapsed_s <= l);
    let detail = if in_time {
        detail
    } else {
        format!("{detail}; too slow")
    };
    CriterionOutcome {
        id,
        title,
        passed: ok && in_time,
        detail,
        elapsed_s,
        time_limit_s,
    }
}

fn random_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.gen_range(0.0f64..1.0).sqrt();
    C64::from_polar(r, rng.gen_range(-PI..PI))
}

/// Compass preparation with random Ramsey reference phases.
pub fn compass_preparation() -> CriterionOutcome {
    timed(1, "compass preparation exactness", Some(1.0), || {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let alpha = random_in_disk(&mut rng, 4.0);
            let mut cfg = ProtocolConfig::compass(alpha);
            cfg.eta_a = rng.gen_range(-PI..PI);
            cfg.eta_b = rng.gen_range(-PI..PI);
            cfg.theta_a = cfg.eta_a + FRAC_PI_4;
            cfg.theta_b = cfg.eta_b + FRAC_PI_2;
            let out = make_compass(&cfg)?;
            worst = worst.max(1.0 - fidelity(&out, &CoherentSuperposition::compass(alpha)));
        }
        Ok((
            worst <= 1e-10,
            format!("max infidelity {worst:.2e} over 20 random alpha (limit 1e-10)"),
        ))
    })
}

/// Compass formula, pairwise sum and displaced parity agree pointwise.
pub fn wigner_triple_oracle() -> CriterionOutcome {
    timed(2, "Wigner triple-oracle agreement", Some(30.0), || {
        let mut rng = ChaCha8Rng::seed_from_u64(202);
        let mut worst: f64 = 0.0;
        for r in [1.0, 2.0, 3.0] {
            let alpha = C64::new(r, 0.0);
            let s = CoherentSuperposition::compass(alpha);
            let kernel = PureWigner::new(&s)?;
            let oracle = FockWigner::new(&to_fock(&s, s.default_cutoff())?)?;
            let half = r + 2.0;
            let out_cutoff = oracle.output_cutoff(half * std::f64::consts::SQRT_2);
            for _ in 0..100 {
                let g = C64::new(rng.gen_range(-half..half), rng.gen_range(-half..half));
                let a = wigner_compass(alpha, g);
                let b = kernel.eval(g)?;
                let c = oracle.eval_with_cutoff(g, out_cutoff);
                worst = worst
                    .max((a - b).abs())
                    .max((a - c).abs())
                    .max((b - c).abs());
            }
        }
        Ok((
            worst <= 1e-8,
            format!("max pairwise difference {worst:.2e} at 300 points (limit 1e-8)"),
        ))
    })
}

fn compass_grid_tiles(r: f64) -> Result<crate::wigner::TileReport> {
    let alpha = C64::from_polar(r, FRAC_PI_4);
    let g = wigner_grid(
        &CoherentSuperposition::compass(alpha),
        &GridSpec::default_for(r),
        "compass",
    )?;
    central_tile_metrics(&g, r)
}

/// Chessboard absent at |alpha| = 1, present and sub-Planck at 5, tile area ~ 1/|alpha|^2.
pub fn chessboard_onset() -> CriterionOutcome {
    timed(
        3,
        "chessboard onset and sub-Planck tiles",
        Some(120.0),
        || {
            let one = compass_grid_tiles(1.0)?;
            let mut scaled = Vec::new();
            let mut five = None;
            for r in [3.0, 4.0, 5.0] {
                let t = compass_grid_tiles(r)?;
                scaled.push(t.central_tile_area.map(|a| a * r * r));
                if r == 5.0 {
                    five = Some(t);
                }
            }
            let five = five.expect("loop covers 5");
            let scaled: Option<Vec<f64>> = scaled.into_iter().collect();
            let spread = scaled.as_ref().map(|v| {
                let max = v.iter().copied().fold(f64::MIN, f64::max);
                let min = v.iter().copied().fold(f64::MAX, f64::min);
                max / min - 1.0
            });
            let ratio = five.tile_area_over_vacuum_footprint;
            let ok = !one.has_chessboard
                && five.has_chessboard
                && ratio.is_some_and(|x| x < 1.0)
                && spread.is_some_and(|s| s <= 0.3);
            Ok((
            ok,
            format!(
                "chessboard |a|=1: {}, |a|=5: {}; tile/footprint(5) = {}; area*|a|^2 for 3,4,5 = {} (spread {}, limit 30%)",
                one.has_chessboard,
                five.has_chessboard,
                ratio.map_or("none".into(), |x| format!("{x:.4}")),
                scaled.map_or("none".into(), |v| format!("{:.4}/{:.4}/{:.4}", v[0], v[1], v[2])),
                spread.map_or("n/a".into(), |s| format!("{:.1}%", 100.0 * s)),
            ),
        ))
        },
    )
}

/// Grids integrate to one; compass Wigner function is invariant under `gamma -> i gamma`.
pub fn normalization_and_symmetry() -> CriterionOutcome {
    timed(4, "grid normalization and four-fold symmetry", None, || {
        let states = [
            ("vacuum", CoherentSuperposition::vacuum(), 0.0),
            (
                "coherent 2",
                CoherentSuperposition::coherent(C64::new(2.0, 0.0)),
                2.0,
            ),
            ("cat 3", CoherentSuperposition::cat(C64::new(0.0, 3.0)), 3.0),
            (
                "compass 1",
                CoherentSuperposition::compass(C64::from_polar(1.0, FRAC_PI_4)),
                1.0,
            ),
            (
                "compass 3",
                CoherentSuperposition::compass(C64::new(3.0, 0.0)),
                3.0,
            ),
            (
                "compass 5",
                CoherentSuperposition::compass(C64::from_polar(5.0, FRAC_PI_4)),
                5.0,
            ),
        ];
        let mut worst_norm: f64 = 0.0;
        for (label, s, r) in &states {
            let g = wigner_grid(s, &GridSpec::default_for(*r), label)?;
            worst_norm = worst_norm.max((integrate_grid(&g) - 1.0).abs());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        let mut worst_sym: f64 = 0.0;
        let i = C64::new(0.0, 1.0);
        for _ in 0..50 {
            let alpha = random_in_disk(&mut rng, 5.0);
            let kernel = PureWigner::new(&CoherentSuperposition::compass(alpha))?;
            let g = C64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            worst_sym = worst_sym.max((kernel.eval(g)? - kernel.eval(i * g)?).abs());
        }
        Ok((
            worst_norm <= 2e-3 && worst_sym <= 1e-10,
            format!(
                "max |integral - 1| {worst_norm:.2e} over {} grids (limit 2e-3); max |W(g) - W(ig)| {worst_sym:.2e} (limit 1e-10)",
                states.len()
            ),
        ))
    })
}

/// Closed-form joint probability, completeness and fringe contrast.
pub fn joint_probability_identities() -> CriterionOutcome {
    timed(5, "joint detection probability identities", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(505);
        let mut worst_p: f64 = 0.0;
        let mut worst_sum: f64 = 0.0;
        for _ in 0..50 {
            let cfg = ProtocolConfig::random(&mut rng, 2.0);
            let (field, _) = conditional_project(
                &two_atom_pass(&cfg),
                &[cfg.detection_a(), cfg.detection_b()],
            )?;
            worst_p = worst_p.max((joint_probability(&cfg) - field.norm_sqr()).abs());
            worst_sum =
                worst_sum.max((outcome_probabilities(&cfg).iter().sum::<f64>() - 1.0).abs());
        }
        let contrast =
            |r: f64| fringe_contrast(&fringe_scan(&ProtocolConfig::compass(C64::new(r, 0.0)), 64));
        let (c1, c3) = (contrast(1.0), contrast(3.0));
        Ok((
            worst_p <= 1e-12 && worst_sum <= 1e-10 && c3 < c1,
            format!(
                "max |P - <C|C>| {worst_p:.2e} (limit 1e-12); max |sum P - 1| {worst_sum:.2e} (limit 1e-10); contrast {c1:.4} at |a|=1 > {c3:.4} at |a|=3"
            ),
        ))
    })
}

/// Damped compass against RK4, coherence weight, lifetime.
pub fn decoherence_checks() -> CriterionOutcome {
    timed(
        6,
        "amplitude damping against master equation",
        Some(60.0),
        || {
            let mut worst_td: f64 = 0.0;
            for r in [1.0, 2.0] {
                for kt in [0.01, 0.1, 0.5] {
                    worst_td = worst_td.max(rk4_trace_distance(C64::new(r, 0.0), kt, None)?);
                }
            }
            let mut worst_weight: f64 = 0.0;
            for r in [1.0, 2.0, 3.0] {
                for kt in [0.01, 0.1, 0.5, 2.0] {
                    let alpha = C64::from_polar(r, 0.4);
                    let p = DecayParams::scaled(kt)?;
                    let compass = CoherentSuperposition::compass(alpha);
                    let state = decohere(&compass, &p)?;
                    let expected = (-2.0 * r * r * (1.0 - (-kt).exp())).exp();
                    worst_weight = worst_weight
                        .max((state.coherence_weight(&compass, 0, 2) - expected).abs())
                        .max((coherence_factor(alpha, &p) - expected).abs());
                }
            }
            let mut lifetime_ok = true;
            let mut worst_gap_ratio: f64 = 0.0;
            for r in [1.0, 2.0, 5.0] {
                let alpha = C64::new(r, 0.0);
                let t_c = 1.0;
                let p = DecayParams::from_lifetime(t_c, compass_lifetime(alpha, t_c)?)?;
                let small = (-2.0 * r * r * p.kappa_t()).exp();
                let gap = (coherence_factor(alpha, &p) - small).abs();
                let bound = lifetime_correction_bound(alpha)?;
                lifetime_ok &= (small - (-1.0f64).exp()).abs() < 1e-15 && gap <= bound;
                worst_gap_ratio = worst_gap_ratio.max(gap / bound);
            }
            Ok((
            worst_td <= 1e-6 && worst_weight <= 1e-12 && lifetime_ok,
            format!(
                "max trace distance {worst_td:.2e} (limit 1e-6); max weight error {worst_weight:.2e} (limit 1e-12); lifetime gap/bound <= {worst_gap_ratio:.3}"
            ),
        ))
        },
    )
}

/// Compass populates only `n = 0 mod 4`.
pub fn photon_statistics() -> CriterionOutcome {
    timed(7, "compass photon statistics mod 4", None, || {
        let mut rng = ChaCha8Rng::seed_from_u64(707);
        let mut worst: f64 = 0.0;
        for k in 1..=10 {
            let alpha = C64::from_polar(0.5 * k as f64, rng.gen_range(-PI..PI));
            let s = CoherentSuperposition::compass(alpha);
            let v = to_fock(&s, s.default_cutoff())?;
            for (n, a) in v.amplitudes().iter().enumerate() {
                if n % 4 != 0 {
                    worst = worst.max(a.norm());
                }
            }
        }
        Ok((
            worst < 1e-14,
            format!("max |c_n| for n mod 4 != 0: {worst:.2e} (limit 1e-14)"),
        ))
    })
}

/// Probe completeness, JC agreement and revival ordering.
pub fn probe_checks() -> CriterionOutcome {
    timed(8, "resonant probe and revival ordering", Some(60.0), || {
        let mut rng = ChaCha8Rng::seed_from_u64(808);
        let mut worst_sum: f64 = 0.0;
        for _ in 0..40 {
            let terms = (0..3)
                .map(|_| {
                    Term::new(
                        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        random_in_disk(&mut rng, 4.0),
                    )
                })
                .collect();
            let s = normalize(&CoherentSuperposition::new(terms)?)?;
            let (gg, ge) = resonant_detection_probs(&s, 1.0, rng.gen_range(0.0..40.0))?;
            worst_sum = worst_sum.max((gg + ge - 1.0).abs());
        }
        let mut worst_jc: f64 = 0.0;
        for (s, gt) in [
            (
                CoherentSuperposition::compass(C64::new(2.0, 0.0)),
                FRAC_PI_2,
            ),
            (
                CoherentSuperposition::compass(C64::from_polar(3.0, 0.3)),
                4.0,
            ),
            (CoherentSuperposition::cat(C64::new(2.5, 0.0)), 7.7),
            (CoherentSuperposition::coherent(C64::new(0.0, 3.0)), 12.0),
        ] {
            let field = to_fock(&s, s.default_cutoff())?;
            let out = jc_propagate(&field, &AtomState::ground(), 1.0, 0.0, gt)?;
            let (gg, _) = resonant_detection_probs(&s, 1.0, gt)?;
            worst_jc = worst_jc.max((out.ground_population() - gg).abs());
        }
        let mut ordered = true;
        let mut times = Vec::new();
        for r in [3.0, 4.0, 5.0] {
            let cmp = compare_revivals(r, 1.0, 6001)?;
            ordered &= cmp.ordered();
            times.push(format!(
                "|a|={r}: {:.2} < {:.2} < {:.2}",
                cmp.compass, cmp.cat, cmp.coherent
            ));
        }
        Ok((
            worst_sum <= 1e-12 && worst_jc <= 1e-10 && ordered,
            format!(
                "max |P_gg + P_ge - 1| {worst_sum:.2e} (limit 1e-12); max JC difference {worst_jc:.2e} (limit 1e-10); revival gt compass/cat/coherent {}",
                times.join(", ")
            ),
        ))
    })
}

/// Full JC evolution converges to the dispersive map as `(g/delta)^2`.
pub fn dispersive_limit() -> CriterionOutcome {
    timed(9, "dispersive limit scaling", None, || {
        let atom = ramsey_atom(0.0, 0.0);
        let alpha = C64::new(1.0, 0.0);
        let inf: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&d| dispersive_infidelity(alpha, &atom, 1.0, d, PI / 8.0))
            .collect::<Result<_>>()?;
        let r1 = inf[0] / inf[1];
        let r2 = inf[1] / inf[2];
        Ok((
            (2.0..=8.0).contains(&r1),
            format!(
                "infidelity at delta/g = 10, 20, 40: {:.3e}, {:.3e}, {:.3e}; ratios {r1:.2} (limit [2, 8]), {r2:.2}",
                inf[0], inf[1], inf[2]
            ),
        ))
    })
}

/// Every branch left by an undetected atom is a rotated compass.
pub fn undetected_atom_robustness() -> CriterionOutcome {
    timed(
        10,
        "undetected atom leaves rotated compass states",
        None,
        || {
            let mut worst: f64 = 0.0;
            let mut rotations = Vec::new();
            let mut rng = ChaCha8Rng::seed_from_u64(1010);
            for _ in 0..10 {
                let cfg = ProtocolConfig::compass(random_in_disk(&mut rng, 4.0));
                for extra in [UndetectedAtom::LikeA, UndetectedAtom::LikeB] {
                    for b in undetected_robustness(&cfg, extra)? {
                        worst = worst.max(1.0 - b.fidelity);
                        // a compass is unchanged by quarter turns
                        let q = (b.rotation.rem_euclid(FRAC_PI_2) / PI * 8.0).round() / 8.0;
                        let q = if q >= 0.5 { q - 0.5 } else { q };
                        if !rotations.contains(&q) {
                            rotations.push(q);
                        }
                    }
                }
            }
            rotations.sort_by(f64::total_cmp);
            let rot: Vec<String> = rotations.iter().map(|q| format!("{q}")).collect();
            Ok((
            worst <= 1e-10,
            format!("max branch infidelity {worst:.2e} (limit 1e-10); rotations mod pi/2 seen (units of pi): {}", rot.join(", ")),
        ))
        },
    )
}

pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        compass_preparation(),
        wigner_triple_oracle(),
        chessboard_onset(),
        normalization_and_symmetry(),
        joint_probability_identities(),
        decoherence_checks(),
        photon_statistics(),
        probe_checks(),
        dispersive_limit(),
        undetected_atom_robustness(),
    ]
}
