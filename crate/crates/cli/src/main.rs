//! `compass`: CSV/JSON artifacts for Wigner grids, the preparation protocol,
//! amplitude damping and the resonant probe.

mod config;

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::{json, Value};

use compass_core::acceptance::run_all;
use compass_core::decoherence::{
    coherence_factor, compass_lifetime, decay_curve, decohere, rk4_trace_distance, DecayParams,
};
use compass_core::export::{decay_table, fringe_table, grid_table, trace_table, write_json, Table};
use compass_core::numerics::jc_propagate;
use compass_core::probe::{
    default_t_max, resonant_detection_probs, revival_time_estimate, revival_trace,
};
use compass_core::protocol::AtomState;
use compass_core::protocol::{
    fringe_contrast, fringe_scan, outcome_probabilities, prepare_field, ProtocolConfig,
};
use compass_core::states::{fidelity, to_fock, CoherentSuperposition};
use compass_core::wigner::{
    central_tile_metrics, evaluate_grid, integrate_grid, negativity_volume, wigner_grid, GridSpec,
};

use config::{Settings, UsageError};

#[derive(Parser, Debug)]
#[command(
    name = "compass",
    version,
    about = "Compass-state phase space, preparation, damping and probe artifacts"
)]
struct Cli {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Read every angle in radians instead of units of pi.
    #[arg(long, global = true)]
    radians: bool,
    /// Directory for output files (created if missing).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// File name stem for outputs.
    #[arg(long, global = true)]
    prefix: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Wigner function on a grid, with chessboard metrics.
    Wigner(WignerArgs),
    /// Two-atom preparation: fidelity, fringe scan or outcome completeness.
    Protocol(ProtocolArgs),
    /// Amplitude damping of the compass state.
    Decohere(DecohereArgs),
    /// Resonant probe atom: collapse and revival traces.
    Probe(ProbeArgs),
    /// Run the acceptance criteria and report one line each.
    Selftest,
}

#[derive(Args, Debug)]
struct AlphaArgs {
    /// |alpha|.
    #[arg(long)]
    alpha: Option<f64>,
    /// arg(alpha).
    #[arg(long, allow_hyphen_values = true)]
    alpha_phase: Option<f64>,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Half-width of the square grid.
    #[arg(long)]
    bounds: Option<f64>,
    /// Points per axis.
    #[arg(long)]
    res: Option<usize>,
}

#[derive(Args, Debug)]
struct WignerArgs {
    /// compass, cat, coherent or vacuum.
    #[arg(long)]
    state: Option<String>,
    #[command(flatten)]
    alpha: AlphaArgs,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct ProtocolArgs {
    /// prepare, scan or completeness.
    #[arg(long)]
    mode: Option<String>,
    #[command(flatten)]
    alpha: AlphaArgs,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi_prime: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_tau_prime: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_a_prime: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_a_prime: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    eta_b_prime: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta_b_prime: Option<f64>,
    /// Rotate the output so that it is compass(alpha) literally.
    #[arg(long)]
    align: Option<bool>,
    /// Points per axis of the fringe scan.
    #[arg(long)]
    scan_res: Option<usize>,
}

#[derive(Args, Debug)]
struct DecohereArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Largest kappa*t on the decay curve.
    #[arg(long)]
    kt_max: Option<f64>,
    /// Number of kappa*t samples.
    #[arg(long)]
    kt_steps: Option<usize>,
    /// Comma-separated kappa*t values for Wigner snapshots.
    #[arg(long)]
    snapshots: Option<String>,
    /// Compare every curve point against RK4 integration.
    #[arg(long)]
    oracle_check: bool,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[command(flatten)]
    alpha: AlphaArgs,
    /// Atom-field coupling.
    #[arg(long)]
    g: Option<f64>,
    /// Trace length (default 3 pi |alpha| / g).
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated subset of compass, cat, coherent, vacuum.
    #[arg(long)]
    states: Option<String>,
    /// Cross-check sampled points against the Jaynes-Cummings propagator.
    #[arg(long)]
    oracle: bool,
}

/// Numeric failure from the core library; exit code 1.
#[derive(Debug)]
struct NumericFailure(String);

impl std::fmt::Display for NumericFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericFailure {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

struct Ctx {
    settings: Settings,
    out_dir: PathBuf,
    prefix: String,
}

impl Ctx {
    fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        let stem = if suffix.is_empty() {
            self.prefix.clone()
        } else {
            format!("{}_{suffix}", self.prefix)
        };
        self.out_dir.join(format!("{stem}.{ext}"))
    }

    /// CSV plus a sidecar echoing the resolved configuration.
    fn emit(&self, suffix: &str, table: &Table, config: &Value, results: Value) -> Result<PathBuf> {
        let csv = self.path(suffix, "csv");
        table
            .save(&csv)
            .with_context(|| format!("writing {}", csv.display()))?;
        let meta = json!({ "file": file_name(&csv), "config": config, "results": results });
        self.json(suffix, &meta)?;
        Ok(csv)
    }

    fn json(&self, suffix: &str, value: &Value) -> Result<PathBuf> {
        let path = self.path(suffix, "json");
        let mut value = value.clone();
        if let Some(cfg) = value.get_mut("config").and_then(Value::as_object_mut) {
            cfg.insert("prefix".into(), json!(self.prefix));
            cfg.insert("radians".into(), json!(self.settings.radians()));
        }
        write_json(&path, &value).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

fn file_name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn numeric<T>(r: compass_core::Result<T>) -> Result<T> {
    r.map_err(|e| NumericFailure(e.to_string()).into())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let settings = Settings::load(cli.config.as_deref(), cli.radians)?;
    let out_dir = match &cli.out_dir {
        Some(p) => p.clone(),
        None => PathBuf::from(settings.string("out-dir", None, ".")?),
    };
    let default_prefix = match &cli.command {
        Command::Wigner(_) => "wigner",
        Command::Protocol(_) => "protocol",
        Command::Decohere(_) => "decohere",
        Command::Probe(_) => "probe",
        Command::Selftest => "selftest",
    };
    let prefix = settings.string("prefix", cli.prefix.as_deref(), default_prefix)?;
    if matches!(cli.command, Command::Selftest) {
        return Ok(selftest());
    }
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let ctx = Ctx {
        settings,
        out_dir,
        prefix,
    };
    match cli.command {
        Command::Wigner(a) => cmd_wigner(&ctx, &a)?,
        Command::Protocol(a) => cmd_protocol(&ctx, &a)?,
        Command::Decohere(a) => cmd_decohere(&ctx, &a)?,
        Command::Probe(a) => cmd_probe(&ctx, &a)?,
        Command::Selftest => unreachable!("handled above"),
    }
    Ok(ExitCode::SUCCESS)
}

fn selftest() -> ExitCode {
    let outcomes = run_all();
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    if passed == outcomes.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Resolved `alpha` with its two inputs for the sidecar.
fn resolve_alpha(
    s: &Settings,
    a: &AlphaArgs,
    default_mag: f64,
    default_phase_pi: f64,
) -> Result<(C64, f64, f64)> {
    let mag = s.f64("alpha", a.alpha, default_mag)?;
    if mag < 0.0 {
        return Err(UsageError(format!(
            "--alpha is a magnitude and must be >= 0, got {mag}"
        ))
        .into());
    }
    let phase = s.angle("alpha-phase", a.alpha_phase, default_phase_pi)?;
    Ok((C64::from_polar(mag, phase), mag, phase))
}

fn resolve_grid(s: &Settings, g: &GridArgs, alpha_mag: f64) -> Result<GridSpec> {
    let default = GridSpec::default_for(alpha_mag);
    let bounds = s.f64("bounds", g.bounds, default.x_max)?;
    let res = s.usize("res", g.res, default.nx)?;
    if bounds <= 0.0 {
        return Err(UsageError(format!("--bounds must be positive, got {bounds}")).into());
    }
    if res < 2 {
        return Err(UsageError(format!("--res must be at least 2, got {res}")).into());
    }
    Ok(GridSpec::square(bounds, res))
}

fn named_state(name: &str, alpha: C64) -> Result<CoherentSuperposition> {
    Ok(match name {
        "compass" => CoherentSuperposition::compass(alpha),
        "cat" => CoherentSuperposition::cat(alpha),
        "coherent" => CoherentSuperposition::coherent(alpha),
        "vacuum" => CoherentSuperposition::vacuum(),
        other => {
            return Err(UsageError(format!(
                "unknown state '{other}' (expected compass, cat, coherent or vacuum)"
            ))
            .into())
        }
    })
}

fn cmd_wigner(ctx: &Ctx, a: &WignerArgs) -> Result<()> {
    let s = &ctx.settings;
    let state_name = s.string("state", a.state.as_deref(), "compass")?;
    // arg(alpha) = pi/4 puts the compass chessboard along the grid axes
    let (alpha, mag, phase) = resolve_alpha(s, &a.alpha, 5.0, 0.25)?;
    let state = named_state(&state_name, alpha)?;
    let spec = resolve_grid(s, &a.grid, mag)?;
    let config = json!({
        "command": "wigner",
        "state": state_name,
        "alpha": mag,
        "alpha_phase_rad": phase,
        "grid": spec,
    });
    let label = format!("{state_name} |alpha|={mag}");
    let grid = numeric(wigner_grid(&state, &spec, &label))?;
    let integral = integrate_grid(&grid);
    let negativity = negativity_volume(&grid);
    let csv = ctx.emit(
        "",
        &grid_table(&grid),
        &config,
        json!({ "state_label": label, "integral": integral, "negativity_volume": negativity }),
    )?;
    // a grid too small or too coarse for tile metrics is still a valid Wigner export
    let (tiles_json, summary) = match central_tile_metrics(&grid, mag) {
        Ok(t) => {
            let area = t.central_tile_area.map_or("none".to_string(), |x| {
                format!("{x:.6} ({:.4} of the vacuum footprint)", x / (PI / 2.0))
            });
            let line = format!(
                "has_chessboard {}, central tile area {area}",
                t.has_chessboard
            );
            (json!({ "config": config, "tile_report": t }), line)
        }
        Err(e) => {
            eprintln!("warning: no tile metrics: {e}");
            (
                json!({ "config": config, "tile_report": null, "error": e.to_string() }),
                "no tile metrics".to_string(),
            )
        }
    };
    let tiles_path = ctx.json("tiles", &tiles_json)?;
    println!("wrote {} and {}", csv.display(), tiles_path.display());
    println!("integral {integral:.6}, negativity volume {negativity:.6}, {summary}");
    Ok(())
}

fn resolve_protocol(s: &Settings, a: &ProtocolArgs) -> Result<ProtocolConfig> {
    let (alpha, _, _) = resolve_alpha(s, &a.alpha, 1.0, 0.0)?;
    let d = ProtocolConfig::compass(alpha);
    let ang = |key: &str, flag: Option<f64>, default: f64| s.angle(key, flag, default / PI);
    Ok(ProtocolConfig {
        alpha,
        phi: ang("phi", a.phi, d.phi)?,
        phi_prime: ang("phi-prime", a.phi_prime, d.phi_prime)?,
        delta_tau: ang("delta-tau", a.delta_tau, d.delta_tau)?,
        delta_tau_prime: ang("delta-tau-prime", a.delta_tau_prime, d.delta_tau_prime)?,
        eta_a: ang("eta-a", a.eta_a, d.eta_a)?,
        theta_a: ang("theta-a", a.theta_a, d.theta_a)?,
        eta_b: ang("eta-b", a.eta_b, d.eta_b)?,
        theta_b: ang("theta-b", a.theta_b, d.theta_b)?,
        eta_a_prime: ang("eta-a-prime", a.eta_a_prime, d.eta_a_prime)?,
        theta_a_prime: ang("theta-a-prime", a.theta_a_prime, d.theta_a_prime)?,
        eta_b_prime: ang("eta-b-prime", a.eta_b_prime, d.eta_b_prime)?,
        theta_b_prime: ang("theta-b-prime", a.theta_b_prime, d.theta_b_prime)?,
        align_alpha0: s.bool("align", a.align, d.align_alpha0)?,
    })
}

fn cmd_protocol(ctx: &Ctx, a: &ProtocolArgs) -> Result<()> {
    let s = &ctx.settings;
    let mode = s.string("mode", a.mode.as_deref(), "prepare")?;
    let cfg = resolve_protocol(s, a)?;
    numeric(cfg.validate())?;
    let config = json!({ "command": "protocol", "mode": mode, "protocol": cfg });
    match mode.as_str() {
        "prepare" => {
            let (field, probability) = numeric(prepare_field(&cfg))?;
            let f = fidelity(&field, &CoherentSuperposition::compass(cfg.alpha));
            let path = ctx.json(
                "prepare",
                &json!({ "config": config, "results": {
                    "detection_probability": probability,
                    "fidelity_with_compass": f,
                    "field_terms": field.terms().iter().map(|t| json!({
                        "weight": [t.weight.re, t.weight.im],
                        "center": [t.center.re, t.center.im],
                    })).collect::<Vec<_>>(),
                }}),
            )?;
            println!("wrote {}", path.display());
            println!(
                "detection probability {probability:.12}, fidelity with compass(alpha) {f:.15}"
            );
        }
        "scan" => {
            let n = s.usize("scan-res", a.scan_res, 101)?;
            if n < 2 {
                return Err(UsageError(format!("--scan-res must be at least 2, got {n}")).into());
            }
            let scan = fringe_scan(&cfg, n);
            let contrast = fringe_contrast(&scan);
            let csv = ctx.emit(
                "scan",
                &fringe_table(&scan),
                &json!({ "command": "protocol", "mode": mode, "protocol": cfg, "scan_res": n }),
                json!({ "contrast": contrast, "axes": "theta1 - eta1, theta2 - eta2 (radians)" }),
            )?;
            println!("wrote {}", csv.display());
            println!("peak-to-trough contrast {contrast:.6}");
        }
        "completeness" => {
            let p = outcome_probabilities(&cfg);
            let total: f64 = p.iter().sum();
            let path = ctx.json(
                "completeness",
                &json!({ "config": config, "results": {
                    "outcomes": ["chi_A chi_B", "chi_A chi_B_perp", "chi_A_perp chi_B", "chi_A_perp chi_B_perp"],
                    "probabilities": p,
                    "sum": total,
                }}),
            )?;
            println!("wrote {}", path.display());
            println!(
                "P = {:.12} {:.12} {:.12} {:.12}, sum {total:.15}",
                p[0], p[1], p[2], p[3]
            );
        }
        other => {
            return Err(UsageError(format!(
                "unknown mode '{other}' (expected prepare, scan or completeness)"
            ))
            .into())
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SnapshotResult {
    kappa_t: f64,
    integral: f64,
    negativity_volume: f64,
    fidelity_with_initial: f64,
}

fn cmd_decohere(ctx: &Ctx, a: &DecohereArgs) -> Result<()> {
    let s = &ctx.settings;
    let (alpha, mag, phase) = resolve_alpha(s, &a.alpha, 2.0, 0.25)?;
    let kt_max = s.f64("kt-max", a.kt_max, 1.0)?;
    let steps = s.usize("kt-steps", a.kt_steps, 51)?;
    let snapshots = s.f64_list("snapshots", a.snapshots.as_deref(), &[])?;
    let oracle_check = s.bool("oracle-check", a.oracle_check.then_some(true), false)?;
    if kt_max < 0.0 || steps < 2 || snapshots.iter().any(|&k| k < 0.0) {
        return Err(UsageError(
            "need kt-max >= 0, kt-steps >= 2 and non-negative snapshots".into(),
        )
        .into());
    }
    let spec = resolve_grid(s, &a.grid, mag)?;
    let config = json!({
        "command": "decohere",
        "alpha": mag,
        "alpha_phase_rad": phase,
        "kt_max": kt_max,
        "kt_steps": steps,
        "snapshots": snapshots,
        "oracle_check": oracle_check,
        "grid": spec,
    });
    let kts: Vec<f64> = (0..steps)
        .map(|i| kt_max * i as f64 / (steps - 1) as f64)
        .collect();
    let rows = numeric(decay_curve(alpha, &kts, &spec))?;
    let lifetime = if mag > 0.0 {
        Some(numeric(compass_lifetime(alpha, 1.0))?)
    } else {
        None
    };
    let mut results = json!({ "lifetime_over_t_c": lifetime });
    let mut failed = None;
    if oracle_check {
        let mut worst: f64 = 0.0;
        for &kt in &kts {
            worst = worst.max(numeric(rk4_trace_distance(alpha, kt, None))?);
        }
        results["rk4_max_trace_distance"] = json!(worst);
        println!("RK4 oracle: max trace distance {worst:.3e} (limit 1e-6)");
        if worst > 1e-6 {
            failed = Some(format!("RK4 trace distance {worst:e} exceeds 1e-6"));
        }
    }
    let csv = ctx.emit("curve", &decay_table(&rows), &config, results)?;
    println!("wrote {}", csv.display());

    let compass = CoherentSuperposition::compass(alpha);
    let psi = numeric(to_fock(&compass, compass.default_cutoff()))?;
    for &kt in &snapshots {
        let params = numeric(DecayParams::scaled(kt))?;
        let state = numeric(decohere(&compass, &params))?;
        let kernel = state.wigner();
        let grid = numeric(evaluate_grid(
            &spec,
            format!("decohered compass kt={kt}"),
            |z| kernel.eval(z),
        ))?;
        let rho = numeric(state.to_fock(psi.cutoff()))?;
        let snap = SnapshotResult {
            kappa_t: kt,
            integral: integrate_grid(&grid),
            negativity_volume: negativity_volume(&grid),
            fidelity_with_initial: rho.expectation(&psi).re,
        };
        let path = ctx.emit(
            &format!("kt{kt}"),
            &grid_table(&grid),
            &config,
            json!({ "snapshot": snap, "coherence_factor": coherence_factor(alpha, &params) }),
        )?;
        println!(
            "wrote {} (negativity {:.6}, fidelity with initial state {:.12})",
            path.display(),
            snap.negativity_volume,
            snap.fidelity_with_initial
        );
    }
    if let Some(msg) = failed {
        return Err(NumericFailure(msg).into());
    }
    Ok(())
}

fn cmd_probe(ctx: &Ctx, a: &ProbeArgs) -> Result<()> {
    let s = &ctx.settings;
    let (alpha, mag, phase) = resolve_alpha(s, &a.alpha, 4.0, 0.0)?;
    let g = s.f64("g", a.g, 1.0)?;
    if g <= 0.0 {
        return Err(UsageError(format!("--g must be positive, got {g}")).into());
    }
    let t_max = s.f64("t-max", a.t_max, default_t_max(mag.max(1.0), g))?;
    let samples = s.usize("samples", a.samples, 6001)?;
    let names = s.string("states", a.states.as_deref(), "compass,cat,coherent")?;
    let oracle = s.bool("oracle", a.oracle.then_some(true), false)?;
    if t_max <= 0.0 || samples < 2 {
        return Err(UsageError("need t-max > 0 and samples >= 2".into()).into());
    }
    let names: Vec<String> = names
        .split(',')
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect();
    let config = json!({
        "command": "probe",
        "alpha": mag,
        "alpha_phase_rad": phase,
        "g": g,
        "t_max": t_max,
        "samples": samples,
        "states": names,
        "oracle": oracle,
    });
    let mut revivals = serde_json::Map::new();
    let mut worst_oracle: f64 = 0.0;
    for name in &names {
        let state = named_state(name, alpha)?;
        let trace = numeric(revival_trace(&state, g, t_max, samples))?;
        let revival = revival_time_estimate(&trace);
        let revival_json = match &revival {
            Ok(t) => json!({ "t": t, "gt": g * t }),
            Err(e) => json!({ "error": e.to_string() }),
        };
        revivals.insert(name.clone(), revival_json.clone());
        if oracle {
            let field = numeric(to_fock(&state, state.default_cutoff()))?;
            let stride = (samples / 25).max(1);
            for i in (0..samples).step_by(stride) {
                let t = trace.times[i];
                let out = numeric(jc_propagate(&field, &AtomState::ground(), g, 0.0, t))?;
                let (gg, _) = numeric(resonant_detection_probs(&state, g, t))?;
                worst_oracle = worst_oracle
                    .max((out.ground_population() - gg).abs())
                    .max((trace.p_gg[i] - gg).abs());
            }
        }
        let path = ctx.emit(
            name,
            &trace_table(&trace),
            &config,
            json!({ "state": name, "revival": revival_json }),
        )?;
        match revival {
            Ok(t) => println!("wrote {} (revival at gt = {:.4})", path.display(), g * t),
            Err(e) => println!("wrote {} ({e})", path.display()),
        }
    }
    let time_of = |n: &str| revivals.get(n).and_then(|v| v["t"].as_f64());
    let ordering = match (time_of("compass"), time_of("cat"), time_of("coherent")) {
        (Some(a), Some(b), Some(c)) => Some(a < b && b < c),
        _ => None,
    };
    let mut summary =
        json!({ "config": config, "revivals": revivals, "compass_lt_cat_lt_coherent": ordering });
    if oracle {
        summary["jc_max_difference"] = json!(worst_oracle);
        println!("JC oracle: max difference {worst_oracle:.3e} (limit 1e-10)");
    }
    let path = ctx.json("summary", &summary)?;
    println!("wrote {}", path.display());
    if let Some(ok) = ordering {
        println!("revival ordering compass < cat < coherent: {ok}");
    }
    if oracle && worst_oracle > 1e-10 {
        return Err(NumericFailure(format!(
            "JC oracle difference {worst_oracle:e} exceeds 1e-10"
        ))
        .into());
    }
    Ok(())
}
