//! `fsdde`: sample driver paths, evaluate Hölder/Weyl norms, cross-validate
//! the pathwise integral, solve delay systems, and verify the cocycle
//! structure. Reports are JSON with every result next to its tolerance;
//! identical configurations produce identical bytes outside the timing
//! section.
//!
//! Exit codes: 0 all checks pass, 1 invariant violation, 2 numerical
//! failure, 3 usage error.

mod report;
mod sysfile;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use fsdde_core::cocycle::{modulus_counterexample, CocycleEvaluator};
use fsdde_core::error::Error as CoreError;
use fsdde_core::exec;
use fsdde_core::fbm::{sample_fbm, FbmSampler, Hurst};
use fsdde_core::frac::{
    integral_bound_check, shift_integral_residual, young_integral, FractionalOrder,
    IntegralMethod, PairScanPolicy, EXACT_PAIR_CAP,
};
use fsdde_core::grid::{Grid, GridFunction};
use fsdde_core::holder::{
    holder_norm, holder_seminorm_strided, lambda_norm_strided, sup_norm,
    windowed_seminorm_strided, HolderExponent,
};
use fsdde_core::sdde::{solve, SolverConfig};

use report::{write_csv, Check, Report};

/// Largest step count the norm pair scans accept without `--subsample`.
const NORM_SCAN_CAP: usize = 8192;

#[derive(Parser)]
#[command(
    name = "fsdde",
    version,
    about = "Pathwise numerics for delay equations driven by fractional Brownian motion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one fractional Brownian motion path to CSV (time,value).
    FbmSample {
        #[arg(long, default_value_t = 0.75)]
        hurst: f64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        /// Number of grid steps (power of two between 2^4 and 2^14).
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Hölder norms of a sampled path read from CSV.
    Norms {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        beta: f64,
        /// Window size for the windowed seminorm (defaults to the full span).
        #[arg(long)]
        delta: Option<f64>,
        /// Weight of the exponential norm (defaults to 0).
        #[arg(long)]
        lambda: Option<f64>,
        /// Stride for the pair scans; results become certified lower bounds.
        #[arg(long)]
        subsample: Option<usize>,
    },
    /// Anchors, method agreement, bound chain and shift identity for one path.
    IntegralCheck {
        #[arg(long, default_value_t = 0.75)]
        hurst: f64,
        #[arg(long, default_value_t = 0.35)]
        alpha: f64,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        subsample: Option<usize>,
    },
    /// Solve a delay system and write the path plus a diagnostics sidecar.
    Simulate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 0.75)]
        hurst: f64,
        #[arg(long, default_value_t = 0.35)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
        /// Audit the diffusion integral with the integration-by-parts route
        /// at 8 checkpoints.
        #[arg(long, default_value_t = false)]
        audit: bool,
    },
    /// Residual of the cocycle identity at (t, tau).
    CocycleCheck {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, default_value_t = 0.75)]
        hurst: f64,
        #[arg(long, default_value_t = 0.35)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        tau: f64,
        /// Grid steps per unit time; t and tau must land on nodes.
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Rough-vs-smooth history dichotomy for the trivial system.
    Counterexample {
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
    },
    /// Integral checks fanned out over consecutive seeds.
    Sweep {
        #[arg(long, default_value_t = 0.75)]
        hurst: f64,
        #[arg(long, default_value_t = 0.35)]
        alpha: f64,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        paths: usize,
        #[arg(long)]
        subsample: Option<usize>,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 3,
            Failure::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::CovarianceFactorization { .. }
            | CoreError::NonConvergence { .. }
            | CoreError::MethodDisagreement { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through this path as well
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_thread_pool();
    match run(cli.command) {
        Ok(all_pass) => ExitCode::from(if all_pass { 0 } else { 1 }),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

/// FSDDE_THREADS caps the rayon pool used by the parallel scans.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("FSDDE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn validate_grid(n: usize) -> Result<(), Failure> {
    if !n.is_power_of_two() || !(16..=16384).contains(&n) {
        return Err(Failure::Usage(format!(
            "grid must be a power of two between 2^4 and 2^14, got {n}"
        )));
    }
    Ok(())
}

fn validate_pair(hurst: f64, alpha: f64) -> Result<(Hurst, FractionalOrder), Failure> {
    let h = Hurst::new(hurst)?;
    let a = FractionalOrder::new(alpha)?.admissible_for(h)?;
    Ok((h, a))
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::FbmSample { hurst, horizon, grid, seed, output } => {
            fbm_sample(hurst, horizon, grid, seed, output)
        }
        Command::Norms { input, beta, delta, lambda, subsample } => {
            norms(input, beta, delta, lambda, subsample)
        }
        Command::IntegralCheck { hurst, alpha, grid, seed, subsample } => {
            integral_check(hurst, alpha, grid, seed, subsample)
        }
        Command::Simulate { system, hurst, alpha, horizon, grid, seed, output, audit } => {
            simulate(system, hurst, alpha, horizon, grid, seed, output, audit)
        }
        Command::CocycleCheck { system, hurst, alpha, t, tau, grid, seed } => {
            cocycle_check(system, hurst, alpha, t, tau, grid, seed)
        }
        Command::Counterexample { alpha, t, tau, grid } => counterexample(alpha, t, tau, grid),
        Command::Sweep { hurst, alpha, grid, seed, paths, subsample } => {
            sweep(hurst, alpha, grid, seed, paths, subsample)
        }
    }
}

fn fbm_sample(
    hurst: f64,
    horizon: f64,
    grid: usize,
    seed: u64,
    output: PathBuf,
) -> Result<bool, Failure> {
    validate_grid(grid)?;
    let started = Instant::now();
    let h = Hurst::new(hurst)?;
    let g = Grid::over_horizon(horizon, grid)?;
    let path = sample_fbm(h, g, seed)?;
    write_csv(
        &output,
        &["time", "value"],
        (0..g.len()).map(|k| vec![g.node(k), path.value(k)]),
    )?;
    let mut rep = Report::new(
        "fbm-sample",
        json!({"hurst": hurst, "horizon": horizon, "grid": grid, "seed": seed,
               "output": output.display().to_string()}),
    );
    rep.results = json!({"nodes": g.len(), "terminal_value": path.value(grid)});
    rep.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    rep.print();
    Ok(true)
}

fn norms(
    input: PathBuf,
    beta: f64,
    delta: Option<f64>,
    lambda: Option<f64>,
    subsample: Option<usize>,
) -> Result<bool, Failure> {
    let started = Instant::now();
    let (times, columns) = report::read_csv(&input).map_err(Failure::Usage)?;
    let n = times.len() - 1;
    let h = (times[n] - times[0]) / n as f64;
    for (k, &t) in times.iter().enumerate() {
        if (t - (times[0] + k as f64 * h)).abs() > 1e-9 * (1.0 + t.abs()) {
            return Err(Failure::Usage(format!("input grid is not uniform at row {}", k + 2)));
        }
    }
    let stride = match subsample {
        Some(k) if k >= 1 => k,
        Some(_) => return Err(Failure::Usage("subsample stride must be >= 1".into())),
        None if n > NORM_SCAN_CAP => {
            return Err(Failure::Usage(format!(
                "{n} grid steps exceed the exact pair-scan cap of {NORM_SCAN_CAP}; pass --subsample <stride> for a certified lower bound"
            )));
        }
        None => 1,
    };
    let grid = Grid::new(times[0], h, n)?;
    let dim = columns.len();
    let mut data = Vec::with_capacity((n + 1) * dim);
    for k in 0..=n {
        for col in &columns {
            data.push(col[k]);
        }
    }
    let f = GridFunction::new(grid, dim, data)?;
    let b = HolderExponent::new(beta)?;

    let sup = sup_norm(&f);
    let seminorm = holder_seminorm_strided(&f, b, stride);
    let window = delta.unwrap_or(2.0 * grid.span());
    let windowed = windowed_seminorm_strided(&f, b, window, stride);
    let weight = lambda.unwrap_or(0.0);
    let lam = lambda_norm_strided(&f, b, weight, stride)?;

    let mut rep = Report::new(
        "norms",
        json!({"input": input.display().to_string(), "beta": beta, "delta": delta,
               "lambda": lambda, "subsample": subsample}),
    );
    rep.results = json!({
        "sup": sup,
        "seminorm": seminorm,
        "windowed": windowed.value,
        "lambda_norm": lam,
        "window_used": window,
        "window_below_resolution": windowed.below_resolution,
        "lower_bound": stride > 1,
        "nodes": n + 1,
        "dim": dim,
    });
    rep.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    rep.print();
    Ok(true)
}

struct IntegralCase {
    anchor_sums: f64,
    anchor_formula: f64,
    agreement_rel: f64,
    shift_residual: f64,
    first_slack: f64,
    second_slack: f64,
    first_holds: bool,
    second_holds: bool,
}

fn integral_case(
    sampler: &FbmSampler,
    alpha: FractionalOrder,
    seed: u64,
    policy: PairScanPolicy,
) -> Result<IntegralCase, CoreError> {
    let omega = sampler.sample(seed);
    let g = *omega.grid();
    let n = g.steps();
    let span = g.span();

    let one = GridFunction::from_scalar_fn(g, |_| 1.0)?;
    let increment = omega.value(n) - omega.value(0);
    let ys = young_integral(&one, &omega, 0.0, span, alpha, IntegralMethod::YoungSums)?[0];
    let ff = young_integral(&one, &omega, 0.0, span, alpha, IntegralMethod::FractionalFormula)?[0];

    let f = GridFunction::from_scalar_fn(g, |t| t.sin())?;
    let f_ff = young_integral(&f, &omega, 0.0, span, alpha, IntegralMethod::FractionalFormula)?[0];
    let f_ys = young_integral(&f, &omega, 0.0, span, alpha, IntegralMethod::YoungSums)?[0];
    let agreement_rel = (f_ff - f_ys).abs() / f_ff.abs().max(f_ys.abs()).max(1e-12);

    let quarter = g.node(n / 4);
    let shift_residual =
        shift_integral_residual(&f, &omega, quarter, g.node(3 * n / 4), quarter)?;

    let bound = integral_bound_check(&f, &omega, alpha, policy)?;
    Ok(IntegralCase {
        anchor_sums: (ys - increment).abs(),
        anchor_formula: (ff - increment).abs(),
        agreement_rel,
        shift_residual,
        first_slack: bound.first_slack,
        second_slack: bound.second_slack,
        first_holds: bound.first_holds,
        second_holds: bound.second_holds,
    })
}

fn scan_policy(n: usize, subsample: Option<usize>) -> Result<(PairScanPolicy, bool), Failure> {
    match subsample {
        Some(k) if k >= 1 => Ok((PairScanPolicy::Strided(k), true)),
        Some(_) => Err(Failure::Usage("subsample stride must be >= 1".into())),
        None if n > EXACT_PAIR_CAP => Err(Failure::Usage(format!(
            "{n} grid steps exceed the exact pair-scan cap of {EXACT_PAIR_CAP}; pass --subsample <stride> for certified lower bounds"
        ))),
        None => Ok((PairScanPolicy::Exact, false)),
    }
}

fn case_checks(case: &IntegralCase, grid: usize, lower_bound: bool) -> Vec<Check> {
    // the cross-method gap shrinks like the step; 1e-2 is the pinned
    // tolerance at 2^11 steps and coarser grids scale accordingly
    let agreement_tol = 1e-2 * ((1 << 11) as f64 / grid as f64).max(1.0);
    let mut checks = vec![
        Check::upper("anchor_sums", case.anchor_sums, 1e-12),
        Check::upper("anchor_formula", case.anchor_formula, 1e-3),
        Check::upper("method_agreement_rel", case.agreement_rel, agreement_tol),
        Check::upper("shift_identity_residual", case.shift_residual, 1e-10),
    ];
    let first = Check { name: "integral_bound_first".into(), value: case.first_slack, tolerance: 0.0, pass: case.first_holds, asserted: true };
    let second = Check { name: "integral_bound_second".into(), value: case.second_slack, tolerance: 0.0, pass: case.second_holds, asserted: true };
    if lower_bound {
        // strided norms are lower bounds, so the chain is reported, not asserted
        checks.push(first.unasserted());
        checks.push(second.unasserted());
    } else {
        checks.push(first);
        checks.push(second);
    }
    checks
}

fn integral_check(
    hurst: f64,
    alpha: f64,
    grid: usize,
    seed: u64,
    subsample: Option<usize>,
) -> Result<bool, Failure> {
    validate_grid(grid)?;
    let (h, a) = validate_pair(hurst, alpha)?;
    let (policy, lower_bound) = scan_policy(grid, subsample)?;
    let started = Instant::now();
    let sampler = FbmSampler::new(h, Grid::over_horizon(1.0, grid)?)?;
    let case = integral_case(&sampler, a, seed, policy)?;

    let mut rep = Report::new(
        "integral-check",
        json!({"hurst": hurst, "alpha": alpha, "grid": grid, "seed": seed, "subsample": subsample}),
    );
    rep.results = json!({
        "anchor_sums_error": case.anchor_sums,
        "anchor_formula_error": case.anchor_formula,
        "method_agreement_rel": case.agreement_rel,
        "shift_identity_residual": case.shift_residual,
        "integral_bound_first_slack": case.first_slack,
        "integral_bound_second_slack": case.second_slack,
        "norms_are_lower_bounds": lower_bound,
    });
    rep.checks = case_checks(&case, grid, lower_bound);
    rep.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    rep.print();
    Ok(rep.all_pass())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    system: PathBuf,
    hurst: f64,
    alpha: f64,
    horizon: f64,
    grid: usize,
    seed: u64,
    output: PathBuf,
    audit: bool,
) -> Result<bool, Failure> {
    validate_grid(grid)?;
    let (h, a) = validate_pair(hurst, alpha)?;
    let started = Instant::now();
    let text = std::fs::read_to_string(&system)?;
    let file = sysfile::parse_system_file(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    let g = Grid::over_horizon(horizon, grid)?;
    let r_steps = g.aligned_offset(file.system.r)?;
    if r_steps == 0 {
        return Err(Failure::Usage("delay must be at least one grid step".into()));
    }
    let eta = file.history.sample(file.system.r, r_steps, file.system.dim);
    let omega = sample_fbm(h, g, seed)?;
    let mut cfg = SolverConfig::with_defaults(a, g.h());
    if audit {
        cfg.audit_checkpoints = 8;
    }
    let sol = solve(&file.system, &eta, &omega, &cfg)?;

    let path_grid = *sol.path.grid();
    write_csv(
        &output,
        &csv_header(file.system.dim),
        (0..path_grid.len()).map(|k| {
            let mut row = vec![path_grid.node(k)];
            row.extend_from_slice(sol.path.node_value(k));
            row
        }),
    )?;

    let beta = HolderExponent::new(1.0 - a.get())?;
    let tol = cfg.tol * (1.0 + holder_norm(&eta, beta));
    let mut rep = Report::new(
        "simulate",
        json!({"system": system.display().to_string(), "hurst": hurst, "alpha": alpha,
               "horizon": horizon, "grid": grid, "seed": seed,
               "output": output.display().to_string(), "audit": audit}),
    );
    rep.results = json!({
        "iterations": sol.iterations,
        "final_residual": sol.final_residual,
        "contraction_estimate": sol.contraction_estimate,
        "lambda_used": sol.lambda_used,
        "audit_gap": sol.audit_gap,
        "path_nodes": path_grid.len(),
    });
    rep.checks = vec![
        Check::upper("fixed_point_residual", sol.final_residual, tol),
        Check::upper("contraction_estimate", sol.contraction_estimate, 1.0 - 1e-9),
    ];
    if let Some(gap) = sol.audit_gap {
        rep.checks.push(Check::upper("diffusion_audit_rel", gap, 5e-2));
    }
    rep.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);

    let sidecar = output.with_extension("json");
    std::fs::write(&sidecar, serde_json::to_string_pretty(&rep).expect("report serializes"))?;
    rep.print();
    Ok(rep.all_pass())
}

fn csv_header(dim: usize) -> Vec<&'static str> {
    // component labels for the common small dimensions
    const LABELS: [&str; 8] = ["x0", "x1", "x2", "x3", "x4", "x5", "x6", "x7"];
    let mut header = vec!["time"];
    header.extend(LABELS.iter().take(dim.min(8)).copied());
    header
}

fn cocycle_check(
    system: PathBuf,
    hurst: f64,
    alpha: f64,
    t: f64,
    tau: f64,
    grid: usize,
    seed: u64,
) -> Result<bool, Failure> {
    validate_grid(grid)?;
    let (h, a) = validate_pair(hurst, alpha)?;
    if !(t >= 0.0 && tau >= 0.0 && t + tau > 0.0) {
        return Err(Failure::Usage("need t, tau >= 0 with t + tau > 0".into()));
    }
    let started = Instant::now();
    let text = std::fs::read_to_string(&system)?;
    let file = sysfile::parse_system_file(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    // the grid counts steps per unit time; the driver covers [0, t + tau]
    let h_step = 1.0 / grid as f64;
    let probe = Grid::new(0.0, h_step, grid)?;
    let total_steps = probe.aligned_offset(t + tau)?;
    let g = Grid::new(0.0, h_step, total_steps)?;
    g.index_of(t)?;
    if tau > 0.0 {
        g.index_of(tau)?;
    }
    let r_steps = g.aligned_offset(file.system.r)?;
    if r_steps == 0 {
        return Err(Failure::Usage("delay must be at least one grid step".into()));
    }
    let eta = file.history.sample(file.system.r, r_steps, file.system.dim);
    let omega = sample_fbm(h, g, seed)?;
    let cfg = SolverConfig::with_defaults(a, g.h());
    let evaluator = CocycleEvaluator::new(file.system, cfg);
    let rep_c = evaluator.residual(t, tau, &omega, &eta)?;

    let beta = HolderExponent::new(1.0 - a.get())?;
    let tol = cfg.tol * (1.0 + holder_norm(&eta, beta));
    let threshold = if tau == 0.0 { 2.0 * tol } else { 5e-2 };
    let mut rep = Report::new(
        "cocycle-check",
        json!({"system": system.display().to_string(), "hurst": hurst, "alpha": alpha,
               "t": t, "tau": tau, "grid": grid, "seed": seed}),
    );
    rep.results = json!({
        "residual": rep_c.residual,
        "lhs_norm": rep_c.lhs_norm,
        "rhs_norm": rep_c.rhs_norm,
        "step": rep_c.h,
    });
    rep.checks = vec![Check::upper("cocycle_residual", rep_c.residual, threshold)];
    rep.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    rep.print();
    Ok(rep.all_pass())
}

fn counterexample(alpha: f64, t: f64, tau: f64, grid: usize) -> Result<bool, Failure> {
    validate_grid(grid)?;
    let a = FractionalOrder::new(alpha)?;
    let started = Instant::now();
    let rep_c = modulus_counterexample(a, t, tau, grid)?;
    let mut rep = Report::new(
        "counterexample",
        json!({"alpha": alpha, "t": t, "tau": tau, "grid": grid}),
    );
    rep.results = json!({
        "rough_modulus": rep_c.rough_modulus,
        "smooth_modulus": rep_c.smooth_modulus,
        "rough_history_norm": rep_c.rough_history_norm,
    });
    rep.checks = vec![
        Check::lower("rough_modulus", rep_c.rough_modulus, 1.0 - 1e-10),
        Check::upper(
            "rough_history_norm_error",
            (rep_c.rough_history_norm - 2.0).abs(),
            1e-12,
        ),
    ];
    rep.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    rep.print();
    Ok(rep.all_pass())
}

fn sweep(
    hurst: f64,
    alpha: f64,
    grid: usize,
    seed: u64,
    paths: usize,
    subsample: Option<usize>,
) -> Result<bool, Failure> {
    validate_grid(grid)?;
    if paths == 0 {
        return Err(Failure::Usage("need at least one path".into()));
    }
    let (h, a) = validate_pair(hurst, alpha)?;
    let (policy, lower_bound) = scan_policy(grid, subsample)?;
    let started = Instant::now();
    let sampler = FbmSampler::new(h, Grid::over_horizon(1.0, grid)?)?;

    let cases: Vec<(u64, Result<IntegralCase, CoreError>)> = exec::map_indexed(paths, |i| {
        let s = seed + i as u64;
        (s, integral_case(&sampler, a, s, policy))
    });

    let mut rows = Vec::new();
    let mut worst = IntegralCase {
        anchor_sums: 0.0,
        anchor_formula: 0.0,
        agreement_rel: 0.0,
        shift_residual: 0.0,
        first_slack: f64::INFINITY,
        second_slack: f64::INFINITY,
        first_holds: true,
        second_holds: true,
    };
    for (s, case) in cases {
        let case = case.map_err(Failure::from)?;
        rows.push(json!({
            "seed": s,
            "anchor_sums_error": case.anchor_sums,
            "anchor_formula_error": case.anchor_formula,
            "method_agreement_rel": case.agreement_rel,
            "shift_identity_residual": case.shift_residual,
            "integral_bound_first_slack": case.first_slack,
            "integral_bound_second_slack": case.second_slack,
        }));
        worst.anchor_sums = worst.anchor_sums.max(case.anchor_sums);
        worst.anchor_formula = worst.anchor_formula.max(case.anchor_formula);
        worst.agreement_rel = worst.agreement_rel.max(case.agreement_rel);
        worst.shift_residual = worst.shift_residual.max(case.shift_residual);
        worst.first_slack = worst.first_slack.min(case.first_slack);
        worst.second_slack = worst.second_slack.min(case.second_slack);
        worst.first_holds &= case.first_holds;
        worst.second_holds &= case.second_holds;
    }

    let mut rep = Report::new(
        "sweep",
        json!({"hurst": hurst, "alpha": alpha, "grid": grid, "seed": seed,
               "paths": paths, "subsample": subsample}),
    );
    rep.results = json!({"per_seed": rows, "norms_are_lower_bounds": lower_bound});
    rep.checks = case_checks(&worst, grid, lower_bound);
    rep.timings_ms.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    rep.print();
    Ok(rep.all_pass())
}
