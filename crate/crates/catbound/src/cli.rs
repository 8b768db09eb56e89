//! Command-line surface: argument types, command runners, and the JSON/CSV
//! wire formats they emit.
//!
//! Every JSON body embeds a run manifest; CSV bodies are pure tables. Exit
//! codes: 0 success, 1 verification failure, 2 usage or IO error, 3 optimizer
//! non-convergence.

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catmodel::{
    check_constraints, construct_optimal_canonical, construct_optimal_seeded,
    lambda_from_overlap, optimal_alive_probability, optimal_schmidt_coefficient,
    overlap_residual, qubit_triplet, BranchOverlap, ConstraintTolerances, OptimalTriple,
};
use crate::error::{Error, Result};
use crate::optimizer::{optimize, overlap_sweep, OptimizationResult, OptimizerConfig, SweepRow};
use crate::quantum::{
    bloch, combine, p_alive, partial_trace_env, ray_distance, schmidt, trace_distance,
    BipartiteKet, BlochVector, CatDensity,
};
use crate::{TOL_ALGEBRAIC, TOL_RECONSTRUCTION};

/// Explore how close a cat state can get to a classical alternative.
#[derive(Debug, Parser)]
#[command(name = "catbound", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the built-in check suite, optionally validating a saved state.
    Verify(VerifyArgs),
    /// Tabulate the closed-form coefficient curve over the overlap range.
    Sweep(SweepArgs),
    /// Re-derive the extremal cat by penalized random-restart search.
    Optimize(OptimizeArgs),
    /// Build the closed-form extremal cat and emit the full bundle.
    Construct(ConstructArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Environment dimension for the dimension-dependent checks.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Seed for the seeded-construction check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Saved ket or construct bundle to validate alongside the built-ins.
    #[arg(long)]
    pub state_file: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Grid points across the overlap interval (at least 2).
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    pub format: SweepFormat,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Environment dimension of the search space.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Independent random restarts.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Master seed; each restart derives its own stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feasibility threshold on the defining constraints.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_constraint: f64,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Environment dimension (at least 2).
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Seed for the random orthonormal environment pair.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the first two environment basis states instead of a seeded pair.
    #[arg(long, conflicts_with = "seed")]
    pub basis: bool,
    /// Write the bundle here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Run metadata embedded in every JSON body.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Resolved argument values, after defaults.
    pub parameters: serde_json::Value,
    pub tool_version: String,
    /// Unix seconds; the only field that varies between identical runs.
    pub timestamp: u64,
    /// Seed governing the run, when the subcommand uses randomness.
    pub master_seed: Option<u64>,
}

impl RunManifest {
    fn new(subcommand: &str, parameters: serde_json::Value, master_seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default()
                .as_secs(),
            master_seed,
        }
    }
}

/// One line of the verification report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check(name: &str, residual: f64, tolerance: f64) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        residual,
        tolerance,
        pass: residual <= tolerance,
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyOutput {
    pub manifest: RunManifest,
    pub checks: Vec<CheckRecord>,
    pub checks_total: usize,
    pub checks_failed: usize,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct SweepOutput {
    pub manifest: RunManifest,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Serialize)]
pub struct OptimizeOutput {
    pub manifest: RunManifest,
    pub result: OptimizationResult,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DensityBundle {
    pub superposition: CatDensity,
    pub alive_branch: CatDensity,
    pub dead_branch: CatDensity,
}

#[derive(Debug, Serialize)]
pub struct BlochBundle {
    pub superposition: BlochVector,
    pub alive_branch: BlochVector,
    pub dead_branch: BlochVector,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BranchProbabilities {
    pub p_alive: f64,
    pub p_dead: f64,
}

impl BranchProbabilities {
    fn of(rho: &CatDensity) -> Self {
        let p = p_alive(rho);
        Self {
            p_alive: p,
            p_dead: 1.0 - p,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ProbabilityBundle {
    pub superposition: BranchProbabilities,
    pub alive_branch: BranchProbabilities,
    pub dead_branch: BranchProbabilities,
}

#[derive(Debug, Serialize)]
pub struct ConstructOutput {
    pub manifest: RunManifest,
    pub superposition: BipartiteKet,
    pub alive_branch: BipartiteKet,
    pub dead_branch: BipartiteKet,
    pub densities: DensityBundle,
    pub bloch: BlochBundle,
    pub probabilities: ProbabilityBundle,
    pub report: crate::catmodel::FeasibilityReport,
}

/// What a finished command hands back to the binary: the body to write and
/// the process exit code.
#[derive(Debug)]
pub struct CommandOutcome {
    pub body: String,
    pub exit_code: i32,
    pub out: Option<PathBuf>,
}

/// Executes a parsed command. Errors map to exit code 2 in the binary.
pub fn run(cli: Cli) -> Result<CommandOutcome> {
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Construct(args) => cmd_construct(args),
    }
}

fn pretty(value: &impl Serialize) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

// --- verify ---------------------------------------------------------------

/// Number formatting for the CSV table: 17 significant digits, enough to
/// round-trip any f64.
fn csv_cell(v: f64) -> String {
    format!("{v:.16e}")
}

fn built_in_checks(dim: usize, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut checks = Vec::new();
    let p_opt = optimal_alive_probability();
    let m = optimal_schmidt_coefficient();

    checks.push(check(
        "closed_form_probability",
        (p_opt - 0.853_553_390_593_273_8).abs(),
        1e-15,
    ));
    checks.push(check(
        "closed_form_coefficient",
        (m * m - p_opt).abs(),
        1e-15,
    ));

    let lam = |a: f64| -> Result<f64> { Ok(lambda_from_overlap(BranchOverlap::new(a)?)) };
    checks.push(check(
        "lambda_at_zero_overlap",
        (lam(0.0)? - std::f64::consts::FRAC_1_SQRT_2).abs(),
        1e-15,
    ));
    let lo = lam(-2.0)?;
    let hi = lam(2.0)?;
    checks.push(check(
        "lambda_extreme_negative",
        (lo * lo - 0.853_553_390_593_273_8).abs(),
        TOL_ALGEBRAIC,
    ));
    checks.push(check(
        "lambda_extreme_positive",
        (hi * hi - 0.146_446_609_406_726_2).abs(),
        TOL_ALGEBRAIC,
    ));
    checks.push(check(
        "lambda_mirror_weights",
        (lo * lo + hi * hi - 1.0).abs(),
        1e-15,
    ));

    let mut monotone_violations = 0.0;
    let mut max_root_defect = 0.0_f64;
    let mut prev = f64::INFINITY;
    for i in 0..=1000 {
        let a = BranchOverlap::new(-2.0 + 4.0 * (i as f64) / 1000.0)?;
        let l = lambda_from_overlap(a);
        if l >= prev {
            monotone_violations += 1.0;
        }
        max_root_defect = max_root_defect.max(overlap_residual(l, a)?.abs());
        prev = l;
    }
    checks.push(check("lambda_monotone_grid", monotone_violations, 0.5));
    checks.push(check("lambda_root_defect_grid", max_root_defect, TOL_ALGEBRAIC));

    let rows = overlap_sweep(41)?;
    let span = rows[0].lambda_sq - rows[rows.len() - 1].lambda_sq;
    checks.push(check(
        "sweep_weight_span",
        (span - std::f64::consts::FRAC_1_SQRT_2).abs(),
        TOL_ALGEBRAIC,
    ));

    // Dimension-dependent checks over the canonical extremal family.
    let triple = construct_optimal_canonical(dim)?;
    let report = check_constraints(
        &triple.alive_branch,
        &triple.dead_branch,
        &ConstraintTolerances::strict(),
    )?;
    checks.push(check("branch_orthogonality", report.c1_chi_overlap, TOL_ALGEBRAIC));
    checks.push(check("reduced_state_match", report.c2_rho_distance, TOL_ALGEBRAIC));
    checks.push(check(
        "bloch_antipodality",
        report.c3_bloch_antipodal,
        TOL_ALGEBRAIC,
    ));
    checks.push(check("env_overlap_rows", report.eq3_residual, TOL_ALGEBRAIC));
    checks.push(check("env_overlap_cross", report.eq9_residual, TOL_ALGEBRAIC));
    checks.push(check(
        "superposition_row_weights",
        report.xi_norm_residual,
        TOL_ALGEBRAIC,
    ));

    let rho_sup = partial_trace_env(&triple.superposition);
    let rho_alive = partial_trace_env(&triple.alive_branch);
    checks.push(check(
        "eq12_rho_equal",
        trace_distance(&rho_sup, &rho_alive),
        TOL_ALGEBRAIC,
    ));
    checks.push(check(
        "optimal_probability_reached",
        (p_alive(&rho_sup) - p_opt).abs(),
        TOL_ALGEBRAIC,
    ));
    checks.push(check(
        "superposition_unit_norm",
        (triple.superposition.amp().frobenius_norm() - 1.0).abs(),
        TOL_ALGEBRAIC,
    ));

    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let combined = combine(half, &triple.alive_branch, half, &triple.dead_branch)?;
    checks.push(check(
        "combination_identity",
        ray_distance(&combined.ket, &triple.superposition)?,
        TOL_ALGEBRAIC,
    ));

    let form = schmidt(&triple.superposition)?;
    checks.push(check(
        "schmidt_weights",
        (form.coeff_alive * form.coeff_alive - p_opt).abs(),
        TOL_ALGEBRAIC,
    ));
    let rebuilt = form.reconstruct()?;
    let mut rebuild_gap = 0.0_f64;
    for q in 0..2 {
        for k in 0..dim {
            rebuild_gap = rebuild_gap
                .max((rebuilt.amp().get(q, k) - triple.superposition.amp().get(q, k)).norm());
        }
    }
    checks.push(check("schmidt_reconstruction", rebuild_gap, TOL_RECONSTRUCTION));

    let eigs = rho_sup.eigenvalues();
    checks.push(check(
        "density_eigen_consistency",
        (eigs[0] - p_opt).abs().max((eigs[1] - (1.0 - p_opt)).abs()),
        TOL_ALGEBRAIC,
    ));
    let pvec = bloch(&rho_sup);
    checks.push(check(
        "purity_identity",
        (rho_sup.purity() - (1.0 + pvec.dot(&pvec)) / 2.0).abs(),
        TOL_ALGEBRAIC,
    ));

    let triplet = qubit_triplet()?;
    let [alive, dead, sup] = triplet.bloch_vectors()?;
    checks.push(check(
        "triplet_antipodal_branches",
        (alive.dot(&dead) + 1.0).abs(),
        TOL_ALGEBRAIC,
    ));
    checks.push(check(
        "triplet_perpendicular_superposition",
        sup.dot(&alive).abs().max(sup.dot(&dead).abs()),
        TOL_ALGEBRAIC,
    ));
    let recombined = triplet
        .alive
        .scaled(half)
        .axpy(half, &triplet.dead)?;
    let mut combo_gap = 0.0_f64;
    for q in 0..2 {
        combo_gap = combo_gap.max((recombined.get(q) - triplet.superposition.get(q)).norm());
    }
    checks.push(check("triplet_combination_identity", combo_gap, TOL_ALGEBRAIC));

    let seeded = construct_optimal_seeded(dim, seed)?;
    let seeded_report = check_constraints(
        &seeded.alive_branch,
        &seeded.dead_branch,
        &ConstraintTolerances::strict(),
    )?;
    let seeded_worst = seeded_report
        .c1_chi_overlap
        .max(seeded_report.c2_rho_distance)
        .max(seeded_report.c3_bloch_antipodal)
        .max(seeded_report.eq3_residual)
        .max(seeded_report.eq9_residual)
        .max(seeded_report.xi_norm_residual);
    checks.push(check("seeded_family_feasible", seeded_worst, 1e-10));
    let seeded_p = p_alive(&partial_trace_env(&seeded.superposition));
    checks.push(check(
        "seeded_probability_reached",
        (seeded_p - p_opt).abs(),
        TOL_ALGEBRAIC,
    ));

    Ok(checks)
}

/// A saved construct bundle: the three kets plus whatever derived sections
/// were stored with them.
#[derive(Debug, Deserialize)]
struct BundleFile {
    superposition: BipartiteKet,
    alive_branch: BipartiteKet,
    dead_branch: BipartiteKet,
    #[serde(default)]
    densities: Option<DensityBundle>,
    #[serde(default)]
    probabilities: Option<ProbabilityBundle>,
}

fn density_gap(recomputed: &CatDensity, stored: &CatDensity) -> f64 {
    let mut gap = 0.0_f64;
    for r in 0..2 {
        for c in 0..2 {
            gap = gap.max((recomputed.entry(r, c) - stored.entry(r, c)).norm());
        }
    }
    gap
}

fn ket_checks(prefix: &str, ket: &BipartiteKet, checks: &mut Vec<CheckRecord>) -> Result<()> {
    checks.push(check(
        &format!("{prefix}_unit_norm"),
        (ket.amp().frobenius_norm() - 1.0).abs(),
        TOL_ALGEBRAIC,
    ));
    let rebuilt = schmidt(ket)?.reconstruct()?;
    let mut gap = 0.0_f64;
    for q in 0..2 {
        for k in 0..ket.env_dim() {
            gap = gap.max((rebuilt.amp().get(q, k) - ket.amp().get(q, k)).norm());
        }
    }
    checks.push(check(
        &format!("{prefix}_schmidt_reconstruction"),
        gap,
        TOL_RECONSTRUCTION,
    ));
    let rho = partial_trace_env(ket);
    let pvec = bloch(&rho);
    checks.push(check(
        &format!("{prefix}_purity_identity"),
        (rho.purity() - (1.0 + pvec.dot(&pvec)) / 2.0).abs(),
        TOL_ALGEBRAIC,
    ));
    Ok(())
}

fn state_checks(path: &PathBuf) -> Result<Vec<CheckRecord>> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let mut checks = Vec::new();

    if value.get("superposition").is_some() {
        let bundle: BundleFile = serde_json::from_value(value)?;
        ket_checks("state_superposition", &bundle.superposition, &mut checks)?;
        ket_checks("state_alive_branch", &bundle.alive_branch, &mut checks)?;
        ket_checks("state_dead_branch", &bundle.dead_branch, &mut checks)?;

        let report = check_constraints(
            &bundle.alive_branch,
            &bundle.dead_branch,
            &ConstraintTolerances::strict(),
        )?;
        checks.push(check(
            "state_pair_constraints",
            report
                .c1_chi_overlap
                .max(report.c2_rho_distance)
                .max(report.c3_bloch_antipodal),
            TOL_ALGEBRAIC,
        ));
        let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let combined = combine(half, &bundle.alive_branch, half, &bundle.dead_branch)?;
        checks.push(check(
            "state_combination_identity",
            ray_distance(&combined.ket, &bundle.superposition)?,
            TOL_RECONSTRUCTION,
        ));

        if let Some(densities) = &bundle.densities {
            checks.push(check(
                "state_density_superposition",
                density_gap(&partial_trace_env(&bundle.superposition), &densities.superposition),
                TOL_ALGEBRAIC,
            ));
            checks.push(check(
                "state_density_alive_branch",
                density_gap(&partial_trace_env(&bundle.alive_branch), &densities.alive_branch),
                TOL_ALGEBRAIC,
            ));
            checks.push(check(
                "state_density_dead_branch",
                density_gap(&partial_trace_env(&bundle.dead_branch), &densities.dead_branch),
                TOL_ALGEBRAIC,
            ));
        }
        if let Some(probabilities) = &bundle.probabilities {
            let p = p_alive(&partial_trace_env(&bundle.superposition));
            checks.push(check(
                "state_probability_consistency",
                (p - probabilities.superposition.p_alive).abs(),
                TOL_ALGEBRAIC,
            ));
        }
    } else {
        let ket: BipartiteKet = serde_json::from_value(value)?;
        ket_checks("state_ket", &ket, &mut checks)?;
    }
    Ok(checks)
}

fn cmd_verify(args: VerifyArgs) -> Result<CommandOutcome> {
    let mut checks = built_in_checks(args.dim, args.seed)?;
    if let Some(path) = &args.state_file {
        checks.extend(state_checks(path)?);
    }
    let checks_total = checks.len();
    let checks_failed = checks.iter().filter(|c| !c.pass).count();
    let passed = checks_failed == 0;
    let manifest = RunManifest::new(
        "verify",
        json!({
            "dim": args.dim,
            "seed": args.seed,
            "state_file": args.state_file.as_ref().map(|p| p.display().to_string()),
        }),
        Some(args.seed),
    );
    let output = VerifyOutput {
        manifest,
        checks,
        checks_total,
        checks_failed,
        passed,
    };
    Ok(CommandOutcome {
        body: pretty(&output)?,
        exit_code: if passed { 0 } else { 1 },
        out: args.out,
    })
}

// --- sweep ----------------------------------------------------------------

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut body = String::from("a,lambda,lambda_sq,residual_eq7\n");
    for row in rows {
        body.push_str(&format!(
            "{},{},{},{}\n",
            csv_cell(row.a),
            csv_cell(row.lambda),
            csv_cell(row.lambda_sq),
            csv_cell(row.residual),
        ));
    }
    body
}

fn cmd_sweep(args: SweepArgs) -> Result<CommandOutcome> {
    let rows = overlap_sweep(args.steps)?;
    let body = match args.format {
        SweepFormat::Csv => sweep_csv(&rows),
        SweepFormat::Json => {
            let manifest = RunManifest::new(
                "sweep",
                json!({ "steps": args.steps, "format": "json" }),
                None,
            );
            pretty(&SweepOutput { manifest, rows })?
        }
    };
    Ok(CommandOutcome {
        body,
        exit_code: 0,
        out: args.out,
    })
}

// --- optimize ---------------------------------------------------------------

fn cmd_optimize(args: OptimizeArgs) -> Result<CommandOutcome> {
    let mut cfg = OptimizerConfig::new(args.dim, args.restarts, args.seed);
    cfg.tol_constraint = args.tol_constraint;
    let result = optimize(&cfg)?;
    let manifest = RunManifest::new(
        "optimize",
        json!({
            "dim": args.dim,
            "restarts": args.restarts,
            "seed": args.seed,
            "tol_constraint": args.tol_constraint,
        }),
        Some(args.seed),
    );
    let exit_code = if result.converged { 0 } else { 3 };
    let output = OptimizeOutput { manifest, result };
    Ok(CommandOutcome {
        body: pretty(&output)?,
        exit_code,
        out: args.out,
    })
}

// --- construct --------------------------------------------------------------

fn cmd_construct(args: ConstructArgs) -> Result<CommandOutcome> {
    let triple: OptimalTriple = if args.basis {
        construct_optimal_canonical(args.dim)?
    } else {
        construct_optimal_seeded(args.dim, args.seed)?
    };
    let report = check_constraints(
        &triple.alive_branch,
        &triple.dead_branch,
        &ConstraintTolerances::strict(),
    )?;
    let rho_sup = partial_trace_env(&triple.superposition);
    let rho_alive = partial_trace_env(&triple.alive_branch);
    let rho_dead = partial_trace_env(&triple.dead_branch);

    let manifest = RunManifest::new(
        "construct",
        json!({
            "dim": args.dim,
            "seed": if args.basis { serde_json::Value::Null } else { json!(args.seed) },
            "basis": args.basis,
        }),
        if args.basis { None } else { Some(args.seed) },
    );
    let output = ConstructOutput {
        manifest,
        bloch: BlochBundle {
            superposition: bloch(&rho_sup),
            alive_branch: bloch(&rho_alive),
            dead_branch: bloch(&rho_dead),
        },
        probabilities: ProbabilityBundle {
            superposition: BranchProbabilities::of(&rho_sup),
            alive_branch: BranchProbabilities::of(&rho_alive),
            dead_branch: BranchProbabilities::of(&rho_dead),
        },
        densities: DensityBundle {
            superposition: rho_sup,
            alive_branch: rho_alive,
            dead_branch: rho_dead,
        },
        superposition: triple.superposition,
        alive_branch: triple.alive_branch,
        dead_branch: triple.dead_branch,
        report,
    };
    Ok(CommandOutcome {
        body: pretty(&output)?,
        exit_code: 0,
        out: args.out,
    })
}

/// Writes a finished body to its destination (stdout when `out` is unset).
pub fn deliver(outcome: &CommandOutcome) -> Result<()> {
    match &outcome.out {
        Some(path) => std::fs::write(path, &outcome.body)?,
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(outcome.body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Exit code for an error that escaped a command: usage and IO problems are
/// indistinguishable at this point, and both map to 2.
pub fn error_exit_code(_err: &Error) -> i32 {
    2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).expect("arguments should parse")
    }

    #[test]
    fn built_in_suite_passes_at_small_dimensions() {
        for dim in [2usize, 3, 5] {
            let checks = built_in_checks(dim, 0).unwrap();
            assert!(checks.len() >= 25, "suite at dim {dim} has {}", checks.len());
            for c in &checks {
                assert!(c.pass, "dim {dim}: {} residual {}", c.name, c.residual);
            }
            assert!(checks.iter().any(|c| c.name == "eq12_rho_equal"));
        }
    }

    #[test]
    fn built_in_suite_rejects_dimension_one() {
        assert!(built_in_checks(1, 0).is_err());
    }

    #[test]
    fn verify_reports_all_passes_and_exit_zero() {
        let outcome = cmd_verify(VerifyArgs {
            dim: 2,
            seed: 0,
            state_file: None,
            out: None,
        })
        .unwrap();
        assert_eq!(outcome.exit_code, 0);
        let value: serde_json::Value = serde_json::from_str(&outcome.body).unwrap();
        assert_eq!(value["passed"], serde_json::Value::Bool(true));
        assert_eq!(value["checks_failed"], 0);
        assert_eq!(value["manifest"]["subcommand"], "verify");
        assert!(value["checks"].as_array().unwrap().len() >= 25);
    }

    #[test]
    fn sweep_csv_is_byte_stable() {
        let outcome = cmd_sweep(SweepArgs {
            steps: 3,
            format: SweepFormat::Csv,
            out: None,
        })
        .unwrap();
        assert_eq!(outcome.exit_code, 0);
        let expected = "a,lambda,lambda_sq,residual_eq7\n\
            -2.0000000000000000e0,9.2387953251128674e-1,8.5355339059327373e-1,-2.2204460492503131e-16\n\
            0.0000000000000000e0,7.0710678118654757e-1,5.0000000000000011e-1,2.2204460492503131e-16\n\
            2.0000000000000000e0,3.8268343236508984e-1,1.4644660940672630e-1,2.2204460492503131e-16\n";
        assert_eq!(outcome.body, expected);
    }

    #[test]
    fn sweep_json_embeds_manifest_and_wire_names() {
        let outcome = cmd_sweep(SweepArgs {
            steps: 5,
            format: SweepFormat::Json,
            out: None,
        })
        .unwrap();
        let value: serde_json::Value = serde_json::from_str(&outcome.body).unwrap();
        assert_eq!(value["manifest"]["subcommand"], "sweep");
        assert_eq!(value["manifest"]["master_seed"], serde_json::Value::Null);
        let rows = value["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[0].get("residual_eq7").is_some());
        assert!(rows[0].get("residual").is_none());
    }

    #[test]
    fn construct_bundle_shape_and_roundtrip_through_verify() {
        let outcome = cmd_construct(ConstructArgs {
            dim: 3,
            seed: 11,
            basis: false,
            out: None,
        })
        .unwrap();
        assert_eq!(outcome.exit_code, 0);
        let value: serde_json::Value = serde_json::from_str(&outcome.body).unwrap();
        for key in [
            "manifest",
            "superposition",
            "alive_branch",
            "dead_branch",
            "densities",
            "bloch",
            "probabilities",
            "report",
        ] {
            assert!(value.get(key).is_some(), "missing {key}");
        }
        assert!(value["report"]["feasible"].as_bool().unwrap());
        let p = value["probabilities"]["superposition"]["p_alive"].as_f64().unwrap();
        assert!((p - optimal_alive_probability()).abs() <= 1e-12);

        // The bundle must satisfy the verifier's state checks.
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bundle.json");
        std::fs::write(&path, &outcome.body).unwrap();
        let checks = state_checks(&path).unwrap();
        assert!(checks.len() >= 13);
        for c in &checks {
            assert!(c.pass, "{} residual {}", c.name, c.residual);
        }
    }

    #[test]
    fn state_checks_accept_a_bare_ket() {
        let triple = construct_optimal_canonical(2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ket.json");
        std::fs::write(&path, serde_json::to_string(&triple.superposition).unwrap()).unwrap();
        let checks = state_checks(&path).unwrap();
        assert_eq!(checks.len(), 3);
        assert!(checks.iter().all(|c| c.pass));
    }

    #[test]
    fn state_checks_reject_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.json");
        std::fs::write(&path, "{\"what\": 1}").unwrap();
        assert!(state_checks(&path).is_err());
        let missing = dir.path().join("absent.json");
        assert!(state_checks(&missing).is_err());
    }

    #[test]
    fn argument_defaults_and_conflicts() {
        let cli = parse(&["catbound", "sweep"]);
        let Command::Sweep(args) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(args.steps, 41);
        assert_eq!(args.format, SweepFormat::Csv);

        let cli = parse(&["catbound", "optimize", "--dim", "3", "--seed", "42"]);
        let Command::Optimize(args) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(args.restarts, 32);
        assert_eq!(args.dim, 3);
        assert_eq!(args.tol_constraint, 1e-8);

        assert!(Cli::try_parse_from(["catbound", "construct", "--basis", "--seed", "4"]).is_err());
        assert!(Cli::try_parse_from(["catbound", "construct", "--basis"]).is_ok());
        assert!(Cli::try_parse_from(["catbound", "nonsense"]).is_err());
    }

    #[test]
    fn construct_rejects_trivial_dimension() {
        let result = cmd_construct(ConstructArgs {
            dim: 1,
            seed: 0,
            basis: true,
            out: None,
        });
        assert!(result.is_err());
    }

    #[test]
    fn manifest_timestamp_sits_on_its_own_line() {
        let outcome = cmd_sweep(SweepArgs {
            steps: 2,
            format: SweepFormat::Json,
            out: None,
        })
        .unwrap();
        let stamp_lines: Vec<&str> = outcome
            .body
            .lines()
            .filter(|l| l.contains("\"timestamp\""))
            .collect();
        assert_eq!(stamp_lines.len(), 1);
    }
}
