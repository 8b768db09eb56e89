//! Numerical search for the extremal cat, independent of the closed forms.
//!
//! A candidate is a flat real vector encoding two branch kets. The search
//! maximizes the Bloch-z component of the first branch's reduced state under
//! the cat constraints, using penalized Nelder-Mead descent with penalty
//! continuation, a final feasibility-restoration pass, and seeded random
//! restarts merged deterministically. A separate rejection-sampling oracle
//! estimates the attainable probability over random candidates.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::catmodel::{
    check_constraints, lambda_from_overlap, optimal_alive_probability, overlap_residual,
    BranchOverlap, ConstraintTolerances, FeasibilityReport,
};
use crate::error::{Error, Result};
use crate::linalg::{gram_schmidt, random_unit, CMatrix};
use crate::quantum::{bloch, combine, p_alive, partial_trace_env, trace_distance, BipartiteKet};

/// Objective value charged to candidates that fail to decode (degenerate or
/// non-finite parameters). Large but finite, so the simplex can back out.
pub const DECODE_PENALTY: f64 = 1e6;

/// Norm below which a raw candidate vector counts as degenerate.
const DECODE_FLOOR: f64 = 1e-8;

/// Extra headroom over the closed-form bound before a sampled candidate
/// counts as a violation.
const BOUND_SLACK: f64 = 1e-9;

/// Search settings. `new` fills in the pinned defaults; override fields
/// afterwards for experiments.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Environment dimension d; candidates live in R^(8d).
    pub env_dim: usize,
    /// Independent random restarts (at least 1).
    pub restarts: usize,
    /// Seed from which every restart derives its own stream.
    pub master_seed: u64,
    /// Initial penalty weight.
    pub penalty_init: f64,
    /// Multiplicative penalty growth per round.
    pub penalty_growth: f64,
    /// Penalty continuation rounds.
    pub penalty_rounds: usize,
    /// Simplex iterations allowed per round.
    pub max_iters: usize,
    /// Feasibility threshold applied to the defining constraints c1-c3.
    pub tol_constraint: f64,
    /// Simplex diameter at which a round stops early.
    pub tol_step: f64,
}

impl OptimizerConfig {
    pub fn new(env_dim: usize, restarts: usize, master_seed: u64) -> Self {
        Self {
            env_dim,
            restarts,
            master_seed,
            penalty_init: 10.0,
            penalty_growth: 10.0,
            penalty_rounds: 5,
            max_iters: 2000,
            tol_constraint: 1e-8,
            tol_step: 1e-10,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.env_dim == 0 {
            return Err(Error::OutOfRange {
                context: "optimizer environment dimension",
                value: 0.0,
                range: "[1, ...)",
            });
        }
        if self.restarts == 0 {
            return Err(Error::OutOfRange {
                context: "optimizer restarts",
                value: 0.0,
                range: "[1, ...)",
            });
        }
        if self.penalty_rounds == 0 || self.max_iters == 0 {
            return Err(Error::OutOfRange {
                context: "optimizer iteration budget",
                value: 0.0,
                range: "[1, ...)",
            });
        }
        for (name, v) in [
            ("penalty_init", self.penalty_init),
            ("penalty_growth", self.penalty_growth),
            ("tol_constraint", self.tol_constraint),
            ("tol_step", self.tol_step),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidState(format!(
                    "optimizer setting {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::new(2, 32, 0)
    }
}

fn complexify(reals: &[f64]) -> Vec<Complex64> {
    reals
        .chunks_exact(2)
        .map(|c| Complex64::new(c[0], c[1]))
        .collect()
}

fn flat_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn ket_from_flat(v: &[Complex64], env_dim: usize) -> Result<BipartiteKet> {
    BipartiteKet::new(CMatrix::new(2, env_dim, v.to_vec())?)
}

/// Decodes a flat real vector into a normalized, orthogonalized branch pair.
///
/// Layout: `8 d` reals, first candidate then second, each as interleaved
/// `(re, im)` components in qubit-major order (the `d` alive-row amplitudes,
/// then the `d` dead-row amplitudes). The first vector is normalized; the
/// second is orthogonalized against it and normalized, so decoded pairs
/// satisfy the orthogonality constraint exactly.
///
/// Returns `Ok(None)` when the parameters are degenerate: non-finite, a
/// vector with norm below `1e-8`, or two essentially parallel vectors.
/// A length that is not a positive multiple of 8 is a usage error.
pub fn decode_candidate(raw: &[f64]) -> Result<Option<(BipartiteKet, BipartiteKet)>> {
    if raw.is_empty() || raw.len() % 8 != 0 {
        return Err(Error::DimensionMismatch {
            context: "candidate encoding length (8 reals per environment dimension)",
            expected: 8 * raw.len().div_euclid(8).max(1),
            got: raw.len(),
        });
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Ok(None);
    }
    let env_dim = raw.len() / 8;
    let half = raw.len() / 2;
    let mut v1 = complexify(&raw[..half]);
    let mut v2 = complexify(&raw[half..]);

    let n1 = flat_norm(&v1);
    if n1 < DECODE_FLOOR {
        return Ok(None);
    }
    for z in &mut v1 {
        *z /= n1;
    }

    // Orthogonalize v2 against v1 in the full bipartite space.
    let proj: Complex64 = v1.iter().zip(&v2).map(|(a, b)| a.conj() * b).sum();
    for (z, a) in v2.iter_mut().zip(&v1) {
        *z -= proj * a;
    }
    let n2 = flat_norm(&v2);
    if n2 < DECODE_FLOOR {
        return Ok(None);
    }
    for z in &mut v2 {
        *z /= n2;
    }

    Ok(Some((
        ket_from_flat(&v1, env_dim)?,
        ket_from_flat(&v2, env_dim)?,
    )))
}

/// Inverse of [`decode_candidate`] for an already-valid branch pair; useful
/// for warm starts and round-trip tests.
pub fn encode_candidate(chi1: &BipartiteKet, chi2: &BipartiteKet) -> Vec<f64> {
    let mut raw = Vec::with_capacity(8 * chi1.env_dim());
    for ket in [chi1, chi2] {
        for q in 0..2 {
            for k in 0..ket.env_dim() {
                let z = ket.amp().get(q, k);
                raw.push(z.re);
                raw.push(z.im);
            }
        }
    }
    raw
}

/// Constraint residuals that the penalty terms and the feasibility gate use:
/// the branch-pair orthogonality is exact by construction, so only the
/// reduced-state match (c2) and Bloch antipodality (c3) remain.
fn soft_residuals(chi1: &BipartiteKet, chi2: &BipartiteKet) -> (f64, f64) {
    let rho1 = partial_trace_env(chi1);
    let rho2 = partial_trace_env(chi2);
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let c2 = match combine(half, chi1, half, chi2) {
        Ok(combined) => trace_distance(&partial_trace_env(&combined.ket), &rho1),
        Err(_) => return (1.0, 1.0),
    };
    let c3 = bloch(&rho1).add(&bloch(&rho2)).length();
    (c2, c3)
}

fn decoded_objective(raw: &[f64], mu: f64) -> f64 {
    match decode_candidate(raw) {
        Ok(Some((chi1, chi2))) => {
            let (c2, c3) = soft_residuals(&chi1, &chi2);
            let z = bloch(&partial_trace_env(&chi1)).z;
            -z + mu * (c2 * c2 + c3 * c3)
        }
        _ => DECODE_PENALTY,
    }
}

fn decoded_violation(raw: &[f64]) -> f64 {
    match decode_candidate(raw) {
        Ok(Some((chi1, chi2))) => {
            let (c2, c3) = soft_residuals(&chi1, &chi2);
            c2 * c2 + c3 * c3
        }
        _ => DECODE_PENALTY,
    }
}

/// Penalized search objective: `-z(rho_1) + mu * (c2^2 + c3^2)`, where `z`
/// is the Bloch-z component of the first branch's reduced state. Candidates
/// that fail to decode score [`DECODE_PENALTY`]. Errors only on a raw length
/// that is not a positive multiple of 8.
pub fn penalized_objective(raw: &[f64], mu: f64) -> Result<f64> {
    if raw.is_empty() || raw.len() % 8 != 0 {
        decode_candidate(raw)?;
    }
    Ok(decoded_objective(raw, mu))
}

struct NmOutcome {
    x: Vec<f64>,
    iterations: usize,
}

/// Hand-rolled Nelder-Mead descent: deterministic, derivative-free, and
/// dependency-free. Stops on the iteration cap, on simplex collapse below
/// `tol_step`, or when the value spread across the simplex is negligible.
fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    initial_step: f64,
    max_iters: usize,
    tol_step: f64,
) -> NmOutcome {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += initial_step;
        let fv = f(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    while iterations < max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
            })
            .fold(0.0_f64, f64::max);
        // Purely relative spread test: an absolute floor here would stall
        // descents whose target value is itself near zero.
        let spread = simplex[n].1 - simplex[0].1;
        if diameter < tol_step || spread.abs() <= 1e-15 * simplex[0].1.abs() {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let point = |scale: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + scale * (c - w))
                .collect()
        };

        let xr = point(ALPHA);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = point(ALPHA * GAMMA);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = point(ALPHA * RHO);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = point(-RHO);
                let fc = f(&xc);
                (xc, fc)
            };
            if fc < fr.min(worst.1) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best) {
                        *x = b + SIGMA * (*x - b);
                    }
                    *fv = f(v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    NmOutcome {
        x: simplex[0].0.clone(),
        iterations,
    }
}

/// Splitmix-style mix of the master seed and a restart index into an
/// independent substream seed.
fn substream_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(0x85EB_CA6B_ED1A_E35D);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The winning branch pair, serialized under the names of the roles the two
/// kets play.
#[derive(Debug, Clone, Serialize)]
pub struct CandidatePair {
    pub alive_branch: BipartiteKet,
    pub dead_branch: BipartiteKet,
}

/// Outcome of [`optimize`]: the best restart's candidate and diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct OptimizationResult {
    /// Maximized Bloch-z component of the first branch's reduced state.
    pub best_objective: f64,
    /// Alive probability of that reduced state, `(1 + best_objective) / 2`.
    pub best_p_alive: f64,
    /// Decoded winning candidate.
    pub params: CandidatePair,
    /// Constraint residuals of the winner, gated on c1-c3 only.
    pub report: FeasibilityReport,
    /// Which restart won.
    pub restart_index: usize,
    /// Simplex iterations summed over every restart and phase.
    pub iterations_total: usize,
    /// Whether the winner met `tol_constraint` on the defining constraints.
    pub converged: bool,
}

struct Candidate {
    chi1: BipartiteKet,
    chi2: BipartiteKet,
    report: FeasibilityReport,
    z: f64,
    p: f64,
}

struct RestartRun {
    index: usize,
    iterations: usize,
    candidate: Option<Candidate>,
}

fn run_restart(cfg: &OptimizerConfig, index: usize) -> Result<RestartRun> {
    let n = 8 * cfg.env_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(cfg.master_seed, index as u64));
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let mut iterations = 0;

    // Penalty continuation: each round tightens the penalty and narrows the
    // simplex around the incumbent.
    let mut mu = cfg.penalty_init;
    let mut step = 0.5;
    for _ in 0..cfg.penalty_rounds {
        let out = nelder_mead(
            |p| decoded_objective(p, mu),
            &x,
            step,
            cfg.max_iters,
            cfg.tol_step,
        );
        x = out.x;
        iterations += out.iterations;
        mu *= cfg.penalty_growth;
        step = (step * 0.2).max(1e-4);
    }

    // Feasibility restoration: the penalty leaves a residual of order 1/mu;
    // descending the squared violation alone projects the incumbent onto the
    // constraint set without moving far along it.
    let out = nelder_mead(
        decoded_violation,
        &x,
        1e-4,
        4 * cfg.max_iters,
        (cfg.tol_step * 1e-3).max(1e-14),
    );
    x = out.x;
    iterations += out.iterations;

    let candidate = match decode_candidate(&x)? {
        None => None,
        Some((chi1, chi2)) => {
            let report = check_constraints(
                &chi1,
                &chi2,
                &ConstraintTolerances::constraints_only(cfg.tol_constraint),
            )?;
            let rho1 = partial_trace_env(&chi1);
            let z = bloch(&rho1).z;
            let p = p_alive(&rho1);
            Some(Candidate {
                chi1,
                chi2,
                report,
                z,
                p,
            })
        }
    };
    Ok(RestartRun {
        index,
        iterations,
        candidate,
    })
}

fn gated_violation(report: &FeasibilityReport) -> f64 {
    report
        .c1_chi_overlap
        .max(report.c2_rho_distance)
        .max(report.c3_bloch_antipodal)
}

/// Runs every restart and merges deterministically: the best feasible
/// candidate by objective (ties keep the lowest restart index); if no restart
/// reached feasibility, the one closest to it. `converged` records whether
/// the winner is feasible — callers decide how to treat a failed search.
pub fn optimize(cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    let runs: Vec<RestartRun> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(cfg, i))
        .collect::<Result<Vec<_>>>()?;

    let iterations_total = runs.iter().map(|r| r.iterations).sum();
    let mut best: Option<(usize, &Candidate)> = None;
    for run in &runs {
        let Some(c) = &run.candidate else { continue };
        let replace = match &best {
            None => true,
            Some((_, b)) => match (c.report.feasible, b.report.feasible) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => c.z > b.z,
                (false, false) => gated_violation(&c.report) < gated_violation(&b.report),
            },
        };
        if replace {
            best = Some((run.index, c));
        }
    }
    let (restart_index, winner) = best.ok_or(Error::SingularConfiguration(
        "every restart decoded to a degenerate candidate",
    ))?;

    Ok(OptimizationResult {
        best_objective: winner.z,
        best_p_alive: winner.p,
        params: CandidatePair {
            alive_branch: winner.chi1.clone(),
            dead_branch: winner.chi2.clone(),
        },
        report: winner.report.clone(),
        restart_index,
        iterations_total,
        converged: winner.report.feasible,
    })
}

/// One grid point of the closed-form coefficient curve.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub lambda: f64,
    pub lambda_sq: f64,
    /// Defect of the coefficient equation at this row; the wire name is part
    /// of the CSV/JSON contract.
    #[serde(rename = "residual_eq7")]
    pub residual: f64,
}

/// Evaluates the coefficient curve on `steps` evenly spaced overlaps spanning
/// `[-2, 2]` inclusive. Needs at least two steps to pin both endpoints.
pub fn overlap_sweep(steps: usize) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::OutOfRange {
            context: "sweep steps",
            value: steps as f64,
            range: "[2, ...)",
        });
    }
    (0..steps)
        .map(|i| {
            let a = -2.0 + 4.0 * (i as f64) / ((steps - 1) as f64);
            let overlap = BranchOverlap::new(a)?;
            let lambda = lambda_from_overlap(overlap);
            let residual = overlap_residual(lambda, overlap)?;
            Ok(SweepRow {
                a,
                lambda,
                lambda_sq: lambda * lambda,
                residual,
            })
        })
        .collect()
}

/// Tally from the rejection-sampling oracle.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub samples: usize,
    /// Samples whose defining-constraint residuals all fell within the
    /// feasibility tolerance.
    pub feasible_count: usize,
    /// Largest alive probability seen among feasible samples (0 when none).
    pub max_feasible_p_alive: f64,
    /// Feasible samples whose alive probability exceeded the closed-form
    /// bound by more than the slack.
    pub violations_of_bound: usize,
}

/// Draws random orthogonal branch pairs and tests the closed-form bound: no
/// feasible sample should push the first branch's alive probability above
/// `optimal_alive_probability()` plus slack.
///
/// Pairs are uniform on the sphere of the full bipartite space, with the
/// second vector orthogonalized against the first, so the orthogonality
/// constraint holds exactly and feasibility is judged on the remaining
/// constraints at `feas_tol`.
pub fn sampling_oracle(
    env_dim: usize,
    samples: usize,
    feas_tol: f64,
    seed: u64,
) -> Result<OracleReport> {
    if env_dim == 0 {
        return Err(Error::OutOfRange {
            context: "oracle environment dimension",
            value: 0.0,
            range: "[1, ...)",
        });
    }
    if !feas_tol.is_finite() || feas_tol <= 0.0 {
        return Err(Error::InvalidState(format!(
            "oracle feasibility tolerance must be positive and finite, got {feas_tol}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = optimal_alive_probability() + BOUND_SLACK;
    let tolerances = ConstraintTolerances::constraints_only(feas_tol);

    let mut feasible_count = 0;
    let mut max_feasible_p_alive = 0.0_f64;
    let mut violations_of_bound = 0;
    for _ in 0..samples {
        let (chi1, chi2) = loop {
            let v1 = random_unit(2 * env_dim, &mut rng)?;
            let v2 = random_unit(2 * env_dim, &mut rng)?;
            if let Ok(pair) = gram_schmidt(&[v1, v2]) {
                break (
                    ket_from_flat(pair[0].as_slice(), env_dim)?,
                    ket_from_flat(pair[1].as_slice(), env_dim)?,
                );
            }
        };
        let report = check_constraints(&chi1, &chi2, &tolerances)?;
        if report.feasible {
            feasible_count += 1;
            let p = p_alive(&partial_trace_env(&chi1));
            max_feasible_p_alive = max_feasible_p_alive.max(p);
            if p > bound {
                violations_of_bound += 1;
            }
        }
    }
    Ok(OracleReport {
        samples,
        feasible_count,
        max_feasible_p_alive,
        violations_of_bound,
    })
}
