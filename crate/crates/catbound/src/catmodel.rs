//! The cat model: a qubit (alive/dead) entangled with a d-dimensional
//! environment, written as a superposition of two orthogonal branch kets.
//!
//! This module carries the closed-form results: the branch-overlap parameter
//! and the Schmidt coefficient it selects, the feasibility constraints a
//! branch pair must satisfy, and the one-parameter family of configurations
//! that attains the extremal alive probability `1/2 + sqrt(2)/4`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{inner, CVector};
use crate::quantum::{
    bloch, combine, inner_ket, partial_trace_env, qubit_density, schmidt, trace_distance,
    BipartiteKet, BlochVector,
};
use crate::TOL_ALGEBRAIC;

/// Extremal probability of the majority branch in the reduced qubit state:
/// `1/2 + sqrt(2)/4 = cos^2(pi/8)`.
pub fn optimal_alive_probability() -> f64 {
    0.5 + std::f64::consts::SQRT_2 / 4.0
}

/// Schmidt coefficient of the extremal superposition, `sqrt(1/2 + sqrt(2)/4)`.
pub fn optimal_schmidt_coefficient() -> f64 {
    optimal_alive_probability().sqrt()
}

/// Real branch-overlap parameter, confined to `[-2, 2]`.
///
/// Values outside the interval by at most `1e-12` (rounding from inner
/// products of unit vectors) are clamped; anything further out is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchOverlap(f64);

impl BranchOverlap {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonFinite {
                context: "branch overlap",
            });
        }
        if value.abs() > 2.0 + TOL_ALGEBRAIC {
            return Err(Error::OutOfRange {
                context: "branch overlap",
                value,
                range: "[-2, 2]",
            });
        }
        Ok(Self(value.clamp(-2.0, 2.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A cat configuration: Schmidt coefficient `lambda` of the first branch and
/// the two orthonormal environment pairs carried by the alive and dead rows
/// of the branch kets.
///
/// The first branch is `lambda |alive> (x) alive_env[0] +
/// sqrt(1 - lambda^2) |dead> (x) alive_env[1]`; the second swaps the weights
/// and uses `dead_env`. Endpoint values `lambda` in `{0, 1}` are legal here
/// (they produce product branches) but are rejected by the operations that
/// divide by a branch weight.
#[derive(Debug, Clone)]
pub struct CatConfiguration {
    schmidt_coeff: f64,
    alive_branch_env: [CVector; 2],
    dead_branch_env: [CVector; 2],
}

fn require_orthonormal_pair(pair: &[CVector; 2], context: &'static str) -> Result<()> {
    for v in pair {
        let residual = (v.norm() - 1.0).abs();
        if residual > TOL_ALGEBRAIC {
            return Err(Error::NotOrthonormal { context, residual });
        }
    }
    let residual = inner(&pair[0], &pair[1])?.norm();
    if residual > TOL_ALGEBRAIC {
        return Err(Error::NotOrthonormal { context, residual });
    }
    Ok(())
}

impl CatConfiguration {
    pub fn new(
        schmidt_coeff: f64,
        alive_branch_env: [CVector; 2],
        dead_branch_env: [CVector; 2],
    ) -> Result<Self> {
        if !schmidt_coeff.is_finite() {
            return Err(Error::NonFinite {
                context: "schmidt coefficient",
            });
        }
        if !(0.0..=1.0).contains(&schmidt_coeff) {
            return Err(Error::OutOfRange {
                context: "schmidt coefficient",
                value: schmidt_coeff,
                range: "[0, 1]",
            });
        }
        require_orthonormal_pair(&alive_branch_env, "alive-branch environment pair")?;
        require_orthonormal_pair(&dead_branch_env, "dead-branch environment pair")?;
        let d = alive_branch_env[0].dim();
        for v in alive_branch_env.iter().chain(dead_branch_env.iter()) {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "cat configuration environments",
                    expected: d,
                    got: v.dim(),
                });
            }
        }
        Ok(Self {
            schmidt_coeff,
            alive_branch_env,
            dead_branch_env,
        })
    }

    pub fn schmidt_coeff(&self) -> f64 {
        self.schmidt_coeff
    }

    pub fn env_dim(&self) -> usize {
        self.alive_branch_env[0].dim()
    }

    pub fn alive_branch_env(&self) -> &[CVector; 2] {
        &self.alive_branch_env
    }

    pub fn dead_branch_env(&self) -> &[CVector; 2] {
        &self.dead_branch_env
    }
}

/// Branch-overlap parameter of a configuration: `2 Re <psi1|phi1>` where
/// `psi1`/`phi1` are the alive-row environment states of the two branches.
pub fn overlap(cfg: &CatConfiguration) -> Result<BranchOverlap> {
    let ip = inner(&cfg.alive_branch_env[0], &cfg.dead_branch_env[0])?;
    BranchOverlap::new(2.0 * ip.re)
}

/// Schmidt coefficient selected by a branch overlap `a`:
/// `sqrt(1/2 - a / (2 sqrt(4 + a^2)))`.
///
/// Strictly decreasing on `[-2, 2]`, with `lambda(0) = 1/sqrt(2)` and
/// `lambda(-2)^2 = 1/2 + sqrt(2)/4`.
pub fn lambda_from_overlap(a: BranchOverlap) -> f64 {
    let a = a.value();
    (0.5 - a / (2.0 * (4.0 + a * a).sqrt())).sqrt()
}

/// Defect of the coefficient equation at `(lambda, a)`:
/// `2 lambda^2 + a lambda sqrt(1 - lambda^2) - 1`.
///
/// `lambda_from_overlap(a)` is its positive root for every `a` in `[-2, 2]`.
pub fn overlap_residual(lambda: f64, a: BranchOverlap) -> Result<f64> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite {
            context: "schmidt coefficient",
        });
    }
    if !(-TOL_ALGEBRAIC..=1.0 + TOL_ALGEBRAIC).contains(&lambda) {
        return Err(Error::OutOfRange {
            context: "schmidt coefficient",
            value: lambda,
            range: "[0, 1]",
        });
    }
    let complement = (1.0 - lambda * lambda).max(0.0).sqrt();
    Ok(2.0 * lambda * lambda + a.value() * lambda * complement - 1.0)
}

/// Builds the two branch kets of a configuration.
///
/// The first ket weights its alive row by `lambda` and its dead row by
/// `sqrt(1 - lambda^2)`; the second swaps the two weights over `dead_env`.
/// The kets are orthogonal whenever the cross environment overlaps conspire;
/// `check_constraints` measures that rather than assuming it.
pub fn branch_pair(cfg: &CatConfiguration) -> Result<(BipartiteKet, BipartiteKet)> {
    let lam = Complex64::new(cfg.schmidt_coeff, 0.0);
    let mu = Complex64::new(
        (1.0 - cfg.schmidt_coeff * cfg.schmidt_coeff).max(0.0).sqrt(),
        0.0,
    );
    let chi1 = BipartiteKet::from_branch_rows(
        &cfg.alive_branch_env[0].scaled(lam),
        &cfg.alive_branch_env[1].scaled(mu),
    )?;
    let chi2 = BipartiteKet::from_branch_rows(
        &cfg.dead_branch_env[0].scaled(mu),
        &cfg.dead_branch_env[1].scaled(lam),
    )?;
    Ok((chi1, chi2))
}

/// Environment states of the equal-weight combination of a configuration's
/// branches, before normalization, together with their defect from being a
/// valid Schmidt pair for that combination.
#[derive(Debug, Clone)]
pub struct SuperpositionEnv {
    /// Candidate environment state attached to the alive row.
    pub alive_env: CVector,
    /// Candidate environment state attached to the dead row.
    pub dead_env: CVector,
    /// `| ||alive_env|| - 1 |` and `| ||dead_env|| - 1 |`.
    pub norm_residuals: [f64; 2],
    /// `|<alive_env|dead_env>|`.
    pub cross_overlap: f64,
}

/// Computes the superposition's candidate environment states
/// `(1/sqrt(2)) psi_i + w_i phi_i` with the branch-weight ratios
/// `w_1 = sqrt((1 - lambda^2) / (2 lambda^2))`,
/// `w_2 = lambda / sqrt(2 (1 - lambda^2))`.
///
/// Both ratios divide by a branch weight, so the endpoint coefficients
/// `lambda` in `{0, 1}` are singular and rejected.
pub fn superposition_env_states(cfg: &CatConfiguration) -> Result<SuperpositionEnv> {
    let lambda = cfg.schmidt_coeff;
    if lambda <= 1e-15 || lambda >= 1.0 - 1e-15 {
        return Err(Error::SingularConfiguration(
            "superposition environment states need a branch weight strictly inside (0, 1)",
        ));
    }
    let lam_sq = lambda * lambda;
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let w1 = ((1.0 - lam_sq) / (2.0 * lam_sq)).sqrt();
    let w2 = lambda / (2.0 * (1.0 - lam_sq)).sqrt();

    let alive_env = cfg.alive_branch_env[0]
        .scaled(Complex64::new(half, 0.0))
        .axpy(Complex64::new(w1, 0.0), &cfg.dead_branch_env[0])?;
    let dead_env = cfg.alive_branch_env[1]
        .scaled(Complex64::new(half, 0.0))
        .axpy(Complex64::new(w2, 0.0), &cfg.dead_branch_env[1])?;

    let norm_residuals = [(alive_env.norm() - 1.0).abs(), (dead_env.norm() - 1.0).abs()];
    let cross_overlap = inner(&alive_env, &dead_env)?.norm();
    Ok(SuperpositionEnv {
        alive_env,
        dead_env,
        norm_residuals,
        cross_overlap,
    })
}

/// Per-constraint acceptance thresholds for [`check_constraints`].
#[derive(Debug, Clone, Copy)]
pub struct ConstraintTolerances {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub eq3: f64,
    pub eq9: f64,
    pub xi_norm: f64,
}

impl ConstraintTolerances {
    /// One threshold for every residual.
    pub fn uniform(tol: f64) -> Self {
        Self {
            c1: tol,
            c2: tol,
            c3: tol,
            eq3: tol,
            eq9: tol,
            xi_norm: tol,
        }
    }

    /// Algebraic-exactness thresholds (`1e-12`), for closed-form inputs.
    pub fn strict() -> Self {
        Self::uniform(TOL_ALGEBRAIC)
    }

    /// Gate only the three defining constraints; the derived residuals are
    /// reported but not enforced. This is the search-side acceptance test:
    /// the derived quantities vanish only to first order near a feasible
    /// point, so numerically-found candidates are judged on c1-c3.
    pub fn constraints_only(tol: f64) -> Self {
        Self {
            c1: tol,
            c2: tol,
            c3: tol,
            eq3: f64::INFINITY,
            eq9: f64::INFINITY,
            xi_norm: f64::INFINITY,
        }
    }
}

impl Default for ConstraintTolerances {
    fn default() -> Self {
        Self::uniform(1e-10)
    }
}

/// Residuals of the cat constraints for a candidate branch pair, with the
/// serialized field names fixed by the CLI wire contract.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    /// `|<chi1|chi2>|`: the branches must be orthogonal.
    pub c1_chi_overlap: f64,
    /// Trace distance between the reduced state of the equal-weight
    /// combination and the reduced state of the first branch.
    pub c2_rho_distance: f64,
    /// Norm of the sum of the two branch Bloch vectors (antipodality).
    pub c3_bloch_antipodal: f64,
    /// Row-wise environment overlap defect between the branches.
    pub eq3_residual: f64,
    /// Cross-row environment overlap defect between the branches.
    pub eq9_residual: f64,
    /// Defect of the combination's unnormalized rows from the first branch's
    /// Schmidt weights.
    pub xi_norm_residual: f64,
    /// All residuals within their thresholds.
    pub feasible: bool,
}

/// Row of a branch ket, as an environment vector: `q = 0` is alive, `1` dead.
fn rows(ket: &BipartiteKet) -> [CVector; 2] {
    [ket.branch_row(0), ket.branch_row(1)]
}

/// Evaluates all cat-constraint residuals for a branch pair.
///
/// The residuals are phase-gauge free: they are built from the raw branch
/// rows, never from a particular Schmidt gauge. `eq3_residual` sums the
/// normalized same-row overlaps `<r_q(chi2)|r_q(chi1)>` (a row with norm
/// below `1e-12` contributes nothing); `eq9_residual` is
/// `|<r_alive(chi2)|r_dead(chi1)> + <r_alive(chi1)|r_dead(chi2)>|`;
/// `xi_norm_residual` compares the row norms of the unnormalized equal-weight
/// combination against the first branch's Schmidt weights.
pub fn check_constraints(
    chi1: &BipartiteKet,
    chi2: &BipartiteKet,
    tolerances: &ConstraintTolerances,
) -> Result<FeasibilityReport> {
    if chi1.env_dim() != chi2.env_dim() {
        return Err(Error::DimensionMismatch {
            context: "constraint check branch pair",
            expected: chi1.env_dim(),
            got: chi2.env_dim(),
        });
    }

    let c1_chi_overlap = inner_ket(chi1, chi2)?.norm();

    let rho1 = partial_trace_env(chi1);
    let rho2 = partial_trace_env(chi2);
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let combined = combine(half, chi1, half, chi2)?;
    let rho_combined = partial_trace_env(&combined.ket);
    let c2_rho_distance = trace_distance(&rho_combined, &rho1);

    let c3_bloch_antipodal = bloch(&rho1).add(&bloch(&rho2)).length();

    let r1 = rows(chi1);
    let r2 = rows(chi2);

    let mut eq3 = Complex64::new(0.0, 0.0);
    for q in 0..2 {
        let n1 = r1[q].norm();
        let n2 = r2[q].norm();
        if n1 < TOL_ALGEBRAIC || n2 < TOL_ALGEBRAIC {
            continue;
        }
        eq3 += inner(&r2[q], &r1[q])? / Complex64::new(n1 * n2, 0.0);
    }
    let eq3_residual = eq3.norm();

    let eq9_residual = (inner(&r2[0], &r1[1])? + inner(&r1[0], &r2[1])?).norm();

    // Unnormalized equal-weight combination rows, compared against the
    // Schmidt weights of the first branch.
    let lambda = schmidt(chi1)?.coeff_alive;
    let mu = (1.0 - lambda * lambda).max(0.0).sqrt();
    let u = r1[0].axpy(Complex64::new(1.0, 0.0), &r2[0])?.scaled(half);
    let v = r1[1].axpy(Complex64::new(1.0, 0.0), &r2[1])?.scaled(half);
    let xi_norm_residual = (u.norm() - lambda).abs().max((v.norm() - mu).abs());

    let feasible = c1_chi_overlap <= tolerances.c1
        && c2_rho_distance <= tolerances.c2
        && c3_bloch_antipodal <= tolerances.c3
        && eq3_residual <= tolerances.eq3
        && eq9_residual <= tolerances.eq9
        && xi_norm_residual <= tolerances.xi_norm;

    Ok(FeasibilityReport {
        c1_chi_overlap,
        c2_rho_distance,
        c3_bloch_antipodal,
        eq3_residual,
        eq9_residual,
        xi_norm_residual,
        feasible,
    })
}

/// The extremal cat: the superposition ket and the two branches it splits
/// into.
#[derive(Debug, Clone)]
pub struct OptimalTriple {
    pub superposition: BipartiteKet,
    pub alive_branch: BipartiteKet,
    pub dead_branch: BipartiteKet,
}

/// Builds the extremal family over an orthonormal environment pair
/// `(psi1, psi2)`:
///
/// ```text
/// chi  = m |alive> psi1 - s |dead> psi2     (superposition)
/// chi1 = m |alive> psi1 + s |dead> psi2     (first branch)
/// chi2 = s |alive> psi1 - m |dead> psi2     (second branch)
/// ```
///
/// with `m = optimal_schmidt_coefficient()` and `s = sqrt(1 - m^2)`. The
/// branches are orthogonal, share antipodal Bloch vectors, and combine with
/// equal weights exactly into `chi`, whose reduced state equals that of
/// `chi1` with alive probability `1/2 + sqrt(2)/4`.
pub fn construct_optimal(psi1: &CVector, psi2: &CVector) -> Result<OptimalTriple> {
    let pair = [psi1.clone(), psi2.clone()];
    require_orthonormal_pair(&pair, "optimal-family environment pair")?;
    let m = Complex64::new(optimal_schmidt_coefficient(), 0.0);
    let s = Complex64::new((1.0 - optimal_alive_probability()).sqrt(), 0.0);
    let neg = Complex64::new(-1.0, 0.0);

    let superposition =
        BipartiteKet::from_branch_rows(&psi1.scaled(m), &psi2.scaled(s * neg))?;
    let alive_branch = BipartiteKet::from_branch_rows(&psi1.scaled(m), &psi2.scaled(s))?;
    let dead_branch = BipartiteKet::from_branch_rows(&psi1.scaled(s), &psi2.scaled(m * neg))?;

    Ok(OptimalTriple {
        superposition,
        alive_branch,
        dead_branch,
    })
}

/// The configuration whose branch pair is the extremal family over
/// `(psi1, psi2)`: coefficient `optimal_schmidt_coefficient()`, alive-branch
/// environments `(psi1, psi2)`, dead-branch environments `(psi1, -psi2)`.
pub fn optimal_configuration(psi1: &CVector, psi2: &CVector) -> Result<CatConfiguration> {
    CatConfiguration::new(
        optimal_schmidt_coefficient(),
        [psi1.clone(), psi2.clone()],
        [
            psi1.clone(),
            psi2.scaled(Complex64::new(-1.0, 0.0)),
        ],
    )
}

/// [`construct_optimal`] over the first two environment basis states.
pub fn construct_optimal_canonical(env_dim: usize) -> Result<OptimalTriple> {
    if env_dim < 2 {
        return Err(Error::OutOfRange {
            context: "environment dimension",
            value: env_dim as f64,
            range: "[2, ...)",
        });
    }
    construct_optimal(
        &CVector::basis(env_dim, 0)?,
        &CVector::basis(env_dim, 1)?,
    )
}

/// [`construct_optimal`] over a seeded random orthonormal environment pair.
pub fn construct_optimal_seeded(env_dim: usize, seed: u64) -> Result<OptimalTriple> {
    if env_dim < 2 {
        return Err(Error::OutOfRange {
            context: "environment dimension",
            value: env_dim as f64,
            range: "[2, ...)",
        });
    }
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let raw = [
        crate::linalg::random_unit(env_dim, &mut rng)?,
        crate::linalg::random_unit(env_dim, &mut rng)?,
    ];
    let pair = crate::linalg::gram_schmidt(&raw)?;
    construct_optimal(&pair[0], &pair[1])
}

/// The three qubit states read off the extremal cat when the environment is
/// ignored: the alive-branch, dead-branch, and superposition directions.
#[derive(Debug, Clone)]
pub struct QubitTriplet {
    pub alive: CVector,
    pub dead: CVector,
    pub superposition: CVector,
}

impl QubitTriplet {
    /// Bloch vectors of the three states, in the same order.
    pub fn bloch_vectors(&self) -> Result<[BlochVector; 3]> {
        Ok([
            bloch(&qubit_density(&self.alive)?),
            bloch(&qubit_density(&self.dead)?),
            bloch(&qubit_density(&self.superposition)?),
        ])
    }
}

/// Builds the qubit-only extremal triplet:
///
/// ```text
/// alive         = m |0> + s |1>
/// dead          = s |0> - m |1>
/// superposition = (alive + dead) / sqrt(2) = m |0> - s |1>
/// ```
///
/// with `m = optimal_schmidt_coefficient()`, `s = sqrt(1 - m^2)`. The three
/// Bloch vectors lie in the x-z plane at unit length; alive and dead are
/// antipodal, and the superposition is perpendicular to that axis, making
/// equal angles of `pi / 2` with both branch directions.
pub fn qubit_triplet() -> Result<QubitTriplet> {
    let m = optimal_schmidt_coefficient();
    let s = (1.0 - optimal_alive_probability()).sqrt();
    let alive = CVector::from_reals(&[m, s])?;
    let dead = CVector::from_reals(&[s, -m])?;
    let superposition = alive
        .axpy(Complex64::new(1.0, 0.0), &dead)?
        .scaled(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    Ok(QubitTriplet {
        alive,
        dead,
        superposition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::p_alive;
    use proptest::prelude::*;

    fn basis_pair(d: usize) -> (CVector, CVector) {
        (CVector::basis(d, 0).unwrap(), CVector::basis(d, 1).unwrap())
    }

    /// Independent root-finder for the coefficient equation, written directly
    /// from the defect formula rather than the closed form under test.
    fn lambda_by_bisection(a: f64) -> f64 {
        let defect = |lam: f64| 2.0 * lam * lam + a * lam * (1.0 - lam * lam).sqrt() - 1.0;
        let (mut lo, mut hi) = (1e-9, 1.0 - 1e-9);
        assert!(defect(lo) < 0.0 && defect(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if defect(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn closed_form_matches_bisection_across_the_overlap_range() {
        for i in 0..=40 {
            let a = -2.0 + 4.0 * (i as f64) / 40.0;
            let closed = lambda_from_overlap(BranchOverlap::new(a).unwrap());
            let oracle = lambda_by_bisection(a);
            assert!(
                (closed - oracle).abs() <= 1e-10,
                "a = {a}: closed {closed} vs bisection {oracle}"
            );
        }
    }

    #[test]
    fn lambda_endpoint_values() {
        let at = |a: f64| lambda_from_overlap(BranchOverlap::new(a).unwrap());
        assert!((at(0.0) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let lo = at(-2.0);
        assert!((lo * lo - 0.853_553_390_593_273_8).abs() <= 1e-12);
        assert!((lo * lo - optimal_alive_probability()).abs() <= 1e-15);
        let hi = at(2.0);
        assert!((hi * hi - 0.146_446_609_406_726_2).abs() <= 1e-12);
        // The two extreme coefficients are mirror weights of one another.
        assert!((lo * lo + hi * hi - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn lambda_is_strictly_decreasing_and_roots_the_residual() {
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let a = BranchOverlap::new(-2.0 + 4.0 * (i as f64) / 1000.0).unwrap();
            let lam = lambda_from_overlap(a);
            assert!(lam < prev, "not strictly decreasing at a = {}", a.value());
            assert!(overlap_residual(lam, a).unwrap().abs() <= 1e-12);
            prev = lam;
        }
    }

    #[test]
    fn residual_hand_values() {
        let zero = BranchOverlap::new(0.0).unwrap();
        assert!(
            overlap_residual(std::f64::consts::FRAC_1_SQRT_2, zero)
                .unwrap()
                .abs()
                <= 1e-15
        );
        assert!((overlap_residual(0.9, zero).unwrap() - 0.62).abs() <= 1e-15);
    }

    #[test]
    fn overlap_of_equal_and_opposite_alive_environments() {
        let (e1, e2) = basis_pair(3);
        let same = CatConfiguration::new(0.5, [e1.clone(), e2.clone()], [e1.clone(), e2.clone()])
            .unwrap();
        assert!((overlap(&same).unwrap().value() - 2.0).abs() <= 1e-15);
        let flipped = CatConfiguration::new(
            0.5,
            [e1.clone(), e2.clone()],
            [e1.scaled(Complex64::new(-1.0, 0.0)), e2.clone()],
        )
        .unwrap();
        assert!((overlap(&flipped).unwrap().value() + 2.0).abs() <= 1e-15);
    }

    #[test]
    fn branch_overlap_rejects_values_beyond_the_interval() {
        assert!(BranchOverlap::new(2.0 + 1e-13).is_ok());
        assert!(BranchOverlap::new(2.1).is_err());
        assert!(BranchOverlap::new(f64::NAN).is_err());
    }

    #[test]
    fn configuration_rejects_non_orthonormal_environments() {
        let (e1, e2) = basis_pair(2);
        let err = CatConfiguration::new(0.5, [e1.clone(), e1.clone()], [e1.clone(), e2.clone()]);
        assert!(matches!(err, Err(Error::NotOrthonormal { .. })));
        let err = CatConfiguration::new(1.5, [e1.clone(), e2.clone()], [e1, e2]);
        assert!(matches!(err, Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn optimal_configuration_branches_match_the_construct_family_entrywise() {
        let (p1, p2) = basis_pair(4);
        let cfg = optimal_configuration(&p1, &p2).unwrap();
        let (chi1, chi2) = branch_pair(&cfg).unwrap();
        let triple = construct_optimal(&p1, &p2).unwrap();
        for k in 0..4 {
            for q in 0..2 {
                let da = (chi1.amp().get(q, k) - triple.alive_branch.amp().get(q, k)).norm();
                let db = (chi2.amp().get(q, k) - triple.dead_branch.amp().get(q, k)).norm();
                assert!(da <= 1e-15 && db <= 1e-15, "entry ({q}, {k})");
            }
        }
    }

    #[test]
    fn sign_flipped_configuration_matches_only_up_to_phase() {
        // Moving the sign from the dead to the alive environment of the
        // second branch flips that branch's global phase: same ray, different
        // entries.
        let (p1, p2) = basis_pair(2);
        let cfg = CatConfiguration::new(
            optimal_schmidt_coefficient(),
            [p1.clone(), p2.clone()],
            [p1.scaled(Complex64::new(-1.0, 0.0)), p2.clone()],
        )
        .unwrap();
        let (_, chi2) = branch_pair(&cfg).unwrap();
        let triple = construct_optimal(&p1, &p2).unwrap();
        assert!(ray_distance_of(&chi2, &triple.dead_branch) <= 1e-12);
        let entry_gap = (chi2.amp().get(0, 0) - triple.dead_branch.amp().get(0, 0)).norm();
        assert!(entry_gap > 0.5, "entries should differ by the phase flip");
    }

    fn ray_distance_of(a: &BipartiteKet, b: &BipartiteKet) -> f64 {
        crate::quantum::ray_distance(a, b).unwrap()
    }

    #[test]
    fn branch_pair_at_endpoint_weights_gives_product_branches() {
        let (e1, e2) = basis_pair(2);
        let cfg = CatConfiguration::new(1.0, [e1.clone(), e2.clone()], [e1, e2]).unwrap();
        let (chi1, chi2) = branch_pair(&cfg).unwrap();
        assert!((chi1.amp().get(0, 0).re - 1.0).abs() <= 1e-15);
        assert!((chi2.amp().get(1, 1).re - 1.0).abs() <= 1e-15);
        assert!(inner_ket(&chi1, &chi2).unwrap().norm() <= 1e-15);
    }

    #[test]
    fn branches_stay_orthogonal_across_coefficients_for_the_optimal_sign_pattern() {
        let (p1, p2) = basis_pair(3);
        for i in 1..20 {
            let lam = (i as f64) / 20.0;
            let cfg = CatConfiguration::new(
                lam,
                [p1.clone(), p2.clone()],
                [p1.clone(), p2.scaled(Complex64::new(-1.0, 0.0))],
            )
            .unwrap();
            let (chi1, chi2) = branch_pair(&cfg).unwrap();
            // <chi1|chi2> = lam*mu - mu*lam = 0 for this sign pattern.
            assert!(inner_ket(&chi1, &chi2).unwrap().norm() <= 1e-14);
        }
    }

    #[test]
    fn superposition_env_states_at_the_optimal_configuration_are_exact() {
        let (p1, p2) = basis_pair(5);
        let cfg = optimal_configuration(&p1, &p2).unwrap();
        let env = superposition_env_states(&cfg).unwrap();
        assert!(env.norm_residuals[0] <= 1e-12);
        assert!(env.norm_residuals[1] <= 1e-12);
        assert!(env.cross_overlap <= 1e-12);
        // The candidates collapse onto the configuration's own environments:
        // + psi1 on the alive row, - psi2 on the dead row.
        assert!((inner(&env.alive_env, &p1).unwrap().re - 1.0).abs() <= 1e-12);
        assert!((inner(&env.dead_env, &p2).unwrap().re + 1.0).abs() <= 1e-12);
    }

    #[test]
    fn superposition_env_states_with_identical_environments_balance_only_one_row() {
        // With phi_i = psi_i, the alive-row candidate has norm
        // (lambda + mu) / (sqrt(2) lambda), which is 1 exactly at the
        // extremal coefficient -- but the dead-row candidate then overshoots
        // to 1 + sqrt(2). The mirror coefficient swaps the two roles. No
        // single coefficient balances both rows for this sign pattern.
        let (p1, p2) = basis_pair(2);
        let lam = lambda_from_overlap(BranchOverlap::new(-2.0).unwrap());
        let cfg = CatConfiguration::new(lam, [p1.clone(), p2.clone()], [p1.clone(), p2.clone()])
            .unwrap();
        let env = superposition_env_states(&cfg).unwrap();
        assert!(env.norm_residuals[0] <= 1e-12);
        assert!((env.norm_residuals[1] - std::f64::consts::SQRT_2).abs() <= 1e-12);
        let mirrored = CatConfiguration::new(
            lambda_from_overlap(BranchOverlap::new(2.0).unwrap()),
            [p1.clone(), p2.clone()],
            [p1, p2],
        )
        .unwrap();
        let env = superposition_env_states(&mirrored).unwrap();
        assert!(env.norm_residuals[0] > 0.5);
        assert!(env.norm_residuals[1] <= 1e-12);
    }

    #[test]
    fn superposition_env_states_reject_endpoint_coefficients() {
        let (e1, e2) = basis_pair(2);
        for lam in [0.0, 1.0] {
            let cfg =
                CatConfiguration::new(lam, [e1.clone(), e2.clone()], [e1.clone(), e2.clone()])
                    .unwrap();
            assert!(matches!(
                superposition_env_states(&cfg),
                Err(Error::SingularConfiguration(_))
            ));
        }
    }

    #[test]
    fn optimal_triple_is_feasible_under_strict_tolerances() {
        for d in [2usize, 3, 7] {
            let triple = construct_optimal_canonical(d).unwrap();
            let report = check_constraints(
                &triple.alive_branch,
                &triple.dead_branch,
                &ConstraintTolerances::strict(),
            )
            .unwrap();
            assert!(report.feasible, "d = {d}: {report:?}");
            let rho = partial_trace_env(&triple.superposition);
            assert!((p_alive(&rho) - optimal_alive_probability()).abs() <= 1e-12);
            // The superposition's reduced state equals the first branch's.
            let rho1 = partial_trace_env(&triple.alive_branch);
            assert!(trace_distance(&rho, &rho1) <= 1e-12);
        }
    }

    #[test]
    fn equal_weight_combination_of_optimal_branches_recovers_the_superposition() {
        let triple = construct_optimal_canonical(3).unwrap();
        let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let combined = combine(half, &triple.alive_branch, half, &triple.dead_branch).unwrap();
        assert!(combined.unit_combination());
        assert!(ray_distance_of(&combined.ket, &triple.superposition) <= 1e-12);
        // Entrywise too: (m + s) / sqrt(2) = m is an algebraic identity of
        // the extremal coefficient.
        for q in 0..2 {
            for k in 0..3 {
                let gap =
                    (combined.ket.amp().get(q, k) - triple.superposition.amp().get(q, k)).norm();
                assert!(gap <= 1e-14);
            }
        }
    }

    #[test]
    fn same_qubit_row_branches_fail_only_the_bloch_constraint() {
        // Two kets living entirely on the alive row: orthogonal environments
        // make c1 vanish (and c2 as well), but both Bloch vectors sit at the
        // north pole so c3 is 2.
        let (e1, e2) = basis_pair(2);
        let zero = CVector::new(vec![Complex64::new(0.0, 0.0); 2]).unwrap();
        let chi1 = BipartiteKet::from_branch_rows(&e1, &zero).unwrap();
        let chi2 = BipartiteKet::from_branch_rows(&e2, &zero).unwrap();
        let report =
            check_constraints(&chi1, &chi2, &ConstraintTolerances::strict()).unwrap();
        assert!(report.c1_chi_overlap <= 1e-15);
        assert!((report.c3_bloch_antipodal - 2.0).abs() <= 1e-12);
        assert!(!report.feasible);
    }

    #[test]
    fn check_constraints_rejects_mismatched_environment_dimensions() {
        let a = construct_optimal_canonical(2).unwrap();
        let b = construct_optimal_canonical(3).unwrap();
        assert!(matches!(
            check_constraints(&a.alive_branch, &b.dead_branch, &ConstraintTolerances::strict()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn construct_optimal_rejects_bad_environment_pairs() {
        let e1 = CVector::basis(3, 0).unwrap();
        assert!(matches!(
            construct_optimal(&e1, &e1),
            Err(Error::NotOrthonormal { .. })
        ));
        assert!(matches!(
            construct_optimal_canonical(1),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            construct_optimal_seeded(0, 7),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn seeded_construction_is_deterministic_and_feasible() {
        let a = construct_optimal_seeded(4, 42).unwrap();
        let b = construct_optimal_seeded(4, 42).unwrap();
        for q in 0..2 {
            for k in 0..4 {
                assert_eq!(a.superposition.amp().get(q, k), b.superposition.amp().get(q, k));
            }
        }
        let report = check_constraints(
            &a.alive_branch,
            &a.dead_branch,
            &ConstraintTolerances::strict(),
        )
        .unwrap();
        assert!(report.feasible, "{report:?}");
        let rho = partial_trace_env(&a.superposition);
        assert!((p_alive(&rho) - optimal_alive_probability()).abs() <= 1e-12);
    }

    #[test]
    fn qubit_triplet_geometry() {
        let triple = qubit_triplet().unwrap();
        let [alive, dead, sup] = triple.bloch_vectors().unwrap();
        let z = std::f64::consts::FRAC_1_SQRT_2;
        for (v, (ex, ey, ez)) in [
            (&alive, (z, 0.0, z)),
            (&dead, (-z, 0.0, -z)),
            (&sup, (-z, 0.0, z)),
        ] {
            assert!((v.x - ex).abs() <= 1e-12, "{v:?}");
            assert!((v.y - ey).abs() <= 1e-12, "{v:?}");
            assert!((v.z - ez).abs() <= 1e-12, "{v:?}");
            assert!((v.length() - 1.0).abs() <= 1e-12);
        }
        // Alive and dead are antipodal; the superposition is perpendicular
        // to their axis and hence equidistant from both poles.
        assert!((alive.dot(&dead) + 1.0).abs() <= 1e-12);
        assert!(sup.dot(&alive).abs() <= 1e-12);
        assert!(sup.dot(&dead).abs() <= 1e-12);
        // The superposition state is the equal combination of the branches.
        let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let recombined = triple.alive.scaled(half).axpy(half, &triple.dead).unwrap();
        for q in 0..2 {
            assert!((recombined.get(q) - triple.superposition.get(q)).norm() <= 1e-14);
        }
    }

    proptest! {
        #[test]
        fn residual_roots_exactly_at_the_closed_form(a in -2.0f64..=2.0) {
            let overlap = BranchOverlap::new(a).unwrap();
            let lam = lambda_from_overlap(overlap);
            prop_assert!(lam > 0.0 && lam < 1.0);
            prop_assert!(overlap_residual(lam, overlap).unwrap().abs() <= 1e-12);
        }

        #[test]
        fn lambda_monotone_on_random_pairs(a in -2.0f64..=2.0, b in -2.0f64..=2.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let l_lo = lambda_from_overlap(BranchOverlap::new(lo).unwrap());
            let l_hi = lambda_from_overlap(BranchOverlap::new(hi).unwrap());
            prop_assert!(l_lo > l_hi);
        }
    }
}
