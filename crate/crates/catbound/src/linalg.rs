//! Small dense complex linear algebra sized for one qubit against a
//! d-dimensional environment: vectors, 2 x d matrices, and a closed-form
//! singular value decomposition that never calls an iterative eigensolver.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Complex amplitudes are plain double-precision pairs.
pub type ComplexScalar = Complex64;

/// Threshold below which a singular value is treated as zero and its right
/// vector is replaced by an arbitrary orthogonal unit vector.
pub const SINGULAR_VALUE_FLOOR: f64 = 1e-14;

/// Elimination residual below which a vector set counts as linearly dependent.
pub const DEPENDENCE_FLOOR: f64 = 1e-10;

/// A finite complex vector of dimension >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CVector {
    /// Builds a vector, rejecting empty data and non-finite entries.
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "CVector::new",
                expected: 1,
                got: 0,
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "CVector::new",
            });
        }
        Ok(Self { data })
    }

    /// Builds a vector from real parts only.
    pub fn from_reals(reals: &[f64]) -> Result<Self> {
        Self::new(reals.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    /// The k-th standard basis vector of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::DimensionMismatch {
                context: "CVector::basis",
                expected: dim,
                got: k,
            });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); dim];
        data[k] = Complex64::new(1.0, 0.0);
        Self::new(data)
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.data[k]
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Returns `self` scaled by a complex factor.
    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Returns `self + factor * other`.
    pub fn axpy(&self, factor: Complex64, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "CVector::axpy",
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    /// Returns the unit vector along `self`, or an error near the origin.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::ZeroNorm { norm: n });
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

/// A dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "CMatrix::new",
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "CMatrix::new",
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose rows are the given vectors (all same dimension).
    pub fn from_rows(rows: &[CVector]) -> Result<Self> {
        let ncols = rows
            .first()
            .map(CVector::dim)
            .ok_or(Error::DimensionMismatch {
                context: "CMatrix::from_rows",
                expected: 1,
                got: 0,
            })?;
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for r in rows {
            if r.dim() != ncols {
                return Err(Error::DimensionMismatch {
                    context: "CMatrix::from_rows",
                    expected: ncols,
                    got: r.dim(),
                });
            }
            data.extend_from_slice(r.as_slice());
        }
        Self::new(rows.len(), ncols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vector(&self, r: usize) -> CVector {
        CVector {
            data: self.row(r).to_vec(),
        }
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Inner product, conjugate-linear in the first argument: sum conj(a_k) b_k.
pub fn inner(a: &CVector, b: &CVector) -> Result<Complex64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            context: "inner",
            expected: a.dim(),
            got: b.dim(),
        });
    }
    Ok(inner_slices(a.as_slice(), b.as_slice()))
}

pub(crate) fn inner_slices(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z)
}

/// Orthonormalizes a list of vectors in order. The first output is the first
/// input normalized; an elimination residual below [`DEPENDENCE_FLOOR`] is a
/// linear-dependence error. Two elimination passes keep the result orthogonal
/// to well below 1e-12 even for nearly parallel inputs.
pub fn gram_schmidt(vectors: &[CVector]) -> Result<Vec<CVector>> {
    let mut out: Vec<CVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _pass in 0..2 {
            for q in &out {
                let c = inner(q, &w)?;
                w = w.axpy(-c, q)?;
            }
        }
        let residual = w.norm();
        if residual < DEPENDENCE_FLOOR {
            return Err(Error::LinearDependence { residual });
        }
        out.push(w.scaled(Complex64::new(1.0 / residual, 0.0)));
    }
    Ok(out)
}

/// Singular value decomposition of a 2 x d matrix: `m = left * diag(sigma) * rows`,
/// with `left` a 2 x 2 unitary whose columns are the left singular vectors and
/// `right_rows` holding the right singular vectors as rows.
#[derive(Debug, Clone)]
pub struct Svd2xd {
    pub left: CMatrix,
    pub singular_values: [f64; 2],
    pub right_rows: [CVector; 2],
}

impl Svd2xd {
    /// Rebuilds the decomposed matrix; used by reconstruction checks.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.right_rows[0].dim();
        let mut data = vec![Complex64::new(0.0, 0.0); 2 * d];
        for (i, &sigma) in self.singular_values.iter().enumerate() {
            for q in 0..2 {
                let uq = self.left.get(q, i);
                for k in 0..d {
                    data[q * d + k] += uq * sigma * self.right_rows[i].get(k);
                }
            }
        }
        CMatrix::new(2, d, data).expect("reconstruction shape is fixed")
    }
}

/// Eigen-decomposition of a 2 x 2 Hermitian matrix given as
/// [[h00, h01], [conj(h01), h11]] with real diagonal. Returns eigenvalues in
/// descending order and the matching orthonormal eigenvectors.
pub(crate) fn eig2_hermitian(
    h00: f64,
    h01: Complex64,
    h11: f64,
) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let half_trace = 0.5 * (h00 + h11);
    let half_gap = 0.5 * (h00 - h11);
    let disc = (half_gap * half_gap + h01.norm_sqr()).sqrt();
    let ev1 = half_trace + disc;
    let ev2 = half_trace - disc;

    let scale = h00.abs().max(h11.abs()).max(h01.norm()).max(1e-300);
    if h01.norm() <= 1e-16 * scale {
        // Effectively diagonal; order basis vectors by diagonal entries.
        let e1 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let e2 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        if h00 >= h11 {
            return ([ev1, ev2], [e1, e2]);
        }
        return ([ev1, ev2], [e2, e1]);
    }

    // Pick the better conditioned of the two analytic eigenvector forms.
    let cand_a = [h01, Complex64::new(ev1 - h00, 0.0)];
    let cand_b = [Complex64::new(ev1 - h11, 0.0), h01.conj()];
    let norm_a = (cand_a[0].norm_sqr() + cand_a[1].norm_sqr()).sqrt();
    let norm_b = (cand_b[0].norm_sqr() + cand_b[1].norm_sqr()).sqrt();
    let (raw, norm) = if norm_a >= norm_b {
        (cand_a, norm_a)
    } else {
        (cand_b, norm_b)
    };
    let inv = 1.0 / norm;
    let v1 = [raw[0] * inv, raw[1] * inv];
    // The second eigenvector of a Hermitian 2 x 2 is the orthogonal complement.
    let v2 = [-v1[1].conj(), v1[0].conj()];
    ([ev1, ev2], [v1, v2])
}

/// Closed-form SVD of a 2 x d matrix via the 2 x 2 Gram matrix m m^dagger.
///
/// Singular values are recomputed as norms of the projected rows
/// `u_i^dagger m`, which keeps the reconstruction exact to rounding even when
/// the Gram eigenproblem is ill-conditioned. Conventions: singular values in
/// descending order; each right row's first component of magnitude above
/// 1e-12 is made real non-negative with the phase absorbed into the left
/// column; a degenerate pair is ordered by lexicographic comparison of the
/// right rows.
pub fn svd_2xd(m: &CMatrix) -> Result<Svd2xd> {
    if m.rows() != 2 {
        return Err(Error::DimensionMismatch {
            context: "svd_2xd",
            expected: 2,
            got: m.rows(),
        });
    }
    let d = m.cols();

    let h00 = m.row(0).iter().map(|z| z.norm_sqr()).sum::<f64>();
    let h11 = m.row(1).iter().map(|z| z.norm_sqr()).sum::<f64>();
    // Gram entry H[0][1] = sum_k m[0][k] conj(m[1][k]).
    let h01 = inner_slices(m.row(1), m.row(0));
    let (_evals, vecs) = eig2_hermitian(h00, h01, h11);

    // Project the data onto each left vector; the row norm is the singular value.
    let mut sigmas = [0.0f64; 2];
    let mut raw_rows: [Vec<Complex64>; 2] = [vec![], vec![]];
    for i in 0..2 {
        let u = vecs[i];
        let mut row = Vec::with_capacity(d);
        for k in 0..d {
            row.push(u[0].conj() * m.get(0, k) + u[1].conj() * m.get(1, k));
        }
        sigmas[i] = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        raw_rows[i] = row;
    }

    let mut order = [0usize, 1usize];
    if sigmas[1] > sigmas[0] {
        order.swap(0, 1);
    }
    let mut left_cols = [vecs[order[0]], vecs[order[1]]];
    let mut singular_values = [sigmas[order[0]], sigmas[order[1]]];
    let rows_sorted = [raw_rows[order[0]].clone(), raw_rows[order[1]].clone()];

    // Normalize right rows; a vanished singular value gets a substitute
    // direction: the lowest-index basis vector orthogonalized against the
    // surviving row (duplicated direction when d = 1, where no orthogonal
    // vector exists).
    let mut right_rows: Vec<CVector> = Vec::with_capacity(2);
    for i in 0..2 {
        if singular_values[i] >= SINGULAR_VALUE_FLOOR {
            let inv = 1.0 / singular_values[i];
            right_rows.push(CVector::new(
                rows_sorted[i].iter().map(|z| z * inv).collect(),
            )?);
        } else {
            let other = if i == 0 { 1 } else { 0 };
            let partner: Option<CVector> = if singular_values[other] >= SINGULAR_VALUE_FLOOR {
                let inv = 1.0 / singular_values[other];
                Some(CVector::new(
                    rows_sorted[other].iter().map(|z| z * inv).collect(),
                )?)
            } else {
                right_rows.first().cloned()
            };
            right_rows.push(orthogonal_substitute(d, partner.as_ref())?);
        }
    }

    // Phase convention: first component with magnitude above 1e-12 becomes
    // real non-negative; the compensating phase moves into the left column.
    for i in 0..2 {
        if let Some(c) = right_rows[i]
            .as_slice()
            .iter()
            .copied()
            .find(|z| z.norm() > 1e-12)
        {
            let phase = c / c.norm();
            right_rows[i] = right_rows[i].scaled(phase.conj());
            left_cols[i] = [left_cols[i][0] * phase, left_cols[i][1] * phase];
        }
    }

    // Degenerate singular values: fall back to lexicographic row order.
    let gap = singular_values[0] - singular_values[1];
    if gap.abs() <= 1e-14 * singular_values[0].max(1.0)
        && lex_compare(&right_rows[1], &right_rows[0]) == std::cmp::Ordering::Less
    {
        right_rows.swap(0, 1);
        left_cols.swap(0, 1);
        singular_values.swap(0, 1);
    }

    let left = CMatrix::new(
        2,
        2,
        vec![
            left_cols[0][0],
            left_cols[1][0],
            left_cols[0][1],
            left_cols[1][1],
        ],
    )?;
    Ok(Svd2xd {
        left,
        singular_values,
        right_rows: [right_rows[0].clone(), right_rows[1].clone()],
    })
}

fn lex_compare(a: &CVector, b: &CVector) -> std::cmp::Ordering {
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        let re = x.re.total_cmp(&y.re);
        if re != std::cmp::Ordering::Equal {
            return re;
        }
        let im = x.im.total_cmp(&y.im);
        if im != std::cmp::Ordering::Equal {
            return im;
        }
    }
    std::cmp::Ordering::Equal
}

/// Lowest-index basis vector orthogonalized against `partner` (if any).
fn orthogonal_substitute(d: usize, partner: Option<&CVector>) -> Result<CVector> {
    let Some(p) = partner else {
        return CVector::basis(d, 0);
    };
    if d == 1 {
        // No orthogonal direction exists; duplicate the only basis vector.
        return CVector::basis(1, 0);
    }
    for k in 0..d {
        let e = CVector::basis(d, k)?;
        let c = inner(p, &e)?;
        let r = e.axpy(-c, p)?;
        if r.norm() > 0.5 {
            return r.normalized();
        }
    }
    // Unreachable for unit partner and d >= 2: at most one basis vector can
    // overlap the partner by more than sqrt(3)/2.
    Err(Error::LinearDependence { residual: 0.0 })
}

/// Draws a Haar-like random unit vector: independent standard Gaussian real
/// and imaginary parts, then normalization. The distribution is invariant
/// under unitary change of basis.
pub fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> Result<CVector> {
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            context: "random_unit",
            expected: 1,
            got: 0,
        });
    }
    loop {
        let data: Vec<Complex64> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im)
            })
            .collect();
        let v = CVector::new(data)?;
        if v.norm() > 1e-6 {
            return v.normalized();
        }
        // Norm this small has probability ~1e-24 per draw; redraw keeps the
        // output well defined without biasing the distribution measurably.
    }
}
