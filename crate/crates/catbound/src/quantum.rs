//! States of one qubit entangled with a d-dimensional environment: bipartite
//! kets, reduced density matrices, Bloch geometry, and Schmidt decomposition.
//!
//! Conventions used throughout the crate:
//! * amplitude row 0 is the "alive" qubit branch, row 1 the "dead" branch;
//! * the Bloch map is `z = rho_00 - rho_11`, `x = 2 Re rho_01`,
//!   `y = -2 Im rho_01`, so a pure alive qubit sits at the north pole;
//! * trace distance is half the sum of the absolute eigenvalues of the
//!   difference matrix.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Norm deviation above which a combination stops counting as unit-norm.
pub const UNIT_COMBINATION_TOL: f64 = 1e-10;

/// A unit-norm pure state of qubit (x) environment, stored as a 2 x d
/// amplitude matrix with Frobenius norm 1 within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteKet {
    amp: CMatrix,
}

impl BipartiteKet {
    /// Wraps an amplitude matrix, enforcing the 2 x d shape and unit norm.
    pub fn new(amp: CMatrix) -> Result<Self> {
        if amp.rows() != 2 {
            return Err(Error::DimensionMismatch {
                context: "BipartiteKet::new",
                expected: 2,
                got: amp.rows(),
            });
        }
        let norm = amp.frobenius_norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                context: "BipartiteKet::new (norm)",
                value: norm,
                range: "1 +- 1e-12",
            });
        }
        Ok(Self { amp })
    }

    /// Builds a ket from the two branch rows, normalizing the whole matrix.
    pub fn from_branch_rows(alive: &CVector, dead: &CVector) -> Result<Self> {
        let m = CMatrix::from_rows(&[alive.clone(), dead.clone()])?;
        let norm = m.frobenius_norm();
        if norm < 1e-300 {
            return Err(Error::ZeroNorm { norm });
        }
        let inv = Complex64::new(1.0 / norm, 0.0);
        let data: Vec<Complex64> = (0..2)
            .flat_map(|q| m.row(q).iter().map(|z| z * inv).collect::<Vec<_>>())
            .collect();
        Self::new(CMatrix::new(2, m.cols(), data)?)
    }

    pub fn env_dim(&self) -> usize {
        self.amp.cols()
    }

    pub fn amp(&self) -> &CMatrix {
        &self.amp
    }

    /// The unnormalized environment row conditioned on qubit branch `q`.
    pub fn branch_row(&self, q: usize) -> CVector {
        self.amp.row_vector(q)
    }
}

/// Full inner product of two kets, conjugate-linear in the first argument.
pub fn inner_ket(a: &BipartiteKet, b: &BipartiteKet) -> Result<Complex64> {
    if a.env_dim() != b.env_dim() {
        return Err(Error::DimensionMismatch {
            context: "inner_ket",
            expected: a.env_dim(),
            got: b.env_dim(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for q in 0..2 {
        acc += linalg::inner_slices(a.amp.row(q), b.amp.row(q));
    }
    Ok(acc)
}

/// Distance between the rays of two kets, insensitive to global phase:
/// sqrt(1 - |<a|b>|^2).
pub fn ray_distance(a: &BipartiteKet, b: &BipartiteKet) -> Result<f64> {
    let ov = inner_ket(a, b)?.norm_sqr();
    Ok((1.0 - ov).max(0.0).sqrt())
}

/// Product ket of a qubit state and an environment state; unnormalized
/// inputs are normalized.
pub fn tensor(qubit: &CVector, env: &CVector) -> Result<BipartiteKet> {
    if qubit.dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "tensor (qubit)",
            expected: 2,
            got: qubit.dim(),
        });
    }
    let q = qubit.normalized()?;
    let e = env.normalized()?;
    let d = e.dim();
    let mut data = Vec::with_capacity(2 * d);
    for qi in 0..2 {
        for k in 0..d {
            data.push(q.get(qi) * e.get(k));
        }
    }
    BipartiteKet::new(CMatrix::new(2, d, data)?)
}

/// A linear combination of two kets, renormalized, together with how far the
/// pre-normalization norm sat from 1. To check that an equal-weight
/// superposition of orthogonal branches is itself unit norm, inspect
/// [`Combined::unit_combination`].
#[derive(Debug, Clone)]
pub struct Combined {
    pub ket: BipartiteKet,
    pub norm_deviation: f64,
}

impl Combined {
    pub fn unit_combination(&self) -> bool {
        self.norm_deviation <= UNIT_COMBINATION_TOL
    }
}

/// Returns `normalize(a * u + b * v)` plus the pre-normalization deviation.
pub fn combine(
    a: Complex64,
    u: &BipartiteKet,
    b: Complex64,
    v: &BipartiteKet,
) -> Result<Combined> {
    if u.env_dim() != v.env_dim() {
        return Err(Error::DimensionMismatch {
            context: "combine",
            expected: u.env_dim(),
            got: v.env_dim(),
        });
    }
    if a.norm_sqr() + b.norm_sqr() <= 0.0 {
        return Err(Error::ZeroNorm { norm: 0.0 });
    }
    let d = u.env_dim();
    let mut data = Vec::with_capacity(2 * d);
    for q in 0..2 {
        for k in 0..d {
            data.push(a * u.amp.get(q, k) + b * v.amp.get(q, k));
        }
    }
    let raw = CMatrix::new(2, d, data)?;
    let norm = raw.frobenius_norm();
    if norm < 1e-12 {
        return Err(Error::ZeroNorm { norm });
    }
    let inv = Complex64::new(1.0 / norm, 0.0);
    let scaled: Vec<Complex64> = (0..2)
        .flat_map(|q| raw.row(q).iter().map(|z| z * inv).collect::<Vec<_>>())
        .collect();
    Ok(Combined {
        ket: BipartiteKet::new(CMatrix::new(2, d, scaled)?)?,
        norm_deviation: (norm - 1.0).abs(),
    })
}

/// A qubit density matrix: Hermitian, unit trace, positive semidefinite
/// (eigenvalues above -1e-12).
#[derive(Debug, Clone, PartialEq)]
pub struct CatDensity {
    entries: [[Complex64; 2]; 2],
}

impl CatDensity {
    pub fn from_entries(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let herm = (entries[0][1] - entries[1][0].conj()).norm()
            + entries[0][0].im.abs()
            + entries[1][1].im.abs();
        if herm > 1e-12 {
            return Err(Error::NotOrthonormal {
                context: "CatDensity (hermiticity)",
                residual: herm,
            });
        }
        let trace = entries[0][0].re + entries[1][1].re;
        if (trace - 1.0).abs() > 1e-12 {
            return Err(Error::OutOfRange {
                context: "CatDensity (trace)",
                value: trace,
                range: "1 +- 1e-12",
            });
        }
        let rho = Self { entries };
        let [_, low] = rho.eigenvalues();
        if low < -1e-12 {
            return Err(Error::OutOfRange {
                context: "CatDensity (positivity)",
                value: low,
                range: ">= -1e-12",
            });
        }
        Ok(rho)
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r][c]
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let (evals, _) = linalg::eig2_hermitian(
            self.entries[0][0].re,
            self.entries[0][1],
            self.entries[1][1].re,
        );
        evals
    }

    /// tr(rho^2); for Hermitian matrices this is the sum of squared entry
    /// magnitudes.
    pub fn purity(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
    }

    /// Equal-weight mixture of two densities; exact arithmetic average.
    pub fn blend(a: &CatDensity, b: &CatDensity) -> Result<CatDensity> {
        let half = Complex64::new(0.5, 0.0);
        let mut entries = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                entries[r][c] = half * (a.entries[r][c] + b.entries[r][c]);
            }
        }
        CatDensity::from_entries(entries)
    }
}

/// Reduced qubit density matrix: trace over the environment,
/// rho[q][q'] = sum_k amp[q][k] conj(amp[q'][k]).
pub fn partial_trace_env(ket: &BipartiteKet) -> CatDensity {
    let m = ket.amp();
    let d = ket.env_dim();
    let mut e00 = 0.0;
    let mut e11 = 0.0;
    let mut e01 = Complex64::new(0.0, 0.0);
    for k in 0..d {
        e00 += m.get(0, k).norm_sqr();
        e11 += m.get(1, k).norm_sqr();
        e01 += m.get(0, k) * m.get(1, k).conj();
    }
    // Hermitian by construction; positivity and trace follow from unit norm.
    CatDensity {
        entries: [
            [Complex64::new(e00, 0.0), e01],
            [e01.conj(), Complex64::new(e11, 0.0)],
        ],
    }
}

/// Pure-state density matrix |v><v| of a single qubit state (dimension 2).
/// The input is normalized first, so any nonzero qubit vector is accepted.
pub fn qubit_density(v: &CVector) -> Result<CatDensity> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch {
            context: "qubit density",
            expected: 2,
            got: v.dim(),
        });
    }
    let u = v.normalized()?;
    Ok(CatDensity {
        entries: [
            [
                Complex64::new(u.get(0).norm_sqr(), 0.0),
                u.get(0) * u.get(1).conj(),
            ],
            [
                u.get(1) * u.get(0).conj(),
                Complex64::new(u.get(1).norm_sqr(), 0.0),
            ],
        ],
    })
}

/// A point in the Bloch ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn add(&self, other: &BlochVector) -> BlochVector {
        BlochVector {
            x: self.x + other.x,
            y: self.y + other.y,
            z: self.z + other.z,
        }
    }
}

/// Bloch vector of a qubit density matrix.
pub fn bloch(rho: &CatDensity) -> BlochVector {
    let r01 = rho.entry(0, 1);
    BlochVector {
        x: 2.0 * r01.re,
        y: -2.0 * r01.im,
        z: rho.entry(0, 0).re - rho.entry(1, 1).re,
    }
}

/// Probability of the alive branch: the (0,0) entry clamped to [0, 1].
pub fn p_alive(rho: &CatDensity) -> f64 {
    rho.entry(0, 0).re.clamp(0.0, 1.0)
}

/// Trace distance between two qubit densities: half the sum of the absolute
/// eigenvalues of the difference.
pub fn trace_distance(a: &CatDensity, b: &CatDensity) -> f64 {
    let d00 = a.entry(0, 0).re - b.entry(0, 0).re;
    let d11 = a.entry(1, 1).re - b.entry(1, 1).re;
    let d01 = a.entry(0, 1) - b.entry(0, 1);
    let (evals, _) = linalg::eig2_hermitian(d00, d01, d11);
    0.5 * (evals[0].abs() + evals[1].abs())
}

/// Schmidt decomposition of a bipartite ket, labeled by which branch is more
/// alive: the qubit vector with the larger weight on the alive basis state
/// carries `coeff_alive` (ties broken toward the larger singular value).
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub coeff_alive: f64,
    pub coeff_dead: f64,
    /// Qubit-side Schmidt vectors, alive-labeled first.
    pub qubit_vecs: [CVector; 2],
    /// Environment-side Schmidt vectors, alive-labeled first.
    pub env_vecs: [CVector; 2],
    /// Set when the dead-branch coefficient vanished and its environment
    /// vector is a substitute direction rather than data.
    pub rank_one: bool,
}

impl SchmidtForm {
    /// Rebuilds the ket: sum of coeff * qubit (x) env over both branches.
    pub fn reconstruct(&self) -> Result<BipartiteKet> {
        let d = self.env_vecs[0].dim();
        let coeffs = [self.coeff_alive, self.coeff_dead];
        let mut data = vec![Complex64::new(0.0, 0.0); 2 * d];
        for b in 0..2 {
            for q in 0..2 {
                for k in 0..d {
                    data[q * d + k] +=
                        coeffs[b] * self.qubit_vecs[b].get(q) * self.env_vecs[b].get(k);
                }
            }
        }
        BipartiteKet::new(CMatrix::new(2, d, data)?)
    }
}

/// Schmidt decomposition via the closed-form SVD of the amplitude matrix.
pub fn schmidt(ket: &BipartiteKet) -> Result<SchmidtForm> {
    let svd = linalg::svd_2xd(ket.amp())?;
    let q = [
        CVector::new(vec![svd.left.get(0, 0), svd.left.get(1, 0)])?,
        CVector::new(vec![svd.left.get(0, 1), svd.left.get(1, 1)])?,
    ];
    let w0 = q[0].get(0).norm_sqr();
    let w1 = q[1].get(0).norm_sqr();
    // Alive label: larger weight on qubit basis state 0; a tie keeps the
    // descending singular-value order.
    let alive_first = if (w0 - w1).abs() <= 1e-12 { true } else { w0 > w1 };
    let order = if alive_first { [0, 1] } else { [1, 0] };

    let coeff_alive = svd.singular_values[order[0]];
    let coeff_dead = svd.singular_values[order[1]];
    Ok(SchmidtForm {
        coeff_alive,
        coeff_dead,
        qubit_vecs: [q[order[0]].clone(), q[order[1]].clone()],
        env_vecs: [
            svd.right_rows[order[0]].clone(),
            svd.right_rows[order[1]].clone(),
        ],
        rank_one: coeff_dead < linalg::SINGULAR_VALUE_FLOOR,
    })
}

// --- JSON wire format ---------------------------------------------------
//
// Kets serialize as {"env_dim": d, "amp": [[[re, im], ...] x2]}; densities
// as [[[re, im]; 2]; 2]. These shapes are part of the CLI contract.

#[derive(Serialize, Deserialize)]
struct KetWire {
    env_dim: usize,
    amp: Vec<Vec<[f64; 2]>>,
}

impl Serialize for BipartiteKet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.env_dim();
        let amp = (0..2)
            .map(|q| (0..d).map(|k| {
                let z = self.amp.get(q, k);
                [z.re, z.im]
            })
            .collect())
            .collect();
        KetWire { env_dim: d, amp }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BipartiteKet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = KetWire::deserialize(deserializer)?;
        if wire.env_dim == 0 {
            return Err(D::Error::custom("env_dim must be at least 1"));
        }
        if wire.amp.len() != 2 || wire.amp.iter().any(|row| row.len() != wire.env_dim) {
            return Err(D::Error::custom(format!(
                "amp must be 2 rows of {} entries",
                wire.env_dim
            )));
        }
        let data: Vec<Complex64> = wire
            .amp
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        let m = CMatrix::new(2, wire.env_dim, data).map_err(D::Error::custom)?;
        BipartiteKet::new(m).map_err(D::Error::custom)
    }
}

impl Serialize for CatDensity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: [[[f64; 2]; 2]; 2] = [
            [
                [self.entries[0][0].re, self.entries[0][0].im],
                [self.entries[0][1].re, self.entries[0][1].im],
            ],
            [
                [self.entries[1][0].re, self.entries[1][0].im],
                [self.entries[1][1].re, self.entries[1][1].im],
            ],
        ];
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CatDensity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = <[[[f64; 2]; 2]; 2]>::deserialize(deserializer)?;
        let entries = [
            [
                Complex64::new(wire[0][0][0], wire[0][0][1]),
                Complex64::new(wire[0][1][0], wire[0][1][1]),
            ],
            [
                Complex64::new(wire[1][0][0], wire[1][0][1]),
                Complex64::new(wire[1][1][0], wire[1][1][1]),
            ],
        ];
        CatDensity::from_entries(entries).map_err(D::Error::custom)
    }
}
