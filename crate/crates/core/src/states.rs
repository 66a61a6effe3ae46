//! Bipartite density matrices and the state families used throughout the crate.
//!
//! Basis order is `|00⟩, |01⟩, |10⟩, |11⟩` with the first label on subsystem 1.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, eig_hermitian, kron, partial_trace, ComplexMatrix, Subsystem};

/// Validation tolerance for Hermiticity, unit trace and positivity.
pub const STATE_TOL: f64 = 1e-10;

/// Sum-to-one tolerance for [`ClassicalProbs`].
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A validated bipartite density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and PSD (all within [`STATE_TOL`]).
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let (d1, d2) = dims;
        if d1 == 0 || d2 == 0 || matrix.dim() != d1 * d2 {
            return Err(Error::DimensionMismatch {
                expected: d1 * d2,
                actual: matrix.dim(),
            });
        }
        let spectrum = eig_hermitian(&matrix)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = spectrum.eigenvalues[0];
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            dims,
        })
    }

    /// Two-qubit shorthand for [`DensityMatrix::new`].
    pub fn two_qubit(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(matrix, (2, 2))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    /// Composite Hilbert-space dimension `d1 · d2`.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims == (2, 2)
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dims, keep).expect("dims checked at construction")
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`.
    pub fn apply_local_unitary(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Self> {
        if u.dim() != self.dims.0 || v.dim() != self.dims.1 {
            return Err(Error::DimensionMismatch {
                expected: self.dims.0,
                actual: u.dim(),
            });
        }
        let w = kron(u, v);
        Self::new(self.matrix.conjugate_by(&w), self.dims)
    }

    /// Product of independently drawn local states, `A ⊗ B`.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        Self::new(kron(&a.matrix, &b.matrix), (a.dim(), b.dim()))
    }
}

/// Diagonal two-qubit state weights `(p00, p01, p10, p11)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalProbs {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

impl ClassicalProbs {
    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        let p = Self { p00, p01, p10, p11 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ps = self.as_array();
        if let Some(bad) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidProbabilities(format!("{bad} not in [0, 1]")));
        }
        let sum: f64 = ps.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidProbabilities(format!("sum {sum} != 1")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    /// Marginal of subsystem 1: `(p00 + p01, p10 + p11)`.
    pub fn marginal_first(&self) -> [f64; 2] {
        [self.p00 + self.p01, self.p10 + self.p11]
    }

    /// Marginal of subsystem 2: `(p00 + p10, p01 + p11)`.
    pub fn marginal_second(&self) -> [f64; 2] {
        [self.p00 + self.p10, self.p01 + self.p11]
    }

    /// The one-parameter family with `p10 = 1/8`, `p11 = 3/8`, `p01 = 1/2 - p00`.
    pub fn crossing_family(p00: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p00) {
            return Err(Error::OutOfRange {
                name: "p00",
                value: p00,
                range: "[0, 1/2]",
            });
        }
        Self::new(p00, 0.5 - p00, 0.125, 0.375)
    }
}

/// Werner mixing parameter `F ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct WernerParam(f64);

impl WernerParam {
    pub fn new(f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::OutOfRange {
                name: "F",
                value: f,
                range: "[0, 1]",
            });
        }
        Ok(Self(f))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Local observable label: identity or one of the three Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    pub const PAULI: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn label(self) -> char {
        match self {
            Axis::I => 'i',
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match axis {
        Axis::I => ComplexMatrix::identity(2),
        Axis::X => ComplexMatrix::from_rows([[o, one], [one, o]]),
        Axis::Y => ComplexMatrix::from_rows([[o, -i], [i, o]]),
        Axis::Z => ComplexMatrix::from_rows([[one, o], [o, -one]]),
    }
}

pub fn classical_state(p: &ClassicalProbs) -> Result<DensityMatrix> {
    p.validate()?;
    DensityMatrix::two_qubit(ComplexMatrix::from_diag(&p.as_array()))
}

/// Singlet `(|01⟩ - |10⟩)/√2`.
pub fn singlet() -> [Complex64; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::new(0.0, 0.0),
    ]
}

/// `(1-F)/3 · I⊗I + (4F-1)/3 · |Ψ⁻⟩⟨Ψ⁻|`.
pub fn werner(w: WernerParam) -> Result<DensityMatrix> {
    let f = w.value();
    let noise = ComplexMatrix::identity(4).scale((1.0 - f) / 3.0);
    let sing = ComplexMatrix::outer(&singlet()).scale((4.0 * f - 1.0) / 3.0);
    DensityMatrix::two_qubit(&noise + &sing)
}

/// `ρ₁ ⊗ ρ₂` built from the two reduced states of `rho`.
pub fn marginal_product(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let a = rho.reduced(Subsystem::First);
    let b = rho.reduced(Subsystem::Second);
    DensityMatrix::new(kron(&a, &b), rho.dims())
}

fn gaussian_matrix(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let data = (0..dim * dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    ComplexMatrix::from_vec(data).expect("square by construction")
}

/// Seeded Ginibre state `G G† / Tr(G G†)`.
///
/// `dim` 4 is split as two qubits; `dim` 2 is a single qubit tagged `(2, 1)`.
pub fn random_density(dim: usize, seed: u64) -> Result<DensityMatrix> {
    let dims = match dim {
        2 => (2, 1),
        4 => (2, 2),
        _ => {
            return Err(Error::OutOfRange {
                name: "dim",
                value: dim as f64,
                range: "{2, 4}",
            })
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(dim, &mut rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(w.scale(1.0 / tr), dims)
}

/// Gram-Schmidt orthonormalization of the columns of a seeded Gaussian matrix.
fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = gaussian_matrix(dim, rng);
    let mut q = ComplexMatrix::zeros(dim);
    for k in 0..dim {
        let mut col: Vec<Complex64> = (0..dim).map(|i| g[(i, k)]).collect();
        for j in 0..k {
            let proj: Complex64 = (0..dim).map(|i| q[(i, j)].conj() * col[i]).sum();
            for (i, c) in col.iter_mut().enumerate() {
                *c -= proj * q[(i, j)];
            }
        }
        let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for (i, c) in col.iter().enumerate() {
            q[(i, k)] = c / norm;
        }
    }
    q
}

/// Two seeded single-qubit unitaries `(U, V)`.
pub fn random_local_unitary(seed: u64) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(2, &mut rng);
    let v = random_unitary(2, &mut rng);
    (u, v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Kraus set `{√(1-3p/4) I, √(p/4) X, √(p/4) Y, √(p/4) Z}`.
    Depolarizing,
    /// Kraus set `{√(1-p/2) I, √(p/2) Z}`.
    Dephasing,
}

impl ChannelKind {
    fn kraus(self, p: f64) -> Vec<ComplexMatrix> {
        match self {
            ChannelKind::Depolarizing => {
                let mut ops = vec![pauli(Axis::I).scale((1.0 - 0.75 * p).sqrt())];
                ops.extend(Axis::PAULI.iter().map(|&a| pauli(a).scale((p / 4.0).sqrt())));
                ops
            }
            ChannelKind::Dephasing => vec![
                pauli(Axis::I).scale((1.0 - 0.5 * p).sqrt()),
                pauli(Axis::Z).scale((p / 2.0).sqrt()),
            ],
        }
    }
}

/// Applies a single-qubit channel of the given strength to one side of a two-qubit state.
pub fn local_channel(
    rho: &DensityMatrix,
    kind: ChannelKind,
    strength: f64,
    subsystem: Subsystem,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&strength) {
        return Err(Error::OutOfRange {
            name: "strength",
            value: strength,
            range: "[0, 1]",
        });
    }
    if !rho.is_two_qubit() {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let id = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::zeros(4);
    for k in kind.kraus(strength) {
        let lifted = match subsystem {
            Subsystem::First => kron(&k, &id),
            Subsystem::Second => kron(&id, &k),
        };
        out = &out + &rho.matrix().conjugate_by(&lifted);
    }
    DensityMatrix::new(out, rho.dims())
}

/// Minimum eigenvalue of a Hermitian matrix.
pub(crate) fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(linalg::eig_hermitian(m)?.eigenvalues[0])
}
