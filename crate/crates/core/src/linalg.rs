//! Dense complex matrices for small Hilbert spaces.
//!
//! Everything here is sized for two qubits (dim 4) or single qubits (dim 2).
//! The eigensolver is a cyclic complex Jacobi iteration, which is accurate to
//! round-off at these sizes and needs no external LAPACK.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum tolerated `|h - h†|` entry for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Off-diagonal threshold at which Jacobi sweeps stop (scaled by the largest entry when it exceeds 1).
pub const JACOBI_TOL: f64 = 1e-13;

/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries; `data.len()` must be a perfect square.
    pub fn from_vec(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Self {
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self { dim: N, data }
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entrywise difference; `INFINITY` when dims differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max entry of `|h - h†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(h + h†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        m
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > HERMITIAN_TOL || deviation.is_nan() {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V · diag(g(λ)) · V†`.
    pub fn compose(&self, g: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.compose(|l| l)
    }

    /// `⟨v_k| m |v_k⟩` for every eigenvector, i.e. the diagonal of `m` in this eigenbasis.
    pub fn diagonal_of(&self, m: &ComplexMatrix) -> Vec<f64> {
        let v = &self.eigenvectors;
        let n = v.dim();
        (0..n)
            .map(|k| {
                let mut acc = ZERO;
                for i in 0..n {
                    let mut row = ZERO;
                    for j in 0..n {
                        row += m[(i, j)] * v[(j, k)];
                    }
                    acc += v[(i, k)].conj() * row;
                }
                acc.re
            })
            .collect()
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a[(i, j)];
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k, j * db + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Hermitian eigen-decomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized before iterating so that round-off below the
/// Hermiticity tolerance does not leak into the spectrum. Eigenvalues come
/// back ascending; ties keep their diagonal order. Eigenvector phases are
/// arbitrary.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<Spectrum> {
    h.check_hermitian()?;
    let n = h.dim();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let tol = JACOBI_TOL * a.max_abs().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, col)] = v[(i, k)];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// One complex Jacobi rotation `a ← G† a G`, `v ← v G` zeroing `a[p][q]`.
///
/// `G` is a phase on column `q` (making `a[p][q]` real) followed by a real
/// Givens rotation in the `(p, q)` plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on rows/cols (p, q).
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;
    let n = a.dim();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * g_qp;
        a[(k, q)] = akp * s + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * g_qp.conj();
        a[(q, k)] = apk * s + aqk * g_qq.conj();
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * s + vkq * g_qq;
    }
}

/// Applies a real scalar function spectrally: `V · diag(f(λ)) · V†`.
///
/// Fails with [`Error::Domain`] if `f` returns a non-finite value at any
/// eigenvalue. Conventions such as `0 · ln 0` belong to the caller.
pub fn matrix_func(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let spectrum = eig_hermitian(h)?;
    if let Some(&eigenvalue) = spectrum.eigenvalues.iter().find(|&&l| !f(l).is_finite()) {
        return Err(Error::Domain { eigenvalue });
    }
    Ok(spectrum.compose(f))
}

/// `Tr|h| = Σ |λ_i|`.
pub fn trace_norm(h: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(h)?.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Unitary factor `W` of a polar decomposition `z = W' |z|`-style split such
/// that `Re Tr(z W)` is maximal, i.e. `W = V U†` for `z = U S V†`.
///
/// Right singular vectors come from the Hermitian eigenproblem of `z† z`;
/// left ones are `z v / ‖z v‖`, orthonormalized in order of decreasing
/// singular value and completed from the standard basis when `z` is rank
/// deficient.
pub fn polar_unitary(z: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = z.dim();
    let v = eig_hermitian(&(&z.adjoint() * z))?.eigenvectors;

    let mut cols: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|k| {
            let zv: Vec<Complex64> = (0..n)
                .map(|i| (0..n).map(|j| z[(i, j)] * v[(j, k)]).sum())
                .collect();
            let s = zv.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            (s, zv)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cols[b].0.total_cmp(&cols[a].0));
    let s_max = cols[order[0]].0;

    let mut u = ComplexMatrix::zeros(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut filled = vec![false; n];
    for &k in &order {
        let (s, ref mut col) = cols[k];
        if s <= 1e-14 * s_max.max(f64::MIN_POSITIVE) {
            continue;
        }
        if let Some(q) = orthonormalize(col, &basis) {
            for i in 0..n {
                u[(i, k)] = q[i];
            }
            basis.push(q);
            filled[k] = true;
        }
    }
    let mut unit = 0;
    for k in 0..n {
        if filled[k] {
            continue;
        }
        loop {
            let mut e = vec![ZERO; n];
            e[unit] = ONE;
            unit += 1;
            if let Some(q) = orthonormalize(&mut e, &basis) {
                for i in 0..n {
                    u[(i, k)] = q[i];
                }
                basis.push(q);
                break;
            }
        }
    }
    Ok(&v * &u.adjoint())
}

/// Twice-iterated Gram-Schmidt of `col` against orthonormal `basis`; `None` if it collapses.
fn orthonormalize(col: &mut [Complex64], basis: &[Vec<Complex64>]) -> Option<Vec<Complex64>> {
    let before = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for _ in 0..2 {
        for q in basis {
            let proj: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
            for (c, qi) in col.iter_mut().zip(q) {
                *c -= proj * qi;
            }
        }
    }
    let norm = col.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm <= 1e-8 * before || norm == 0.0 {
        return None;
    }
    Some(col.iter().map(|c| c / norm).collect())
}

/// Frobenius norm.
pub fn frobenius_norm(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// One side of a bipartite split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    First,
    Second,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::First => Subsystem::Second,
            Subsystem::Second => Subsystem::First,
        }
    }
}

/// Reduced matrix on `keep`, tracing out the other factor of a `d1 × d2` split.
pub fn partial_trace(
    rho: &ComplexMatrix,
    (d1, d2): (usize, usize),
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    if rho.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            actual: rho.dim(),
        });
    }
    let out = match keep {
        Subsystem::First => {
            let mut m = ComplexMatrix::zeros(d1);
            for i in 0..d1 {
                for j in 0..d1 {
                    m[(i, j)] = (0..d2).map(|k| rho[(i * d2 + k, j * d2 + k)]).sum();
                }
            }
            m
        }
        Subsystem::Second => {
            let mut m = ComplexMatrix::zeros(d2);
            for k in 0..d2 {
                for l in 0..d2 {
                    m[(k, l)] = (0..d1).map(|i| rho[(i * d2 + k, i * d2 + l)]).sum();
                }
            }
            m
        }
    };
    Ok(out)
}

/// Partial transpose on subsystem 2: `(i k),(j l) ↦ (i l),(j k)`.
pub fn partial_transpose_second(rho: &ComplexMatrix, (d1, d2): (usize, usize)) -> Result<ComplexMatrix> {
    if rho.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            actual: rho.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for i in 0..d1 {
        for j in 0..d1 {
            for k in 0..d2 {
                for l in 0..d2 {
                    out[(i * d2 + k, j * d2 + l)] = rho[(i * d2 + l, j * d2 + k)];
                }
            }
        }
    }
    Ok(out)
}
