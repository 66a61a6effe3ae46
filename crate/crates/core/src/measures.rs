//! Correlation measures comparing a state with the product of its marginals.
//!
//! | measure    | definition                          |
//! |------------|-------------------------------------|
//! | `C1`       | trace distance `½ Tr|ρ - ρ₁⊗ρ₂|`    |
//! | `C2`       | relative entropy `S(ρ ‖ ρ₁⊗ρ₂)`     |
//! | `C3`       | angle `arccos F(ρ, ρ₁⊗ρ₂)`          |
//! | `C3Prime`  | `1 - F²(ρ, ρ₁⊗ρ₂)`                  |
//!
//! All logarithms are natural. Eigenvalues below [`ZERO_EIGENVALUE`] are
//! treated as exact zeros so that `0 · ln 0 = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eig_hermitian, frobenius_norm, kron, polar_unitary, trace_norm, ComplexMatrix, Subsystem,
};
use crate::states::{marginal_product, pauli, Axis, ClassicalProbs, DensityMatrix, WernerParam};

/// Eigenvalue magnitude below which entropy terms and support checks see a zero.
pub const ZERO_EIGENVALUE: f64 = 1e-12;

fn check_same_dims(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(())
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if !rho.is_two_qubit() {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    Ok(())
}

/// `x ln x` with the `0 ln 0 = 0` convention.
#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `½ Tr|σ - τ|`.
pub fn trace_distance(sigma: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    check_same_dims(sigma, tau)?;
    Ok(0.5 * trace_norm(&(sigma.matrix() - tau.matrix()))?)
}

/// `Tr σ (ln σ - ln τ)`, or `+∞` when `supp σ ⊄ supp τ`.
pub fn rel_entropy(sigma: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    check_same_dims(sigma, tau)?;
    let s = eig_hermitian(sigma.matrix())?;
    let t = eig_hermitian(tau.matrix())?;

    let neg_entropy: f64 = s
        .eigenvalues
        .iter()
        .filter(|&&l| l > ZERO_EIGENVALUE)
        .map(|&l| l * l.ln())
        .sum();

    // Tr σ ln τ evaluated in τ's eigenbasis.
    let weights = t.diagonal_of(sigma.matrix());
    let mut cross = 0.0;
    for (&mu, &w) in t.eigenvalues.iter().zip(&weights) {
        if mu < ZERO_EIGENVALUE {
            if w > ZERO_EIGENVALUE {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * mu.ln();
    }
    Ok(neg_entropy - cross)
}

/// Uhlmann fidelity `Tr √(√σ τ √σ)`, clamped into `[0, 1]`.
pub fn fidelity(sigma: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    check_same_dims(sigma, tau)?;
    let sqrt_sigma = eig_hermitian(sigma.matrix())?.compose(|l| l.max(0.0).sqrt());
    let inner = (&(&sqrt_sigma * tau.matrix()) * &sqrt_sigma).hermitian_part();
    let f: f64 = eig_hermitian(&inner)?
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Angle distance `arccos F(σ, τ)`, evaluated as `2 asin(d_B / 2)` with the
/// Bures distance `d_B = min_W ‖√σ - √τ W‖₂`.
///
/// The two forms agree exactly; this one keeps full absolute precision as
/// the angle goes to zero, where `arccos` of a fidelity rounded near 1 would
/// only resolve angles down to about 1e-8.
pub fn angle_distance(sigma: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    check_same_dims(sigma, tau)?;
    let root = |m: &DensityMatrix| -> Result<ComplexMatrix> {
        Ok(eig_hermitian(m.matrix())?.compose(|l| l.max(0.0).sqrt()))
    };
    let (a, b) = (root(sigma)?, root(tau)?);
    let w = polar_unitary(&(&a * &b))?;
    let bures = frobenius_norm(&(&a - &(&b * &w)));
    Ok(2.0 * (0.5 * bures).min(1.0).asin())
}

/// `Tr(ρ A)` for Hermitian `A` (real part).
fn expectation(rho: &ComplexMatrix, a: &ComplexMatrix) -> f64 {
    let n = rho.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (rho[(i, j)] * a[(j, i)]).re;
        }
    }
    acc
}

/// Connected correlator `Tr(ρ σᵢ⊗σⱼ) - Tr(ρ₁σᵢ) Tr(ρ₂σⱼ)`.
pub fn corr_fn(rho: &DensityMatrix, i: Axis, j: Axis) -> Result<f64> {
    check_two_qubit(rho)?;
    let (si, sj) = (pauli(i), pauli(j));
    let joint = expectation(rho.matrix(), &kron(&si, &sj));
    let a = expectation(&rho.reduced(Subsystem::First), &si);
    let b = expectation(&rho.reduced(Subsystem::Second), &sj);
    Ok(joint - a * b)
}

/// All nine Pauli correlators, indexed `[i][j]` over `x, y, z`.
pub fn corr_matrix(rho: &DensityMatrix) -> Result<[[f64; 3]; 3]> {
    let mut out = [[0.0; 3]; 3];
    for (r, &i) in Axis::PAULI.iter().enumerate() {
        for (c, &j) in Axis::PAULI.iter().enumerate() {
            out[r][c] = corr_fn(rho, i, j)?;
        }
    }
    Ok(out)
}

pub fn c1(rho: &DensityMatrix) -> Result<f64> {
    trace_distance(rho, &marginal_product(rho)?)
}

/// Mutual information in nats. Always finite since `supp ρ ⊆ supp ρ₁⊗ρ₂`.
pub fn c2(rho: &DensityMatrix) -> Result<f64> {
    rel_entropy(rho, &marginal_product(rho)?)
}

pub fn c3(rho: &DensityMatrix) -> Result<f64> {
    angle_distance(rho, &marginal_product(rho)?)
}

pub fn c3_prime(rho: &DensityMatrix) -> Result<f64> {
    let f = fidelity(rho, &marginal_product(rho)?)?;
    Ok(1.0 - f * f)
}

/// `2 |p00 p11 - p01 p10|`.
pub fn c1_classical(p: &ClassicalProbs) -> Result<f64> {
    p.validate()?;
    Ok(2.0 * (p.p00 * p.p11 - p.p01 * p.p10).abs())
}

/// Classical mutual information `H(A) + H(B) - H(AB)` of the diagonal state, in nats.
pub fn c2_classical(p: &ClassicalProbs) -> Result<f64> {
    p.validate()?;
    let [a0, a1] = p.marginal_first();
    let [b0, b1] = p.marginal_second();
    Ok(-xlnx(a0) - xlnx(a1) - xlnx(b0) - xlnx(b1)
        + xlnx(p.p00)
        + xlnx(p.p01)
        + xlnx(p.p10)
        + xlnx(p.p11))
}

/// `|F - 1/4|`.
pub fn c1_werner(w: WernerParam) -> f64 {
    (w.value() - 0.25).abs()
}

/// `ln(4/3) + F ln 3 + F ln F + (1-F) ln(1-F)`.
pub fn c2_werner(w: WernerParam) -> f64 {
    let f = w.value();
    (4.0_f64 / 3.0).ln() + f * 3.0_f64.ln() + xlnx(f) + xlnx(1.0 - f)
}

/// Identifier for one of the four measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    C1,
    C2,
    C3,
    C3Prime,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::C1, Measure::C2, Measure::C3, Measure::C3Prime];

    pub fn evaluate(self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            Measure::C1 => c1(rho),
            Measure::C2 => c2(rho),
            Measure::C3 => c3(rho),
            Measure::C3Prime => c3_prime(rho),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Measure::C1 => "c1",
            Measure::C2 => "c2",
            Measure::C3 => "c3",
            Measure::C3Prime => "c3_prime",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "c1" | "ci" => Ok(Measure::C1),
            "c2" | "cii" => Ok(Measure::C2),
            "c3" | "ciii" => Ok(Measure::C3),
            "c3_prime" | "c3p" | "c3'" => Ok(Measure::C3Prime),
            other => Err(format!("unknown measure '{other}'")),
        }
    }
}

/// All four measures plus the Pauli correlators of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c3_prime: f64,
    /// `corr_fns[i][j]` over axes `x, y, z`; zero for non-two-qubit states.
    pub corr_fns: [[f64; 3]; 3],
}

impl MeasureReport {
    /// Evaluates every measure sharing one marginal product.
    pub fn compute(rho: &DensityMatrix) -> Result<Self> {
        let prod = marginal_product(rho)?;
        let f = fidelity(rho, &prod)?;
        let corr_fns = if rho.is_two_qubit() {
            corr_matrix(rho)?
        } else {
            [[0.0; 3]; 3]
        };
        Ok(Self {
            c1: trace_distance(rho, &prod)?,
            c2: rel_entropy(rho, &prod)?,
            c3: angle_distance(rho, &prod)?,
            c3_prime: 1.0 - f * f,
            corr_fns,
        })
    }

    pub fn get(&self, m: Measure) -> f64 {
        match m {
            Measure::C1 => self.c1,
            Measure::C2 => self.c2,
            Measure::C3 => self.c3,
            Measure::C3Prime => self.c3_prime,
        }
    }
}

/// Pinsker-type sandwich `2 C1² ≤ C2 ≤ 2 C1 ln d + 1/e`, with the Fannes-type
/// tightening `C2 ≤ 2 C1 ln d - 2 C1 ln(2 C1)` when `2 C1 ≤ 1/e`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub c1: f64,
    pub c2: f64,
    pub lower: f64,
    pub upper_loose: f64,
    pub upper_tight: Option<f64>,
    pub d: usize,
}

impl BoundsReport {
    pub fn from_values(c1: f64, c2: f64, d: usize) -> Self {
        let t = 2.0 * c1;
        let ln_d = (d as f64).ln();
        let upper_tight = (t <= std::f64::consts::E.recip()).then(|| t * ln_d - xlnx(t));
        Self {
            c1,
            c2,
            lower: 2.0 * c1 * c1,
            upper_loose: t * ln_d + std::f64::consts::E.recip(),
            upper_tight,
            d,
        }
    }

    /// Smallest of the (signed) gaps `c2 - lower`, `upper_loose - c2`, `upper_tight - c2`.
    pub fn worst_slack(&self) -> f64 {
        let mut s = (self.c2 - self.lower).min(self.upper_loose - self.c2);
        if let Some(t) = self.upper_tight {
            s = s.min(t - self.c2);
        }
        s
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.worst_slack() >= -slack
    }
}

pub fn bounds_check(rho: &DensityMatrix) -> Result<BoundsReport> {
    Ok(BoundsReport::from_values(c1(rho)?, c2(rho)?, rho.dim()))
}

/// Max entry of `(ρ - ρ₁⊗ρ₂) - ¼ Σᵢⱼ C_F(σᵢ, σⱼ) σᵢ⊗σⱼ`.
pub fn pauli_residual(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let diff = rho.matrix() - marginal_product(rho)?.matrix();
    let mut recon = ComplexMatrix::zeros(4);
    for &i in &Axis::PAULI {
        for &j in &Axis::PAULI {
            let cf = corr_fn(rho, i, j)?;
            recon = &recon + &kron(&pauli(i), &pauli(j)).scale(0.25 * cf);
        }
    }
    Ok(diff.max_abs_diff(&recon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{classical_state, random_density, werner};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_3, FRAC_PI_4, LN_2};

    fn dm(diag: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_diag(diag), (diag.len(), 1)).unwrap()
    }

    fn classical(p: [f64; 4]) -> DensityMatrix {
        classical_state(&ClassicalProbs::new(p[0], p[1], p[2], p[3]).unwrap()).unwrap()
    }

    fn wern(f: f64) -> DensityMatrix {
        werner(WernerParam::new(f).unwrap()).unwrap()
    }

    const FAMILY_AT_ZERO: [f64; 4] = [0.0, 0.5, 0.125, 0.375];

    #[test]
    fn trace_distance_examples() {
        let r = random_density(4, 3).unwrap();
        assert_abs_diff_eq!(trace_distance(&r, &r).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            trace_distance(&dm(&[1.0, 0.0]), &dm(&[0.0, 1.0])).unwrap(),
            1.0
        );
        let rho = classical(FAMILY_AT_ZERO);
        let prod = marginal_product(&rho).unwrap();
        assert_abs_diff_eq!(trace_distance(&rho, &prod).unwrap(), 0.125, epsilon = 1e-15);
        // Tr|ρ - ρ̃| = 2 C1
        assert_abs_diff_eq!(
            trace_norm(&(rho.matrix() - prod.matrix())).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert!(trace_distance(&r, &dm(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn rel_entropy_examples() {
        let r = random_density(4, 4).unwrap();
        assert_abs_diff_eq!(rel_entropy(&r, &r).unwrap(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            rel_entropy(&dm(&[1.0, 0.0]), &dm(&[0.5, 0.5])).unwrap(),
            LN_2,
            epsilon = 1e-15
        );
        assert_eq!(
            rel_entropy(&dm(&[1.0, 0.0]), &dm(&[0.0, 1.0])).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn fidelity_examples() {
        let r = random_density(4, 5).unwrap();
        assert_abs_diff_eq!(fidelity(&r, &r).unwrap(), 1.0, epsilon = 1e-12);

        let p = [0.1, 0.2, 0.3, 0.4];
        let q = [0.4, 0.3, 0.2, 0.1];
        let bhatt: f64 = p.iter().zip(q).map(|(a, b): (&f64, f64)| (a * b).sqrt()).sum();
        assert_abs_diff_eq!(fidelity(&dm(&p), &dm(&q)).unwrap(), bhatt, epsilon = 1e-14);

        let s = wern(1.0);
        let prod = marginal_product(&s).unwrap();
        assert_abs_diff_eq!(fidelity(&s, &prod).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn corr_fn_examples() {
        let a = random_density(2, 1).unwrap();
        let b = random_density(2, 2).unwrap();
        let ab = DensityMatrix::product(&a, &b).unwrap();
        for &i in &Axis::PAULI {
            for &j in &Axis::PAULI {
                assert_abs_diff_eq!(corr_fn(&ab, i, j).unwrap(), 0.0, epsilon = 1e-14);
            }
        }
        // p00 - p01 - p10 + p11 with zero first-marginal polarization
        assert_abs_diff_eq!(
            corr_fn(&classical(FAMILY_AT_ZERO), Axis::Z, Axis::Z).unwrap(),
            -0.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(corr_fn(&wern(1.0), Axis::Z, Axis::Z).unwrap(), -1.0, epsilon = 1e-14);
        assert!(corr_fn(&dm(&[0.5, 0.5]), Axis::Z, Axis::Z).is_err());
    }

    #[test]
    fn measures_on_crossing_family_states() {
        let rho = classical(FAMILY_AT_ZERO);
        assert_abs_diff_eq!(c1(&rho).unwrap(), 0.125, epsilon = 1e-15);
        // natural-log mutual information of (0, 1/2, 1/8, 3/8)
        let expected = 2.0 * LN_2 + (3.0 * 3.0_f64.ln() - 7.0 * 7.0_f64.ln()) / 8.0;
        assert_abs_diff_eq!(c2(&rho).unwrap(), expected, epsilon = 1e-14);

        let s = wern(1.0);
        assert_abs_diff_eq!(c1(&s).unwrap(), 0.75, epsilon = 1e-14);
        assert_abs_diff_eq!(c2(&s).unwrap(), 4.0_f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(c3(&s).unwrap(), FRAC_PI_3, epsilon = 1e-10);
        assert_abs_diff_eq!(c3_prime(&s).unwrap(), 0.75, epsilon = 1e-12);

        let perfect = classical([0.5, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(c1(&perfect).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(fidelity(&perfect, &marginal_product(&perfect).unwrap()).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_abs_diff_eq!(c3(&perfect).unwrap(), FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn measures_vanish_on_products() {
        let a = random_density(2, 21).unwrap();
        let b = random_density(2, 22).unwrap();
        let ab = DensityMatrix::product(&a, &b).unwrap();
        let r = MeasureReport::compute(&ab).unwrap();
        assert!(r.c1 < 1e-9 && r.c2 < 1e-9 && r.c3 < 1e-9 && r.c3_prime < 1e-9, "{r:?}");
    }

    #[test]
    fn angle_matches_arccos_fidelity() {
        for seed in 0..50 {
            let r = random_density(4, seed).unwrap();
            let prod = marginal_product(&r).unwrap();
            let f = fidelity(&r, &prod).unwrap();
            let angle = angle_distance(&r, &prod).unwrap();
            assert_abs_diff_eq!(angle, f.acos(), epsilon = 1e-7);
            assert_abs_diff_eq!(angle.cos(), f, epsilon = 1e-12);
        }
        let s = wern(1.0);
        assert_abs_diff_eq!(
            angle_distance(&s, &marginal_product(&s).unwrap()).unwrap(),
            FRAC_PI_3,
            epsilon = 1e-12
        );
    }

    #[test]
    fn closed_forms() {
        let u = ClassicalProbs::new(0.25, 0.25, 0.25, 0.25).unwrap();
        assert_eq!(c1_classical(&u).unwrap(), 0.0);
        assert_abs_diff_eq!(c2_classical(&u).unwrap(), 0.0, epsilon = 1e-15);

        let p = ClassicalProbs::new(0.5, 0.0, 0.125, 0.375).unwrap();
        assert_eq!(c1_classical(&p).unwrap(), 0.375);
        let expected = 2.0 * LN_2 - 5.0 * 5.0_f64.ln() / 8.0;
        assert_abs_diff_eq!(c2_classical(&p).unwrap(), expected, epsilon = 1e-15);

        let q = WernerParam::new(0.25).unwrap();
        assert_eq!(c1_werner(q), 0.0);
        assert_abs_diff_eq!(c2_werner(q), 0.0, epsilon = 1e-15);
        let one = WernerParam::new(1.0).unwrap();
        assert_eq!(c1_werner(one), 0.75);
        assert_abs_diff_eq!(c2_werner(one), 4.0_f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn bounds_examples() {
        let rho = classical(FAMILY_AT_ZERO);
        let b = bounds_check(&rho).unwrap();
        assert_eq!(b.d, 4);
        assert_abs_diff_eq!(b.lower, 2.0 / 64.0, epsilon = 1e-15);
        // 2C1 = 1/4 ≤ 1/e: tight bound = ¼ ln 4 - ¼ ln ¼ = ln 2
        assert_abs_diff_eq!(b.upper_tight.unwrap(), LN_2, epsilon = 1e-14);
        assert!(b.holds(1e-9));

        let s = bounds_check(&wern(1.0)).unwrap();
        assert!(s.upper_tight.is_none());
        assert!(s.holds(1e-9));
    }

    #[test]
    fn pauli_residual_examples() {
        for seed in 0..10 {
            assert!(pauli_residual(&random_density(4, seed).unwrap()).unwrap() < 1e-10);
        }
        let rho = classical([0.1, 0.2, 0.3, 0.4]);
        let cm = corr_matrix(&rho).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                if (r, c) != (2, 2) {
                    assert!(cm[r][c].abs() < 1e-12);
                }
            }
        }
        assert!(pauli_residual(&rho).unwrap() < 1e-12);

        // Werner: C_F(i,i) = -(4F-1)/3, off-diagonals zero
        let f = 0.7;
        let cm = corr_matrix(&wern(f)).unwrap();
        for (i, row) in cm.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let expected = if i == j { -(4.0 * f - 1.0) / 3.0 } else { 0.0 };
                assert_abs_diff_eq!(v, expected, epsilon = 1e-12);
            }
        }
        assert!(pauli_residual(&wern(f)).unwrap() < 1e-12);
    }

    #[test]
    fn measure_names_parse() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("c4".parse::<Measure>().is_err());
    }
}
