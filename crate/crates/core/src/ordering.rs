//! Parameter scans, the crossing counterexample, ordering-violation search,
//! PPT threshold and the axiom audit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{partial_transpose_second, Subsystem};
use crate::measures::{Measure, MeasureReport};
use crate::states::{
    classical_state, local_channel, min_eigenvalue, random_density, random_local_unitary, werner,
    ChannelKind, ClassicalProbs, DensityMatrix, WernerParam,
};

/// Strict-ordering margin separating genuine disagreement from numerical ties.
pub const VIOLATION_MARGIN: f64 = 1e-7;

/// Default bisection width for the second crossing point.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Iteration cap for the bisection.
pub const MAX_BISECTION_ITERS: usize = 200;

/// One grid point of a scan with all four measures.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    /// Named parameters in column order.
    pub params: Vec<(&'static str, f64)>,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c3_prime: f64,
    /// Minimum eigenvalue of the partial transpose (Werner scans only).
    pub ppt_min: Option<f64>,
}

impl ScanRow {
    fn new(params: Vec<(&'static str, f64)>, report: &MeasureReport) -> Self {
        Self {
            params,
            c1: report.c1,
            c2: report.c2,
            c3: report.c3,
            c3_prime: report.c3_prime,
            ppt_min: None,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn measure(&self, m: Measure) -> f64 {
        match m {
            Measure::C1 => self.c1,
            Measure::C2 => self.c2,
            Measure::C3 => self.c3,
            Measure::C3Prime => self.c3_prime,
        }
    }
}

/// Which diagonal probability a classical scan holds fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedProb {
    P10,
    P11,
}

impl FixedProb {
    pub fn name(self) -> &'static str {
        match self {
            FixedProb::P10 => "p10",
            FixedProb::P11 => "p11",
        }
    }
}

impl std::str::FromStr for FixedProb {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "p10" => Ok(FixedProb::P10),
            "p11" => Ok(FixedProb::P11),
            other => Err(format!("can only fix p10 or p11, got '{other}'")),
        }
    }
}

/// Triangular grid over `(p00, p01)` with one of `p10`/`p11` held at `value`
/// and the other fixed by normalization.
///
/// Both free probabilities step by `(1 - value) / grid_n`; rows are emitted
/// with `p00` outermost. The grid index `(i, j)` of each row is recoverable
/// through [`classical_grid_indices`].
pub fn scan_classical(fixed: FixedProb, value: f64, grid_n: usize) -> Result<Vec<ScanRow>> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange {
            name: "fixed probability",
            value,
            range: "[0, 1]",
        });
    }
    check_grid(grid_n)?;
    let step = (1.0 - value) / grid_n as f64;
    let mut rows = Vec::new();
    for (i, j) in classical_grid_indices(grid_n) {
        let p00 = i as f64 * step;
        let p01 = j as f64 * step;
        let rest = (grid_n - i - j) as f64 * step;
        let (p10, p11) = match fixed {
            FixedProb::P10 => (value, rest),
            FixedProb::P11 => (rest, value),
        };
        let probs = match ClassicalProbs::new(p00, p01, p10, p11) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let report = MeasureReport::compute(&classical_state(&probs)?)?;
        rows.push(ScanRow::new(
            vec![("p00", p00), ("p01", p01), ("p10", p10), ("p11", p11)],
            &report,
        ));
    }
    Ok(rows)
}

/// `(i, j)` pairs with `i + j ≤ grid_n`, in scan order.
pub fn classical_grid_indices(grid_n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=grid_n).flat_map(move |i| (0..=grid_n - i).map(move |j| (i, j)))
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < 2 {
        return Err(Error::OutOfRange {
            name: "grid_n",
            value: grid_n as f64,
            range: "[2, ∞)",
        });
    }
    Ok(())
}

/// `F = k / grid_n` for `k = 0..=grid_n`, with the PPT minimum eigenvalue.
pub fn scan_werner(grid_n: usize) -> Result<Vec<ScanRow>> {
    check_grid(grid_n)?;
    (0..=grid_n)
        .map(|k| {
            let f = k as f64 / grid_n as f64;
            let rho = werner(WernerParam::new(f)?)?;
            let mut row = ScanRow::new(vec![("F", f)], &MeasureReport::compute(&rho)?);
            row.ppt_min = Some(ppt_min_eigenvalue(&rho)?);
            Ok(row)
        })
        .collect()
}

/// Sign agreement of discrete gradients of two measures over a classical scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientAgreement {
    /// Central differences where both measures moved by more than the threshold.
    pub compared: usize,
    pub agreed: usize,
}

impl GradientAgreement {
    pub fn fraction(&self) -> f64 {
        if self.compared == 0 {
            1.0
        } else {
            self.agreed as f64 / self.compared as f64
        }
    }
}

/// Compares the sign of the central differences of `x` and `y` along both
/// grid axes at every interior point of a [`scan_classical`] grid, skipping
/// differences whose magnitude is below `threshold` for either measure.
pub fn gradient_agreement(
    rows: &[ScanRow],
    grid_n: usize,
    x: Measure,
    y: Measure,
    threshold: f64,
) -> GradientAgreement {
    let mut index = vec![vec![None; grid_n + 1]; grid_n + 1];
    for (k, (i, j)) in classical_grid_indices(grid_n).enumerate().take(rows.len()) {
        index[i][j] = Some(k);
    }
    let at = |i: usize, j: usize| index.get(i).and_then(|r| r.get(j)).copied().flatten();

    let mut out = GradientAgreement {
        compared: 0,
        agreed: 0,
    };
    for i in 1..grid_n {
        for j in 1..grid_n - i {
            let neighbours = [
                (at(i - 1, j), at(i + 1, j)),
                (at(i, j - 1), at(i, j + 1)),
            ];
            for (lo, hi) in neighbours {
                let (Some(lo), Some(hi)) = (lo, hi) else {
                    continue;
                };
                let dx = rows[hi].measure(x) - rows[lo].measure(x);
                let dy = rows[hi].measure(y) - rows[lo].measure(y);
                if dx.abs() > threshold && dy.abs() > threshold {
                    out.compared += 1;
                    if dx.signum() == dy.signum() {
                        out.agreed += 1;
                    }
                }
            }
        }
    }
    out
}

/// `C1` along the crossing family, closed form `|p00 - 1/8|`.
pub fn family_c1(p00: f64) -> f64 {
    (p00 - 0.125).abs()
}

/// `C2` along the crossing family in nats:
/// `p ln p + (½-p) ln(½-p) - (⅛+p) ln(⅛+p) - (⅞-p) ln(⅞-p) + (3 ln 3 - 4 ln 2)/8`.
pub fn family_c2(p00: f64) -> f64 {
    use crate::measures::xlnx;
    xlnx(p00) + xlnx(0.5 - p00) - xlnx(0.125 + p00) - xlnx(0.875 - p00)
        + (3.0 * 3.0_f64.ln() - 4.0 * std::f64::consts::LN_2) / 8.0
}

/// Exact value of `C2(1/4) - C2(0)` along the crossing family.
pub fn family_gap_exact() -> f64 {
    (823_543.0_f64 / 1_350_000.0).ln() / 8.0
}

/// Result of reproducing the ordering counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    /// Point in `[1/8, 1/2]` where `C1` regains its value at `p00 = 0`.
    pub a: f64,
    /// Point in `[1/8, 1/2]` where `C2` regains its value at `p00 = 0`.
    pub b: f64,
    pub p_star: f64,
    #[serde(rename = "c1_0")]
    pub c1_at_zero: f64,
    #[serde(rename = "c1_pstar")]
    pub c1_at_pstar: f64,
    #[serde(rename = "c2_0")]
    pub c2_at_zero: f64,
    #[serde(rename = "c2_pstar")]
    pub c2_at_pstar: f64,
    /// `|C1(a) - C1(0)|`.
    pub a_residual: f64,
    /// `C2(b) - C2(0)`.
    pub b_residual: f64,
    /// `C2(1/4) - C2(0)` via the spectral path.
    pub gap_quarter: f64,
    pub bisection_iters: usize,
    /// `C1(p*) > C1(0)` and `C2(p*) < C2(0)`.
    pub verdict: bool,
}

impl CounterexampleReport {
    /// Verdict plus the side conditions: `a` confirmed at `tol` and the exact gap identity within 1e-12.
    pub fn all_checks_pass(&self, tol: f64) -> bool {
        self.verdict
            && self.a_residual < tol
            && (self.gap_quarter - family_gap_exact()).abs() < 1e-12
            && self.gap_quarter < 0.0
            && self.a < self.p_star
            && self.p_star < self.b
    }
}

fn family_state(p00: f64) -> Result<DensityMatrix> {
    classical_state(&ClassicalProbs::crossing_family(p00)?)
}

/// Reproduces the crossing: `a = 1/4` from the closed form, `b` by bisection
/// of `C2(p) - C2(0)` on `[1/4, 1/2]`, and the witness `p* = (a + b) / 2`.
///
/// Bisection runs on the closed form; every reported measure value comes from
/// the spectral path on the explicit state.
pub fn counterexample_verify(tol: f64) -> Result<CounterexampleReport> {
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, 1e-6]",
        });
    }
    let eval = |p: f64| -> Result<MeasureReport> { MeasureReport::compute(&family_state(p)?) };
    let zero = eval(0.0)?;

    let a = 0.25;
    let a_residual = (eval(a)?.c1 - zero.c1).abs();

    let c2_zero = family_c2(0.0);
    let g = |p: f64| family_c2(p) - c2_zero;
    let (mut lo, mut hi) = (0.25, 0.5);
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        return Err(Error::BisectionFailure(format!(
            "no sign change on [1/4, 1/2]: g(lo) = {}, g(hi) = {}",
            g(lo),
            g(hi)
        )));
    }
    let mut iters = 0;
    while hi - lo > tol && iters < MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    let b = 0.5 * (lo + hi);
    let p_star = 0.5 * (a + b);

    let at_b = eval(b)?;
    let at_star = eval(p_star)?;
    let gap_quarter = eval(0.25)?.c2 - zero.c2;

    Ok(CounterexampleReport {
        a,
        b,
        p_star,
        c1_at_zero: zero.c1,
        c1_at_pstar: at_star.c1,
        c2_at_zero: zero.c2,
        c2_at_pstar: at_star.c2,
        a_residual,
        b_residual: at_b.c2 - zero.c2,
        gap_quarter,
        bisection_iters: iters,
        verdict: at_star.c1 > zero.c1 && at_star.c2 < zero.c2,
    })
}

/// True iff `measure` along the crossing family strictly increases (by more
/// than 1e-12 per step) over `samples` evenly spaced points of `[lo, hi]`.
pub fn monotonic_on((lo, hi): (f64, f64), measure: Measure, samples: usize) -> Result<bool> {
    if !(0.0 <= lo && lo < hi && hi <= 0.5) || samples < 2 {
        return Err(Error::OutOfRange {
            name: "interval",
            value: lo,
            range: "0 <= lo < hi <= 1/2 with samples >= 2",
        });
    }
    let step = (hi - lo) / (samples - 1) as f64;
    let mut prev = None;
    for k in 0..samples {
        let p = if k + 1 == samples { hi } else { lo + k as f64 * step };
        let v = measure.evaluate(&family_state(p)?)?;
        if let Some(prev) = prev {
            if v - prev <= 1e-12 {
                return Ok(false);
            }
        }
        prev = Some(v);
    }
    Ok(true)
}

/// A state tagged with a human-readable description.
#[derive(Debug, Clone)]
pub struct LabeledState {
    pub label: String,
    pub state: DensityMatrix,
}

impl LabeledState {
    pub fn new(label: impl Into<String>, state: DensityMatrix) -> Self {
        Self {
            label: label.into(),
            state,
        }
    }
}

/// Two states ranked in opposite strict order by two measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingViolation {
    pub state_a: String,
    pub state_b: String,
    pub measure_x: Measure,
    pub measure_y: Measure,
    /// `[x(a), x(b), y(a), y(b)]`.
    pub values: [f64; 4],
}

/// All pairs of `pool` that `x` and `y` order oppositely with margin [`VIOLATION_MARGIN`].
pub fn ordering_violations(
    pool: &[LabeledState],
    (x, y): (Measure, Measure),
) -> Result<Vec<OrderingViolation>> {
    let values: Vec<(f64, f64)> = pool
        .iter()
        .map(|s| MeasureReport::compute(&s.state).map(|r| (r.get(x), r.get(y))))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            let dx = values[i].0 - values[j].0;
            let dy = values[i].1 - values[j].1;
            let opposite = (dx > VIOLATION_MARGIN && dy < -VIOLATION_MARGIN)
                || (dx < -VIOLATION_MARGIN && dy > VIOLATION_MARGIN);
            if opposite {
                out.push(OrderingViolation {
                    state_a: pool[i].label.clone(),
                    state_b: pool[j].label.clone(),
                    measure_x: x,
                    measure_y: y,
                    values: [values[i].0, values[j].0, values[i].1, values[j].1],
                });
            }
        }
    }
    Ok(out)
}

/// `pool_size` seeded random two-qubit states plus the structured families:
/// a step-1/8 classical simplex grid, an 11-point Werner grid and 21 points
/// of the crossing family.
pub fn standard_pool(pool_size: usize, seed: u64) -> Result<Vec<LabeledState>> {
    let mut pool = Vec::new();
    for k in 0..pool_size as u64 {
        let s = seed.wrapping_add(k);
        pool.push(LabeledState::new(format!("random(seed={s})"), random_density(4, s)?));
    }
    let n = 8;
    for i in 0..=n {
        for j in 0..=n - i {
            for k in 0..=n - i - j {
                let l = n - i - j - k;
                let p = [i, j, k, l].map(|v| v as f64 / n as f64);
                let probs = ClassicalProbs::new(p[0], p[1], p[2], p[3])?;
                pool.push(LabeledState::new(
                    format!("classical({}, {}, {}, {})", p[0], p[1], p[2], p[3]),
                    classical_state(&probs)?,
                ));
            }
        }
    }
    for k in 0..=10 {
        let f = k as f64 / 10.0;
        pool.push(LabeledState::new(format!("werner({f})"), werner(WernerParam::new(f)?)?));
    }
    for k in 0..=20 {
        let p = k as f64 / 40.0;
        pool.push(LabeledState::new(format!("family(p00={p})"), family_state(p)?));
    }
    Ok(pool)
}

/// Exhaustive pairwise search over [`standard_pool`].
pub fn find_ordering_violations(
    pool_size: usize,
    seed: u64,
    measures: (Measure, Measure),
) -> Result<Vec<OrderingViolation>> {
    if pool_size < 2 {
        return Err(Error::OutOfRange {
            name: "pool_size",
            value: pool_size as f64,
            range: "[2, ∞)",
        });
    }
    ordering_violations(&standard_pool(pool_size, seed)?, measures)
}

/// Minimum eigenvalue of the partial transpose on subsystem 2.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    if !rho.is_two_qubit() {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: rho.dim(),
        });
    }
    min_eigenvalue(&partial_transpose_second(rho.matrix(), rho.dims())?)
}

/// The four correlation-measure requirements, with "zero iff product" split
/// into its two directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    SemiPositivity,
    ZeroOnProducts,
    PositiveOnCorrelated,
    LocalUnitaryInvariance,
    LocalChannelMonotonicity,
}

impl Axiom {
    pub const ALL: [Axiom; 5] = [
        Axiom::SemiPositivity,
        Axiom::ZeroOnProducts,
        Axiom::PositiveOnCorrelated,
        Axiom::LocalUnitaryInvariance,
        Axiom::LocalChannelMonotonicity,
    ];
}

/// Pass count and worst case for one (axiom, measure) pair.
///
/// `worst` is the minimum value for semi-positivity and the correlated
/// direction, the maximum value on product states, the maximum drift under
/// local unitaries, and the maximum increase under local channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub measure: Measure,
    pub trials: usize,
    pub passed: usize,
    pub worst: f64,
}

impl AxiomCheck {
    pub fn ok(&self) -> bool {
        self.trials > 0 && self.passed == self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomAudit {
    pub pool_size: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomAudit {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(AxiomCheck::ok)
    }

    pub fn check(&self, axiom: Axiom, measure: Measure) -> Option<&AxiomCheck> {
        self.checks
            .iter()
            .find(|c| c.axiom == axiom && c.measure == measure)
    }
}

/// Thresholds used by [`axiom_audit`].
pub mod axiom_tol {
    pub const NEGATIVITY: f64 = 1e-12;
    pub const PRODUCT_ZERO: f64 = 1e-9;
    pub const CORRELATED_MIN: f64 = 1e-6;
    /// `|p00 p11 - p01 p10|` above which a classical state counts as correlated.
    pub const CORRELATED_DET: f64 = 1e-3;
    pub const UNITARY_DRIFT: f64 = 1e-9;
    pub const CHANNEL_INCREASE: f64 = 1e-9;
}

struct Tally {
    trials: usize,
    passed: usize,
    worst: f64,
}

impl Tally {
    fn new(worst: f64) -> Self {
        Self {
            trials: 0,
            passed: 0,
            worst,
        }
    }

    fn record(&mut self, pass: bool, value: f64, keep_max: bool) {
        self.trials += 1;
        self.passed += pass as usize;
        self.worst = if keep_max {
            self.worst.max(value)
        } else {
            self.worst.min(value)
        };
    }
}

fn random_probs(rng: &mut ChaCha8Rng) -> Result<ClassicalProbs> {
    let w: [f64; 4] = std::array::from_fn(|_| -(1.0 - rng.random::<f64>()).ln());
    let s: f64 = w.iter().sum();
    let p00 = w[0] / s;
    let p01 = w[1] / s;
    let p10 = w[2] / s;
    ClassicalProbs::new(p00, p01, p10, 1.0 - p00 - p01 - p10)
}

/// Runs every axiom check for every measure over seeded pools of `pool_size`
/// trials each.
pub fn axiom_audit(pool_size: usize, seed: u64) -> Result<AxiomAudit> {
    use axiom_tol::*;

    if pool_size == 0 {
        return Err(Error::OutOfRange {
            name: "pool_size",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tallies: Vec<(Axiom, Measure, Tally)> = Vec::new();
    let mut tally = |axiom: Axiom, m: Measure, pass: bool, value: f64, keep_max: bool| {
        if let Some(t) = tallies.iter_mut().find(|(a, mm, _)| *a == axiom && *mm == m) {
            t.2.record(pass, value, keep_max);
        } else {
            let mut t = Tally::new(value);
            t.record(pass, value, keep_max);
            tallies.push((axiom, m, t));
        }
    };

    for _ in 0..pool_size {
        let rho = random_density(4, rng.random())?;
        let before = MeasureReport::compute(&rho)?;
        for m in Measure::ALL {
            let v = before.get(m);
            tally(Axiom::SemiPositivity, m, v >= -NEGATIVITY, v, false);
        }

        let a = random_density(2, rng.random())?;
        let b = random_density(2, rng.random())?;
        let prod = MeasureReport::compute(&DensityMatrix::product(&a, &b)?)?;
        for m in Measure::ALL {
            let v = prod.get(m);
            tally(Axiom::ZeroOnProducts, m, v.abs() < PRODUCT_ZERO, v, true);
        }

        let probs = loop {
            let p = random_probs(&mut rng)?;
            if (p.p00 * p.p11 - p.p01 * p.p10).abs() > CORRELATED_DET {
                break p;
            }
        };
        let corr = MeasureReport::compute(&classical_state(&probs)?)?;
        for m in Measure::ALL {
            let v = corr.get(m);
            tally(Axiom::PositiveOnCorrelated, m, v > CORRELATED_MIN, v, false);
        }

        let (u, v) = random_local_unitary(rng.random());
        let rotated = MeasureReport::compute(&rho.apply_local_unitary(&u, &v)?)?;
        for m in Measure::ALL {
            let drift = (rotated.get(m) - before.get(m)).abs();
            tally(Axiom::LocalUnitaryInvariance, m, drift < UNITARY_DRIFT, drift, true);
        }

        let kind = if rng.random::<bool>() {
            ChannelKind::Depolarizing
        } else {
            ChannelKind::Dephasing
        };
        let side = if rng.random::<bool>() {
            Subsystem::First
        } else {
            Subsystem::Second
        };
        let strength = rng.random::<f64>();
        let after = MeasureReport::compute(&local_channel(&rho, kind, strength, side)?)?;
        for m in Measure::ALL {
            let increase = after.get(m) - before.get(m);
            tally(
                Axiom::LocalChannelMonotonicity,
                m,
                increase < CHANNEL_INCREASE,
                increase,
                true,
            );
        }
    }

    let checks = tallies
        .into_iter()
        .map(|(axiom, measure, t)| AxiomCheck {
            axiom,
            measure,
            trials: t.trials,
            passed: t.passed,
            worst: t.worst,
        })
        .collect();
    Ok(AxiomAudit {
        pool_size,
        seed,
        checks,
    })
}
