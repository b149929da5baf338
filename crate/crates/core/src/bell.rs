//! Two-station coincidence experiments and CHSH evaluation.
//!
//! Every model answers with a pair of ±1 outcomes for a setting pair
//! `(i, j)`. The CHSH value uses the fixed convention
//! `S = E(1,1) + E(1,2) + E(2,1) − E(2,2)`; verdicts compare `|S|`.

use std::f64::consts::SQRT_2;

use rand::RngCore;

use crate::bipartite::{joint_measurement, BipartiteSpace, JointMeasurement};
use crate::error::{Error, Result};
use crate::hilbert::{spectral_decomposition, tensor_op, Operator, StateVector};
use crate::measurement::{sample, Pvm};
use crate::streams;

pub const CHSH_CONVENTION: &str = "S = E(1,1) + E(1,2) + E(2,1) - E(2,2)";
pub const CLASSICAL_BOUND: f64 = 2.0;
pub const TSIRELSON_BOUND: f64 = 2.0 * SQRT_2;
pub const ALGEBRAIC_BOUND: f64 = 4.0;

/// Tolerance on `|λ| = 1` for ±1-valued observables.
const SPECTRUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn of(x: f64) -> Sign {
        if x >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn index(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// Joint distribution over `{+1, −1}²`, indexed `[a][b]` with `+` first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutcomeTable {
    pub probs: [[f64; 2]; 2],
}

impl OutcomeTable {
    pub fn new(pp: f64, pm: f64, mp: f64, mm: f64) -> Self {
        Self {
            probs: [[pp, pm], [mp, mm]],
        }
    }

    /// Point mass on `(a, b)`.
    pub fn certain(a: Sign, b: Sign) -> Self {
        let mut probs = [[0.0; 2]; 2];
        probs[a.index()][b.index()] = 1.0;
        Self { probs }
    }

    pub fn p(&self, a: Sign, b: Sign) -> f64 {
        self.probs[a.index()][b.index()]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }

    pub fn is_distribution(&self, tol: f64) -> bool {
        self.probs.iter().flatten().all(|&p| p >= -tol) && (self.total() - 1.0).abs() <= tol
    }

    /// `E = Σ a·b·p(a, b)`.
    pub fn correlation(&self) -> f64 {
        self.probs[0][0] - self.probs[0][1] - self.probs[1][0] + self.probs[1][1]
    }

    /// `p_A(+1)`.
    pub fn marginal_a_plus(&self) -> f64 {
        self.probs[0][0] + self.probs[0][1]
    }

    /// `p_B(+1)`.
    pub fn marginal_b_plus(&self) -> f64 {
        self.probs[0][0] + self.probs[1][0]
    }
}

/// An abstract two-station experiment.
pub trait CoincidenceModel {
    fn name(&self) -> String;
    fn settings_a(&self) -> Vec<String>;
    fn settings_b(&self) -> Vec<String>;
    /// One coincidence run at setting pair `(i, j)`.
    fn sample(&self, i: usize, j: usize, rng: &mut dyn RngCore) -> Result<(Sign, Sign)>;
    /// Exact joint distribution, when the model has one in closed form.
    fn exact_distribution(&self, i: usize, j: usize) -> Option<OutcomeTable>;
}

pub(crate) fn check_setting(i: usize, j: usize, na: usize, nb: usize) -> Result<()> {
    if i >= na || j >= nb {
        return Err(Error::SettingOutOfRange { i, j });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellStats {
    pub trials: u64,
    /// Fraction of runs with `a = +1`.
    pub freq_a_plus: f64,
    /// Fraction of runs with `b = +1`.
    pub freq_b_plus: f64,
    /// `sqrt((1 − E²)/n)`.
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChshReport {
    pub model: String,
    pub settings_a: Vec<String>,
    pub settings_b: Vec<String>,
    /// `E(i, j)`, zero-based.
    pub correlations: [[f64; 2]; 2],
    pub s: f64,
    pub convention: &'static str,
    pub classical_bound: f64,
    pub tsirelson_bound: f64,
    pub algebraic_bound: f64,
    /// Present for sampled reports.
    pub cells: Option<[[CellStats; 2]; 2]>,
}

impl ChshReport {
    fn new(model: &dyn CoincidenceModel, correlations: [[f64; 2]; 2], cells: Option<[[CellStats; 2]; 2]>) -> Self {
        Self {
            model: model.name(),
            settings_a: model.settings_a(),
            settings_b: model.settings_b(),
            s: chsh_combination(&correlations),
            correlations,
            convention: CHSH_CONVENTION,
            classical_bound: CLASSICAL_BOUND,
            tsirelson_bound: TSIRELSON_BOUND,
            algebraic_bound: ALGEBRAIC_BOUND,
            cells,
        }
    }

    pub fn abs_s(&self) -> f64 {
        self.s.abs()
    }

    pub fn exceeds_classical(&self) -> bool {
        self.abs_s() > CLASSICAL_BOUND + 1e-9
    }

    pub fn exceeds_tsirelson(&self) -> bool {
        self.abs_s() > TSIRELSON_BOUND + 1e-9
    }

    /// Standard error of `S` from the per-cell errors, when sampled.
    pub fn s_stderr(&self) -> Option<f64> {
        self.cells.map(|c| {
            c.iter()
                .flatten()
                .map(|cell| cell.stderr * cell.stderr)
                .sum::<f64>()
                .sqrt()
        })
    }

    /// One-line bound comparison.
    pub fn bound_summary(&self) -> String {
        let verdict = if self.exceeds_tsirelson() {
            "exceeds classical 2 and Tsirelson 2.828"
        } else if self.exceeds_classical() {
            "exceeds classical 2, within Tsirelson 2.828"
        } else {
            "within classical 2"
        };
        format!("|S| = {:.6}: {verdict}", self.abs_s())
    }
}

pub fn chsh_combination(e: &[[f64; 2]; 2]) -> f64 {
    e[0][0] + e[0][1] + e[1][0] - e[1][1]
}

fn check_two_settings(model: &dyn CoincidenceModel) -> Result<()> {
    let (a, b) = (model.settings_a().len(), model.settings_b().len());
    if a != 2 || b != 2 {
        return Err(Error::SettingCount { a, b });
    }
    Ok(())
}

/// CHSH value from the model's exact distributions.
pub fn chsh_exact(model: &dyn CoincidenceModel) -> Result<ChshReport> {
    check_two_settings(model)?;
    let mut e = [[0.0; 2]; 2];
    for (i, row) in e.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let table = model
                .exact_distribution(i, j)
                .ok_or(Error::MissingDistribution { i, j })?;
            *cell = table.correlation();
        }
    }
    Ok(ChshReport::new(model, e, None))
}

/// CHSH value estimated from `n` runs per cell. Cell `(i, j)` draws from
/// its own stream of `seed`, so results do not depend on evaluation order.
pub fn chsh_sampled(model: &dyn CoincidenceModel, n: u64, seed: u64) -> Result<ChshReport> {
    check_two_settings(model)?;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one run per cell".into()));
    }
    let mut e = [[0.0; 2]; 2];
    let blank = CellStats {
        trials: 0,
        freq_a_plus: 0.0,
        freq_b_plus: 0.0,
        stderr: 0.0,
    };
    let mut cells = [[blank; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut rng = streams::cell_stream(seed, i, j, 2);
            let (mut sum, mut a_plus, mut b_plus) = (0.0, 0u64, 0u64);
            for _ in 0..n {
                let (a, b) = model.sample(i, j, &mut rng)?;
                sum += a.value() * b.value();
                a_plus += (a == Sign::Plus) as u64;
                b_plus += (b == Sign::Plus) as u64;
            }
            let mean = sum / n as f64;
            e[i][j] = mean;
            cells[i][j] = CellStats {
                trials: n,
                freq_a_plus: a_plus as f64 / n as f64,
                freq_b_plus: b_plus as f64 / n as f64,
                stderr: ((1.0 - mean * mean).max(0.0) / n as f64).sqrt(),
            };
        }
    }
    Ok(ChshReport::new(model, e, Some(cells)))
}

/// Largest change of one side's exact marginal when only the other side's
/// setting changes. Zero for a non-signaling model.
pub fn no_signaling_defect(model: &dyn CoincidenceModel) -> Result<f64> {
    let (na, nb) = (model.settings_a().len(), model.settings_b().len());
    let mut tables = vec![vec![OutcomeTable::new(0.0, 0.0, 0.0, 0.0); nb]; na];
    for (i, row) in tables.iter_mut().enumerate() {
        for (j, t) in row.iter_mut().enumerate() {
            *t = model
                .exact_distribution(i, j)
                .ok_or(Error::MissingDistribution { i, j })?;
        }
    }
    let mut worst: f64 = 0.0;
    for row in &tables {
        for t in row {
            worst = worst.max((t.marginal_a_plus() - row[0].marginal_a_plus()).abs());
        }
    }
    for j in 0..nb {
        for row in &tables {
            worst = worst.max((row[j].marginal_b_plus() - tables[0][j].marginal_b_plus()).abs());
        }
    }
    Ok(worst)
}

/// Largest sampled marginal change across the other side's settings, in
/// units of its binomial standard error. Below 4 for a non-signaling model
/// in all but rare seeds.
pub fn sampled_signaling_score(report: &ChshReport) -> Option<f64> {
    let cells = report.cells?;
    let z = |p: f64, q: f64, n: u64, m: u64| {
        let pooled = (p * n as f64 + q * m as f64) / (n + m) as f64;
        let se = (pooled * (1.0 - pooled) * (1.0 / n as f64 + 1.0 / m as f64)).sqrt();
        if se == 0.0 {
            if (p - q).abs() == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (p - q).abs() / se
        }
    };
    let mut worst: f64 = 0.0;
    for [c0, c1] in cells {
        worst = worst.max(z(c0.freq_a_plus, c1.freq_a_plus, c0.trials, c1.trials));
    }
    for (c0, c1) in cells[0].iter().zip(&cells[1]) {
        worst = worst.max(z(c0.freq_b_plus, c1.freq_b_plus, c0.trials, c1.trials));
    }
    Some(worst)
}

/// `⟨ψ| A ⊗ B |ψ⟩` for ±1-valued hermitian `A`, `B`.
pub fn expectation(psi: &StateVector, a: &Operator, b: &Operator) -> Result<f64> {
    for op in [a, b] {
        for l in spectral_decomposition(op)?.eigenvalues() {
            if (l.abs() - 1.0).abs() > SPECTRUM_TOL {
                return Err(Error::BadSpectrum { eigenvalue: l });
            }
        }
    }
    let ab = tensor_op(a, b);
    Ok(psi.inner(&ab.apply(psi)?)?.re)
}

/// `cos θ σ_z + sin θ σ_x`.
pub fn spin_observable(theta: f64) -> Operator {
    &Operator::pauli_z().scale_real(theta.cos()) + &Operator::pauli_x().scale_real(theta.sin())
}

/// Spin measurement along `theta` with outcomes ordered `+1`, `−1`.
pub fn spin_pvm(theta: f64) -> Result<Pvm> {
    let p_plus = (&Operator::identity(2) + &spin_observable(theta)).scale_real(0.5);
    Pvm::binary(&p_plus.symmetrized())
}

/// Two qubits measured along analyzer angles.
#[derive(Clone, Debug)]
pub struct QuantumCoincidenceModel {
    name: String,
    psi: StateVector,
    angles_a: Vec<f64>,
    angles_b: Vec<f64>,
    joints: Vec<Vec<JointMeasurement>>,
}

impl QuantumCoincidenceModel {
    pub fn psi(&self) -> &StateVector {
        &self.psi
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

pub fn quantum_coincidence_model(
    psi: &StateVector,
    angles_a: &[f64],
    angles_b: &[f64],
) -> Result<QuantumCoincidenceModel> {
    let space = BipartiteSpace::qubits();
    if psi.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: psi.dim(),
        });
    }
    let joints = angles_a
        .iter()
        .map(|&ta| {
            angles_b
                .iter()
                .map(|&tb| joint_measurement(&spin_pvm(ta)?, &spin_pvm(tb)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantumCoincidenceModel {
        name: "quantum".into(),
        psi: psi.normalize()?,
        angles_a: angles_a.to_vec(),
        angles_b: angles_b.to_vec(),
        joints,
    })
}

fn angle_label(theta: f64) -> String {
    format!("theta={theta:.6}")
}

impl CoincidenceModel for QuantumCoincidenceModel {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn settings_a(&self) -> Vec<String> {
        self.angles_a.iter().map(|&t| angle_label(t)).collect()
    }

    fn settings_b(&self) -> Vec<String> {
        self.angles_b.iter().map(|&t| angle_label(t)).collect()
    }

    fn sample(&self, i: usize, j: usize, rng: &mut dyn RngCore) -> Result<(Sign, Sign)> {
        check_setting(i, j, self.angles_a.len(), self.angles_b.len())?;
        let (outcome, _) = sample(self.joints[i][j].as_pvm(), &self.psi, rng)?;
        // couple values are a·b; the label says which side is which
        let (a, b) = match outcome.label.as_str() {
            "(+,+)" => (Sign::Plus, Sign::Plus),
            "(+,-)" => (Sign::Plus, Sign::Minus),
            "(-,+)" => (Sign::Minus, Sign::Plus),
            _ => (Sign::Minus, Sign::Minus),
        };
        Ok((a, b))
    }

    fn exact_distribution(&self, i: usize, j: usize) -> Option<OutcomeTable> {
        let joint = self.joints.get(i)?.get(j)?;
        let t = joint.probability_table(&self.psi).ok()?;
        Some(OutcomeTable {
            probs: [[t[0][0], t[0][1]], [t[1][0], t[1][1]]],
        })
    }
}

/// Analyzer angles maximizing `|S|` for the singlet under
/// [`CHSH_CONVENTION`]: `A ∈ {0, π/2}`, `B ∈ {π/4, −π/4}`.
pub fn optimal_singlet_angles() -> ([f64; 2], [f64; 2]) {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    ([0.0, FRAC_PI_2], [FRAC_PI_4, -FRAC_PI_4])
}

/// A finite local hidden-variable model: weights over hidden states and a
/// deterministic ±1 response per setting and hidden state.
#[derive(Clone, Debug)]
pub struct HiddenVariableModel {
    pub name: String,
    pub weights: Vec<f64>,
    /// `response_a[i][λ]`
    pub response_a: Vec<Vec<Sign>>,
    pub response_b: Vec<Vec<Sign>>,
    pub labels_a: Vec<String>,
    pub labels_b: Vec<String>,
}

impl HiddenVariableModel {
    pub fn new(weights: Vec<f64>, response_a: Vec<Vec<Sign>>, response_b: Vec<Vec<Sign>>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("hidden-variable weights must be a distribution".into()));
        }
        for r in response_a.iter().chain(&response_b) {
            if r.len() != weights.len() {
                return Err(Error::DimensionMismatch {
                    expected: weights.len(),
                    found: r.len(),
                });
            }
        }
        Ok(Self {
            name: "hidden-variable".into(),
            labels_a: (0..response_a.len()).map(|i| format!("a{i}")).collect(),
            labels_b: (0..response_b.len()).map(|j| format!("b{j}")).collect(),
            weights,
            response_a,
            response_b,
        })
    }

    /// `E(i, j)` for every setting pair, by enumerating the hidden states.
    pub fn correlation_matrix(&self) -> Vec<Vec<f64>> {
        self.response_a
            .iter()
            .map(|ra| {
                self.response_b
                    .iter()
                    .map(|rb| {
                        self.weights
                            .iter()
                            .zip(ra.iter().zip(rb))
                            .map(|(w, (a, b))| w * a.value() * b.value())
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }
}

impl CoincidenceModel for HiddenVariableModel {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn settings_a(&self) -> Vec<String> {
        self.labels_a.clone()
    }

    fn settings_b(&self) -> Vec<String> {
        self.labels_b.clone()
    }

    fn sample(&self, i: usize, j: usize, rng: &mut dyn RngCore) -> Result<(Sign, Sign)> {
        check_setting(i, j, self.response_a.len(), self.response_b.len())?;
        let l = crate::measurement::sample_index(&self.weights, rng);
        Ok((self.response_a[i][l], self.response_b[j][l]))
    }

    fn exact_distribution(&self, i: usize, j: usize) -> Option<OutcomeTable> {
        let (ra, rb) = (self.response_a.get(i)?, self.response_b.get(j)?);
        let mut probs = [[0.0; 2]; 2];
        for (w, (a, b)) in self.weights.iter().zip(ra.iter().zip(rb)) {
            probs[a.index()][b.index()] += w;
        }
        Some(OutcomeTable { probs })
    }
}

/// Largest `|S|` over all choices of two settings per side from a
/// correlation matrix `E[i][j]`, with the maximizing `(i1, i2, j1, j2)`.
pub fn max_chsh_over_grid(e: &[Vec<f64>]) -> (f64, [usize; 4]) {
    let mut best = (f64::NEG_INFINITY, [0; 4]);
    let na = e.len();
    let nb = e.first().map_or(0, |r| r.len());
    for i1 in 0..na {
        for i2 in 0..na {
            for j1 in 0..nb {
                for j2 in 0..nb {
                    let s = (e[i1][j1] + e[i1][j2] + e[i2][j1] - e[i2][j2]).abs();
                    if s > best.0 {
                        best = (s, [i1, i2, j1, j2]);
                    }
                }
            }
        }
    }
    best
}
