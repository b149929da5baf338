//! Projection-valued measures and the Born rule.

use std::fmt;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::hilbert::{spectral_decomposition, Operator, StateVector, PROJECTOR_TOL};

/// Probability above which an outcome counts as possible.
pub const POSSIBILITY_TOL: f64 = 1e-10;
/// Smallest Born probability for which collapse is defined.
pub const COLLAPSE_TOL: f64 = 1e-12;

/// An outcome label with an optional numerical value.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub value: Option<f64>,
}

impl Outcome {
    pub fn new(label: impl Into<String>, value: Option<f64>) -> Self {
        Self {
            label: label.into(),
            value,
        }
    }

    /// Label derived from a real value: `+1`, `-1`, `0` for integers,
    /// six decimals otherwise.
    pub fn from_value(value: f64) -> Self {
        let rounded = value.round();
        let label = if (value - rounded).abs() <= 1e-9 {
            if rounded == 0.0 {
                "0".to_string()
            } else {
                format!("{:+}", rounded as i64)
            }
        } else {
            format!("{value:+.6}")
        };
        Self::new(label, Some(value))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Ordered list of distinct outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeSet {
    outcomes: Vec<Outcome>,
}

impl OutcomeSet {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidPvm("empty outcome set".into()));
        }
        for (k, o) in outcomes.iter().enumerate() {
            if outcomes[..k].iter().any(|p| p.label == o.label) {
                return Err(Error::InvalidPvm(format!("duplicate outcome `{}`", o.label)));
            }
        }
        Ok(Self { outcomes })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Outcome> {
        self.outcomes.iter()
    }

    pub fn get(&self, k: usize) -> &Outcome {
        &self.outcomes[k]
    }

    pub fn labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|o| o.label.clone()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o.label == label)
            .ok_or_else(|| Error::UnknownOutcome(label.to_string()))
    }
}

/// A projection-valued measure: one projector per outcome, mutually
/// orthogonal and summing to the identity.
#[derive(Clone, Debug)]
pub struct Pvm {
    outcomes: OutcomeSet,
    projectors: Vec<Operator>,
}

impl Pvm {
    pub fn new(outcomes: OutcomeSet, projectors: Vec<Operator>) -> Result<Self> {
        if outcomes.len() != projectors.len() {
            return Err(Error::InvalidPvm(format!(
                "{} outcomes but {} projectors",
                outcomes.len(),
                projectors.len()
            )));
        }
        let dim = projectors[0].dim();
        for p in &projectors {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            p.check_projector()?;
        }
        for (i, p) in projectors.iter().enumerate() {
            for q in &projectors[i + 1..] {
                let overlap = (p * q).max_abs();
                if overlap > PROJECTOR_TOL {
                    return Err(Error::InvalidPvm(format!(
                        "projectors not orthogonal (max |P_i P_j| = {overlap:e})"
                    )));
                }
            }
        }
        let total = projectors
            .iter()
            .fold(Operator::zeros(dim), |acc, p| &acc + p);
        let defect = total.max_abs_diff(&Operator::identity(dim))?;
        if defect > PROJECTOR_TOL {
            return Err(Error::InvalidPvm(format!(
                "projectors do not sum to identity (max defect {defect:e})"
            )));
        }
        Ok(Self {
            outcomes,
            projectors,
        })
    }

    /// Spectral PVM of a hermitian operator; outcomes carry the eigenvalues
    /// in increasing order.
    pub fn from_operator(op: &Operator) -> Result<Self> {
        let sd = spectral_decomposition(op)?;
        let outcomes = OutcomeSet::new(
            sd.eigenvalues()
                .into_iter()
                .map(Outcome::from_value)
                .collect(),
        )?;
        Self::new(outcomes, sd.projectors().cloned().collect())
    }

    /// Measurement in the computational basis, outcomes `0..dim`.
    pub fn computational(dim: usize) -> Result<Self> {
        let outcomes = OutcomeSet::new(
            (0..dim)
                .map(|k| Outcome::new(k.to_string(), Some(k as f64)))
                .collect(),
        )?;
        let projectors = (0..dim)
            .map(|k| StateVector::basis(dim, k).map(|v| Operator::outer(&v)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(outcomes, projectors)
    }

    /// Two-outcome measurement `{P, 𝕀 − P}` labelled `+` (value +1) and
    /// `-` (value −1).
    pub fn binary(p: &Operator) -> Result<Self> {
        let outcomes = OutcomeSet::new(vec![
            Outcome::new("+", Some(1.0)),
            Outcome::new("-", Some(-1.0)),
        ])?;
        Self::new(outcomes, vec![p.clone(), p.complement()])
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn projectors(&self) -> &[Operator] {
        &self.projectors
    }

    pub fn projector(&self, label: &str) -> Result<&Operator> {
        Ok(&self.projectors[self.outcomes.index_of(label)?])
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    /// Born probabilities for every outcome, in outcome order.
    pub fn probabilities(&self, psi: &StateVector) -> Result<Vec<f64>> {
        self.projectors
            .iter()
            .map(|p| Ok(p.apply(psi)?.norm_squared()))
            .collect()
    }

    /// Indices of outcomes with probability above `tol`.
    pub(crate) fn possible_indices(&self, psi: &StateVector, tol: f64) -> Result<Vec<usize>> {
        let probs = self.probabilities(psi)?;
        let mut possible: Vec<usize> = (0..probs.len()).filter(|&k| probs[k] > tol).collect();
        if possible.is_empty() {
            // only reachable with tol near 1; keep the most likely outcome
            let best = (0..probs.len())
                .max_by(|&a, &b| probs[a].total_cmp(&probs[b]))
                .expect("nonempty");
            possible.push(best);
        }
        Ok(possible)
    }

    /// Σ_x x·p(x) over outcomes carrying values.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let probs = self.probabilities(psi)?;
        Ok(self
            .outcomes
            .iter()
            .zip(probs)
            .map(|(o, p)| o.value.unwrap_or(0.0) * p)
            .sum())
    }
}

/// PVM with `outcomes` nonempty spectral subspaces in a Haar-random basis of
/// `C^dim`. Outcomes are labelled `o0, o1, …` with values `0, 1, …`.
pub fn random_pvm(dim: usize, outcomes: usize, rng: &mut dyn RngCore) -> Result<Pvm> {
    if outcomes == 0 || outcomes > dim {
        return Err(Error::InvalidArgument(format!(
            "cannot split dimension {dim} into {outcomes} nonempty outcomes"
        )));
    }
    let u = Operator::random_unitary(dim, rng)?;
    // one basis vector per outcome, the rest assigned at random
    let mut owner: Vec<usize> = (0..dim)
        .map(|k| if k < outcomes { k } else { rng.random_range(0..outcomes) })
        .collect();
    for k in (1..dim).rev() {
        owner.swap(k, rng.random_range(0..=k));
    }
    let projectors = (0..outcomes)
        .map(|x| {
            let diag: Vec<f64> = owner.iter().map(|&o| if o == x { 1.0 } else { 0.0 }).collect();
            Ok(Operator::diagonal(&diag)?.conjugate_by(&u)?.symmetrized())
        })
        .collect::<Result<Vec<_>>>()?;
    let labels = OutcomeSet::new(
        (0..outcomes)
            .map(|x| Outcome::new(format!("o{x}"), Some(x as f64)))
            .collect(),
    )?;
    Pvm::new(labels, projectors)
}

/// `P^I = Σ_{x∈I} P_x`.
pub fn coarse_projector<S: AsRef<str>>(m: &Pvm, subset: &[S]) -> Result<Operator> {
    let mut seen = Vec::with_capacity(subset.len());
    let mut acc = Operator::zeros(m.dim());
    for label in subset {
        let k = m.outcomes.index_of(label.as_ref())?;
        if !seen.contains(&k) {
            seen.push(k);
            acc = &acc + &m.projectors[k];
        }
    }
    Ok(acc)
}

/// `E − I` as labels, preserving outcome order.
pub fn complement_subset<S: AsRef<str>>(m: &Pvm, subset: &[S]) -> Result<Vec<String>> {
    for label in subset {
        m.outcomes.index_of(label.as_ref())?;
    }
    Ok(m
        .outcomes
        .iter()
        .filter(|o| !subset.iter().any(|s| s.as_ref() == o.label))
        .map(|o| o.label.clone())
        .collect())
}

/// `‖P_x ψ‖²`.
pub fn born_probability(m: &Pvm, psi: &StateVector, outcome: &str) -> Result<f64> {
    let p = m.projector(outcome)?;
    Ok(p.apply(psi)?.norm_squared())
}

/// Outcomes with Born probability above `tol`. Never empty.
pub fn possible_outcomes(m: &Pvm, psi: &StateVector, tol: f64) -> Result<Vec<String>> {
    Ok(m
        .possible_indices(psi, tol)?
        .into_iter()
        .map(|k| m.outcomes.get(k).label.clone())
        .collect())
}

/// Lüders rule: `P_x ψ / ‖P_x ψ‖`.
pub fn collapse(m: &Pvm, psi: &StateVector, outcome: &str) -> Result<StateVector> {
    let projected = m.projector(outcome)?.apply(psi)?;
    let probability = projected.norm_squared();
    if probability <= COLLAPSE_TOL {
        return Err(Error::ImpossibleOutcome {
            outcome: outcome.to_string(),
            probability,
        });
    }
    projected.normalize()
}

/// Draw an outcome with Born probabilities and return it with the collapsed
/// state.
pub fn sample(m: &Pvm, psi: &StateVector, rng: &mut dyn RngCore) -> Result<(Outcome, StateVector)> {
    let probs = m.probabilities(psi)?;
    let k = sample_index(&probs, rng);
    let outcome = m.outcomes.get(k).clone();
    let post = collapse(m, psi, &outcome.label)?;
    Ok((outcome, post))
}

/// Inverse-CDF draw from a (nearly) normalized weight vector. Rounding past
/// the end falls back to the last index with positive weight.
pub fn sample_index(probs: &[f64], rng: &mut dyn RngCore) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (k, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc && p > 0.0 {
            return k;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}
