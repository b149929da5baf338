//! Bipartite structure: embedded observables, joint measurements whose
//! outcomes are couples `(x, y)`, and Schmidt analysis.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hilbert::{commutator_norm, tensor_op, tensor_vec, Operator, StateVector, C64, PROJECTOR_TOL};
use crate::measurement::{coarse_projector, Outcome, OutcomeSet, Pvm};

/// Singular values below this count as zero in Schmidt analysis.
pub const SCHMIDT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BipartiteSpace {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl BipartiteSpace {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn qubits() -> Self {
        Self { dim_a: 2, dim_b: 2 }
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }
}

/// `{P_x ⊗ 𝕀_B}`.
pub fn embed_left(m: &Pvm, space: BipartiteSpace) -> Result<Pvm> {
    check(space.dim_a, m.dim())?;
    let id = Operator::identity(space.dim_b);
    Pvm::new(
        m.outcomes().clone(),
        m.projectors().iter().map(|p| tensor_op(p, &id)).collect(),
    )
}

/// `{𝕀_A ⊗ P_y}`.
pub fn embed_right(m: &Pvm, space: BipartiteSpace) -> Result<Pvm> {
    check(space.dim_b, m.dim())?;
    let id = Operator::identity(space.dim_a);
    Pvm::new(
        m.outcomes().clone(),
        m.projectors().iter().map(|p| tensor_op(&id, p)).collect(),
    )
}

/// A measurement whose outcomes are all couples `(x, y) ∈ E × F`, with
/// couple projectors `P_x P_y` built from two commuting PVMs on one space.
///
/// The tensor form comes from [`joint_measurement`]; any commuting pair of
/// PVMs on the same space is accepted by [`JointMeasurement::from_commuting`].
#[derive(Clone, Debug)]
pub struct JointMeasurement {
    space: Option<BipartiteSpace>,
    side_a: Pvm,
    side_b: Pvm,
    couples: Pvm,
}

impl JointMeasurement {
    pub fn from_commuting(side_a: Pvm, side_b: Pvm) -> Result<Self> {
        Self::build(None, side_a, side_b)
    }

    fn build(space: Option<BipartiteSpace>, side_a: Pvm, side_b: Pvm) -> Result<Self> {
        check(side_a.dim(), side_b.dim())?;
        let mut worst: f64 = 0.0;
        for p in side_a.projectors() {
            for q in side_b.projectors() {
                worst = worst.max(commutator_norm(p, q)?);
            }
        }
        if worst > PROJECTOR_TOL {
            return Err(Error::NonCommuting { norm: worst });
        }
        let mut labels = Vec::with_capacity(side_a.len() * side_b.len());
        let mut projectors = Vec::with_capacity(labels.capacity());
        for (x, p) in side_a.outcomes().iter().zip(side_a.projectors()) {
            for (y, q) in side_b.outcomes().iter().zip(side_b.projectors()) {
                let value = match (x.value, y.value) {
                    (Some(a), Some(b)) => Some(a * b),
                    _ => None,
                };
                labels.push(Outcome::new(couple_label(&x.label, &y.label), value));
                projectors.push((p * q).symmetrized());
            }
        }
        let couples = Pvm::new(OutcomeSet::new(labels)?, projectors)?;
        Ok(Self {
            space,
            side_a,
            side_b,
            couples,
        })
    }

    pub fn space(&self) -> Option<BipartiteSpace> {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.couples.dim()
    }

    /// Measurement `A` acting on the whole space.
    pub fn side_a(&self) -> &Pvm {
        &self.side_a
    }

    /// Measurement `B` acting on the whole space.
    pub fn side_b(&self) -> &Pvm {
        &self.side_b
    }

    /// The joint measurement as a PVM over couples, row-major in `(x, y)`.
    pub fn as_pvm(&self) -> &Pvm {
        &self.couples
    }

    pub fn outcomes_a(&self) -> Vec<String> {
        self.side_a.outcomes().labels()
    }

    pub fn outcomes_b(&self) -> Vec<String> {
        self.side_b.outcomes().labels()
    }

    pub fn couple_projector(&self, x: &str, y: &str) -> Result<&Operator> {
        let i = self.side_a.outcomes().index_of(x)?;
        let j = self.side_b.outcomes().index_of(y)?;
        Ok(&self.couples.projectors()[i * self.side_b.len() + j])
    }

    /// `P^{I×J} = Σ_{x∈I, y∈J} P_{(x,y)}`.
    pub fn coarse<S: AsRef<str>, T: AsRef<str>>(&self, subset_a: &[S], subset_b: &[T]) -> Result<Operator> {
        let mut labels = Vec::new();
        for x in subset_a {
            self.side_a.outcomes().index_of(x.as_ref())?;
            for y in subset_b {
                self.side_b.outcomes().index_of(y.as_ref())?;
                labels.push(couple_label(x.as_ref(), y.as_ref()));
            }
        }
        coarse_projector(&self.couples, &labels)
    }

    /// `P_A^I` on the whole space.
    pub fn coarse_a<S: AsRef<str>>(&self, subset: &[S]) -> Result<Operator> {
        coarse_projector(&self.side_a, subset)
    }

    /// `P_B^J` on the whole space.
    pub fn coarse_b<S: AsRef<str>>(&self, subset: &[S]) -> Result<Operator> {
        coarse_projector(&self.side_b, subset)
    }

    /// `p(x, y)` as a table indexed `[x][y]` in outcome order.
    pub fn probability_table(&self, psi: &StateVector) -> Result<Vec<Vec<f64>>> {
        let flat = self.couples.probabilities(psi)?;
        Ok(flat.chunks(self.side_b.len()).map(|r| r.to_vec()).collect())
    }
}

/// Tensor-form joint measurement of `mA` on `H_A` and `mB` on `H_B`.
pub fn joint_measurement(m_a: &Pvm, m_b: &Pvm) -> Result<JointMeasurement> {
    let space = BipartiteSpace::new(m_a.dim(), m_b.dim())?;
    JointMeasurement::build(Some(space), embed_left(m_a, space)?, embed_right(m_b, space)?)
}

pub fn couple_label(x: &str, y: &str) -> String {
    format!("({x},{y})")
}

#[derive(Clone, Debug)]
pub struct SchmidtTerm {
    pub coefficient: f64,
    pub left: StateVector,
    pub right: StateVector,
}

/// Schmidt decomposition `ψ = Σ_k c_k a_k ⊗ b_k`, coefficients descending,
/// only terms with `c_k > SCHMIDT_TOL` kept.
pub fn schmidt(psi: &StateVector, space: BipartiteSpace) -> Result<Vec<SchmidtTerm>> {
    check(space.dim(), psi.dim())?;
    let amps = psi.amplitudes();
    let m = DMatrix::<C64>::from_fn(space.dim_a, space.dim_b, |i, j| amps[i * space.dim_b + j]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    order
        .into_iter()
        .filter(|&k| svd.singular_values[k] > SCHMIDT_TOL)
        .map(|k| {
            // M = U Σ V†, so ψ_ij = Σ_k σ_k U_ik (V†)_kj
            let left = StateVector::from_amplitudes(u.column(k).iter().copied().collect())?;
            let right = StateVector::from_amplitudes(v_t.row(k).iter().copied().collect())?;
            Ok(SchmidtTerm {
                coefficient: svd.singular_values[k],
                left,
                right,
            })
        })
        .collect()
}

pub fn schmidt_rank(psi: &StateVector, space: BipartiteSpace) -> Result<usize> {
    Ok(schmidt(psi, space)?.len())
}

pub fn is_product(psi: &StateVector, space: BipartiteSpace) -> Result<bool> {
    Ok(schmidt_rank(psi, space)? == 1)
}

/// `(|01⟩ − |10⟩)/√2`.
pub fn singlet() -> StateVector {
    StateVector::from_real(&[0.0, 1.0, -1.0, 0.0]).expect("nonzero")
}

/// `(|01⟩ + |10⟩)/√2`.
pub fn psi_plus() -> StateVector {
    StateVector::from_real(&[0.0, 1.0, 1.0, 0.0]).expect("nonzero")
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> StateVector {
    StateVector::from_real(&[1.0, 0.0, 0.0, 1.0]).expect("nonzero")
}

pub fn product_state(a: &StateVector, b: &StateVector) -> StateVector {
    tensor_vec(a, b)
}

fn check(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{commutator_norm, tensor_vec};
    use crate::measurement::born_probability;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn z() -> Pvm {
        Pvm::from_operator(&Operator::pauli_z()).unwrap()
    }

    #[test]
    fn embedded_projectors() {
        let s = BipartiteSpace::qubits();
        let left = embed_left(&z(), s).unwrap();
        let right = embed_right(&z(), s).unwrap();
        let d = |e: &[f64]| Operator::diagonal(e).unwrap();
        assert!(left.projector("+1").unwrap().max_abs_diff(&d(&[1.0, 1.0, 0.0, 0.0])).unwrap() < 1e-12);
        assert!(right.projector("+1").unwrap().max_abs_diff(&d(&[1.0, 0.0, 1.0, 0.0])).unwrap() < 1e-12);
        let x = Pvm::from_operator(&Operator::pauli_x()).unwrap();
        let right_x = embed_right(&x, s).unwrap();
        for p in left.projectors() {
            for q in right_x.projectors() {
                assert!(commutator_norm(p, q).unwrap() <= 1e-12);
            }
        }
        assert!(matches!(
            embed_left(&Pvm::computational(3).unwrap(), s),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sigma_z_joint_measurement() {
        let j = joint_measurement(&z(), &z()).unwrap();
        assert_eq!(j.as_pvm().len(), 4);
        for p in j.as_pvm().projectors() {
            assert_eq!(p.projector_rank(), 1);
            assert!(p.hermiticity_defect() == 0.0);
        }
        let q = j.coarse(&["+1"], &["-1"]).unwrap();
        assert!(q.max_abs_diff(&Operator::diagonal(&[0.0, 1.0, 0.0, 0.0]).unwrap()).unwrap() < 1e-12);
        assert_eq!(j.as_pvm().outcomes().labels()[0], "(-1,-1)");
    }

    #[test]
    fn non_commuting_sides_are_rejected() {
        let z = z();
        let x = Pvm::from_operator(&Operator::pauli_x()).unwrap();
        assert!(matches!(
            JointMeasurement::from_commuting(z, x),
            Err(Error::NonCommuting { .. })
        ));
    }

    #[test]
    fn schmidt_of_product_state() {
        let psi = tensor_vec(&StateVector::basis(2, 0).unwrap(), &StateVector::basis(2, 1).unwrap());
        let terms = schmidt(&psi, BipartiteSpace::qubits()).unwrap();
        assert_eq!(terms.len(), 1);
        assert!((terms[0].coefficient - 1.0).abs() < 1e-12);
        assert!(is_product(&psi, BipartiteSpace::qubits()).unwrap());
    }

    #[test]
    fn schmidt_of_bell_states() {
        // the coefficient matrices [[0,1],[±1,0]] have singular values 1, 1
        // times the 1/√2 prefactor
        for psi in [psi_plus(), singlet()] {
            let terms = schmidt(&psi, BipartiteSpace::qubits()).unwrap();
            assert_eq!(terms.len(), 2);
            for t in &terms {
                assert!((t.coefficient - FRAC_1_SQRT_2).abs() < 1e-12);
            }
            let rebuilt = terms.iter().fold(StateVector::zeros(4).unwrap(), |acc, t| {
                &acc + &tensor_vec(&t.left, &t.right).scale(C64::new(t.coefficient, 0.0))
            });
            assert!(rebuilt.distance(&psi).unwrap() < 1e-9);
        }
    }

    #[test]
    fn marginals_of_joint_table() {
        let j = joint_measurement(&z(), &Pvm::from_operator(&Operator::pauli_x()).unwrap()).unwrap();
        let psi = singlet();
        let table = j.probability_table(&psi).unwrap();
        for (i, x) in j.outcomes_a().iter().enumerate() {
            let marginal: f64 = table[i].iter().sum();
            let direct = born_probability(j.side_a(), &psi, x).unwrap();
            assert!((marginal - direct).abs() < 1e-10);
        }
    }
}
