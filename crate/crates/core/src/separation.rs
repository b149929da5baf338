//! Separate measurements and the superposition witness against them.
//!
//! Two measurements `M_A`, `M_B` are separate when they can be run together
//! as one measurement `M_AB` whose outcomes are all couples `(x, y)` of
//! individually possible outcomes. Given commuting spectral projectors
//! `P_A = P_A^I` and `P_B = P_B^J`, a state
//!
//! ```text
//! ψ = (φ + χ)/√2,   φ ∈ P_A(𝕀 − P_B)H,   χ ∈ (𝕀 − P_A)P_B H
//! ```
//!
//! makes outcomes in `I`, `E − I`, `J` and `F − J` all possible while the
//! couples in `I × J` and `(E − I) × (F − J)` have probability zero, so the
//! joint measurement cannot have every couple possible.

use rand::RngCore;

use crate::bipartite::JointMeasurement;
use crate::error::{Error, Result};
use crate::hilbert::{commutator_norm, Operator, StateVector, C64, PROJECTOR_TOL};
use crate::measurement::{Pvm, POSSIBILITY_TOL};

/// Required bound on every witness residual.
pub const WITNESS_TOL: f64 = 1e-10;
/// Overlap defect above which cloning of a pair is obstructed.
pub const CLONING_TOL: f64 = 1e-10;

/// Norm of a projection of a standard Gaussian below which the draw is
/// rejected and repeated.
const MIN_PROJECTED_NORM: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct AertsWitness {
    /// Outcome labels behind `P_A`, when built from a joint measurement.
    pub subset_a: Option<Vec<String>>,
    pub subset_b: Option<Vec<String>>,
    pub phi: StateVector,
    pub chi: StateVector,
    pub psi: StateVector,
    pub residuals: WitnessResiduals,
}

/// Norms that vanish for a valid witness.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessResiduals {
    /// `‖P_A(𝕀−P_B)φ − φ‖`
    pub phi_membership: f64,
    /// `‖(𝕀−P_A)P_B χ − χ‖`
    pub chi_membership: f64,
    /// `|⟨φ|χ⟩|`
    pub orthogonality: f64,
    /// `|‖ψ‖ − 1|`
    pub normalization: f64,
    /// `‖P_A ψ − φ/√2‖`, `‖(𝕀−P_A)ψ − χ/√2‖`, `‖P_B ψ − χ/√2‖`,
    /// `‖(𝕀−P_B)ψ − φ/√2‖`
    pub marginals: [f64; 4],
    /// `‖P_A(𝕀−P_B)ψ − φ/√2‖`, `‖(𝕀−P_A)P_B ψ − χ/√2‖`
    pub possible_couples: [f64; 2],
    /// `‖P_A P_B ψ‖`, `‖(𝕀−P_A)(𝕀−P_B)ψ‖`
    pub impossible_couples: [f64; 2],
}

impl WitnessResiduals {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("phi_membership", self.phi_membership),
            ("chi_membership", self.chi_membership),
            ("orthogonality", self.orthogonality),
            ("normalization", self.normalization),
            ("marginal_a_in", self.marginals[0]),
            ("marginal_a_out", self.marginals[1]),
            ("marginal_b_in", self.marginals[2]),
            ("marginal_b_out", self.marginals[3]),
            ("couple_in_out", self.possible_couples[0]),
            ("couple_out_in", self.possible_couples[1]),
            ("couple_in_in", self.impossible_couples[0]),
            ("couple_out_out", self.impossible_couples[1]),
        ]
    }

    pub fn max(&self) -> f64 {
        self.entries().into_iter().map(|(_, r)| r).fold(0.0, f64::max)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

fn check_pair(p_a: &Operator, p_b: &Operator) -> Result<()> {
    if p_a.dim() != p_b.dim() {
        return Err(Error::DimensionMismatch {
            expected: p_a.dim(),
            found: p_b.dim(),
        });
    }
    p_a.check_projector()?;
    p_b.check_projector()?;
    let norm = commutator_norm(p_a, p_b)?;
    if norm > PROJECTOR_TOL {
        return Err(Error::NonCommuting { norm });
    }
    Ok(())
}

/// Build `ψ = (φ + χ)/√2` for a commuting projector pair. `φ` and `χ` are
/// Haar-random unit vectors of their subspaces, phase-fixed so their first
/// largest amplitude is real positive.
pub fn construct_witness(p_a: &Operator, p_b: &Operator, rng: &mut dyn RngCore) -> Result<AertsWitness> {
    check_pair(p_a, p_b)?;
    let phi_space = (p_a * &p_b.complement()).symmetrized();
    let chi_space = (&p_a.complement() * p_b).symmetrized();
    if phi_space.projector_rank() == 0 {
        return Err(Error::EmptySubspace { which: "P_A(1-P_B)H" });
    }
    if chi_space.projector_rank() == 0 {
        return Err(Error::EmptySubspace { which: "(1-P_A)P_B H" });
    }
    let phi = random_unit_in(&phi_space, rng)?;
    let chi = random_unit_in(&chi_space, rng)?;
    let psi = (&phi + &chi).scale(C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let mut w = AertsWitness {
        subset_a: None,
        subset_b: None,
        phi,
        chi,
        psi,
        residuals: WitnessResiduals {
            phi_membership: 0.0,
            chi_membership: 0.0,
            orthogonality: 0.0,
            normalization: 0.0,
            marginals: [0.0; 4],
            possible_couples: [0.0; 2],
            impossible_couples: [0.0; 2],
        },
    };
    w.residuals = verify_witness(&w, p_a, p_b)?;
    Ok(w)
}

/// Witness for `P_A^I`, `P_B^J` taken from a joint measurement.
pub fn witness_for_subsets<S: AsRef<str>, T: AsRef<str>>(
    joint: &JointMeasurement,
    subset_a: &[S],
    subset_b: &[T],
    rng: &mut dyn RngCore,
) -> Result<AertsWitness> {
    let p_a = joint.coarse_a(subset_a)?;
    let p_b = joint.coarse_b(subset_b)?;
    let mut w = construct_witness(&p_a, &p_b, rng)?;
    w.subset_a = Some(subset_a.iter().map(|s| s.as_ref().to_string()).collect());
    w.subset_b = Some(subset_b.iter().map(|s| s.as_ref().to_string()).collect());
    Ok(w)
}

fn random_unit_in(projector: &Operator, rng: &mut dyn RngCore) -> Result<StateVector> {
    loop {
        let g = StateVector::random(projector.dim(), rng)?;
        let v = projector.apply(&g)?;
        if v.norm() > MIN_PROJECTED_NORM {
            return Ok(v.normalize()?.with_canonical_phase());
        }
    }
}

/// Recompute every residual of `w` against `p_a`, `p_b`.
pub fn verify_witness(w: &AertsWitness, p_a: &Operator, p_b: &Operator) -> Result<WitnessResiduals> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let half_phi = w.phi.scale(C64::new(r, 0.0));
    let half_chi = w.chi.scale(C64::new(r, 0.0));
    let not_a = p_a.complement();
    let not_b = p_b.complement();
    let psi = &w.psi;

    let dist = |op: &Operator, v: &StateVector, target: &StateVector| -> Result<f64> {
        op.apply(v)?.distance(target)
    };
    let a_not_b = p_a * &not_b;
    let not_a_b = &not_a * p_b;

    Ok(WitnessResiduals {
        phi_membership: dist(&a_not_b, &w.phi, &w.phi)?,
        chi_membership: dist(&not_a_b, &w.chi, &w.chi)?,
        orthogonality: w.phi.inner(&w.chi)?.norm(),
        normalization: (psi.norm() - 1.0).abs(),
        marginals: [
            dist(p_a, psi, &half_phi)?,
            dist(&not_a, psi, &half_chi)?,
            dist(p_b, psi, &half_chi)?,
            dist(&not_b, psi, &half_phi)?,
        ],
        possible_couples: [dist(&a_not_b, psi, &half_phi)?, dist(&not_a_b, psi, &half_chi)?],
        impossible_couples: [
            (p_a * p_b).apply(psi)?.norm(),
            (&not_a * &not_b).apply(psi)?.norm(),
        ],
    })
}

/// Two-outcome joint measurement `{P_A, 𝕀−P_A} × {P_B, 𝕀−P_B}`, outcomes
/// labelled `+` (in the subset) and `-` (outside it).
pub fn binary_joint(p_a: &Operator, p_b: &Operator) -> Result<JointMeasurement> {
    JointMeasurement::from_commuting(Pvm::binary(p_a)?, Pvm::binary(p_b)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationVerdict {
    pub separate: bool,
    pub outcomes_a: Vec<String>,
    pub outcomes_b: Vec<String>,
    pub possible_a: Vec<String>,
    pub possible_b: Vec<String>,
    /// Couples of marginally possible outcomes with joint probability ≤ tol.
    pub missing_couples: Vec<(String, String)>,
    /// `p(x, y)` indexed `[x][y]` in outcome order.
    pub probabilities: Vec<Vec<f64>>,
    pub tol: f64,
}

/// Check whether every couple of marginally possible outcomes is jointly
/// possible in state `psi`.
pub fn separation_verdict(joint: &JointMeasurement, psi: &StateVector, tol: f64) -> Result<SeparationVerdict> {
    let possible_a = joint.side_a().possible_indices(psi, tol)?;
    let possible_b = joint.side_b().possible_indices(psi, tol)?;
    let probabilities = joint.probability_table(psi)?;
    let outcomes_a = joint.outcomes_a();
    let outcomes_b = joint.outcomes_b();
    let mut missing = Vec::new();
    for &i in &possible_a {
        for &j in &possible_b {
            if probabilities[i][j] <= tol {
                missing.push((outcomes_a[i].clone(), outcomes_b[j].clone()));
            }
        }
    }
    Ok(SeparationVerdict {
        separate: missing.is_empty(),
        possible_a: possible_a.iter().map(|&i| outcomes_a[i].clone()).collect(),
        possible_b: possible_b.iter().map(|&j| outcomes_b[j].clone()).collect(),
        missing_couples: missing,
        probabilities,
        outcomes_a,
        outcomes_b,
        tol,
    })
}

pub fn default_verdict(joint: &JointMeasurement, psi: &StateVector) -> Result<SeparationVerdict> {
    separation_verdict(joint, psi, POSSIBILITY_TOL)
}

/// Overlap certificate for a pair of states. A unitary `U` with
/// `U(ψ⊗s) = ψ⊗ψ` and `U(φ⊗s) = φ⊗φ` preserves inner products, forcing
/// `⟨ψ|φ⟩ = ⟨ψ|φ⟩²`, hence `c ∈ {0, 1}` for `c = |⟨ψ|φ⟩|`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoCloningCertificate {
    pub overlap: f64,
    pub defect: f64,
    pub cloning_obstructed: bool,
}

pub fn no_cloning_witness(psi: &StateVector, phi: &StateVector) -> Result<NoCloningCertificate> {
    let overlap = psi.inner(phi)?.norm();
    let defect = (overlap - overlap * overlap).abs();
    Ok(NoCloningCertificate {
        overlap,
        defect,
        cloning_obstructed: defect > CLONING_TOL,
    })
}

/// A commuting projector pair `U diag(a) U†`, `U diag(b) U†` on `C^dim`
/// with both witness subspaces nonzero. Needs `dim ≥ 2`.
pub fn random_commuting_pair(dim: usize, rng: &mut dyn RngCore) -> Result<(Operator, Operator)> {
    use rand::Rng;
    if dim < 2 {
        return Err(Error::InvalidArgument("commuting pair needs dim >= 2".into()));
    }
    let u = Operator::random_unitary(dim, rng)?;
    // slot 0 is in P_A only, slot 1 in P_B only; the rest are random
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    a[0] = 1.0;
    b[1] = 1.0;
    for k in 2..dim {
        a[k] = if rng.random::<bool>() { 1.0 } else { 0.0 };
        b[k] = if rng.random::<bool>() { 1.0 } else { 0.0 };
    }
    let p_a = Operator::diagonal(&a)?.conjugate_by(&u)?.symmetrized();
    let p_b = Operator::diagonal(&b)?.conjugate_by(&u)?.symmetrized();
    Ok((p_a, p_b))
}
