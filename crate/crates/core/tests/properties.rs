//! Invariants checked over seeded random instances.

use proptest::prelude::*;
use rand::{Rng, RngCore};
use sepq_core::bell::{
    chsh_exact, chsh_sampled, no_signaling_defect, quantum_coincidence_model, CoincidenceModel,
    HiddenVariableModel, Sign, TSIRELSON_BOUND,
};
use sepq_core::bipartite::{embed_left, embed_right, joint_measurement, schmidt, BipartiteSpace};
use sepq_core::hilbert::{
    c, commutator_norm, spectral_decomposition, tensor_op, tensor_vec, Operator, StateVector, C64,
};
use sepq_core::measurement::{born_probability, coarse_projector, random_pvm, Pvm};
use sepq_core::separation::{
    binary_joint, construct_witness, random_commuting_pair, separation_verdict, WITNESS_TOL,
};
use sepq_core::streams;

fn random_hermitian(dim: usize, rng: &mut dyn RngCore) -> Operator {
    let g: Vec<Vec<C64>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0))
                .collect()
        })
        .collect();
    let rows: Vec<Vec<C64>> = (0..dim)
        .map(|i| (0..dim).map(|j| (g[i][j] + g[j][i].conj()) * 0.5).collect())
        .collect();
    Operator::from_rows(&rows).unwrap()
}

fn random_subset(labels: &[String], rng: &mut dyn RngCore) -> Vec<String> {
    labels.iter().filter(|_| rng.random::<bool>()).cloned().collect()
}

/// Nonempty proper subset.
fn random_proper_subset(labels: &[String], rng: &mut dyn RngCore) -> Vec<String> {
    loop {
        let s = random_subset(labels, rng);
        if !s.is_empty() && s.len() < labels.len() {
            return s;
        }
    }
}

fn check_spectral(op: &Operator) {
    let sd = spectral_decomposition(op).unwrap();
    let ev = sd.eigenvalues();
    assert!(ev.windows(2).all(|w| w[0] < w[1]));
    let dim = op.dim();
    let mut total = Operator::zeros(dim);
    for (i, (_, p)) in sd.pairs().iter().enumerate() {
        assert!(p.is_projector());
        for (_, q) in &sd.pairs()[i + 1..] {
            assert!((p * q).max_abs() <= 1e-10);
        }
        total = &total + p;
    }
    assert!(total.max_abs_diff(&Operator::identity(dim)).unwrap() <= 1e-10);
    assert!(sd.reconstruct().max_abs_diff(op).unwrap() <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_decomposition_reconstructs(seed in any::<u64>(), dim in 1usize..=8) {
        let mut rng = streams::seeded(seed);
        check_spectral(&random_hermitian(dim, &mut rng));
    }

    #[test]
    fn degenerate_spectra_merge(seed in any::<u64>(), dim in 2usize..=8, levels in 1usize..=3) {
        let mut rng = streams::seeded(seed);
        let u = Operator::random_unitary(dim, &mut rng).unwrap();
        let diag: Vec<f64> = (0..dim).map(|k| (k % levels) as f64 - 1.0).collect();
        let op = Operator::diagonal(&diag).unwrap().conjugate_by(&u).unwrap();
        let op = (&op + &op.adjoint()).scale_real(0.5);
        let sd = spectral_decomposition(&op).unwrap();
        prop_assert_eq!(sd.len(), levels.min(dim));
        check_spectral(&op);
    }

    #[test]
    fn embedded_projectors_commute(seed in any::<u64>(), da in 1usize..=4, db in 1usize..=4) {
        let mut rng = streams::seeded(seed);
        let p = random_pvm(da, 1.max(da / 2), &mut rng).unwrap();
        let q = random_pvm(db, 1.max(db / 2), &mut rng).unwrap();
        for a in p.projectors() {
            for b in q.projectors() {
                let left = tensor_op(a, &Operator::identity(db));
                let right = tensor_op(&Operator::identity(da), b);
                prop_assert!(commutator_norm(&left, &right).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn tensor_norm_is_multiplicative(seed in any::<u64>(), da in 1usize..=6, db in 1usize..=6, sa in 0.1f64..10.0, sb in 0.1f64..10.0) {
        let mut rng = streams::seeded(seed);
        let a = StateVector::random(da, &mut rng).unwrap().scale(c(sa, 0.0));
        let b = StateVector::random(db, &mut rng).unwrap().scale(c(0.0, sb));
        let ab = tensor_vec(&a, &b);
        prop_assert!((ab.norm() - a.norm() * b.norm()).abs() <= 1e-12 * (1.0 + sa * sb));
    }

    #[test]
    fn pvm_probabilities_and_coarse_graining(seed in any::<u64>(), dim in 2usize..=6) {
        let mut rng = streams::seeded(seed);
        let n = rng.random_range(2..=dim);
        let m = random_pvm(dim, n, &mut rng).unwrap();
        let psi = StateVector::random(dim, &mut rng).unwrap();
        let probs = m.probabilities(&psi).unwrap();
        prop_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        let labels = m.outcomes().labels();
        let subset = random_subset(&labels, &mut rng);
        let coarse = coarse_projector(&m, &subset).unwrap();
        prop_assert!(coarse.is_projector());
        let p_coarse = coarse.apply(&psi).unwrap().norm_squared();
        let p_sum: f64 = subset.iter().map(|x| born_probability(&m, &psi, x).unwrap()).sum();
        prop_assert!((p_coarse - p_sum).abs() <= 1e-10);
    }

    #[test]
    fn spectral_pvm_expectation(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = streams::seeded(seed);
        let op = random_hermitian(dim, &mut rng);
        let m = Pvm::from_operator(&op).unwrap();
        let psi = StateVector::random(dim, &mut rng).unwrap();
        let direct = psi.inner(&op.apply(&psi).unwrap()).unwrap().re;
        prop_assert!((m.expectation(&psi).unwrap() - direct).abs() <= 1e-9);
    }

    #[test]
    fn joint_measurement_factorizes(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = streams::seeded(seed);
        let ma = random_pvm(da, rng.random_range(2..=da), &mut rng).unwrap();
        let mb = random_pvm(db, rng.random_range(2..=db), &mut rng).unwrap();
        let j = joint_measurement(&ma, &mb).unwrap();
        let i_set = random_subset(&j.outcomes_a(), &mut rng);
        let j_set = random_subset(&j.outcomes_b(), &mut rng);
        let lhs = j.coarse(&i_set, &j_set).unwrap();
        let rhs = &j.coarse_a(&i_set).unwrap() * &j.coarse_b(&j_set).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-10);

        // marginal consistency on an arbitrary state
        let space = BipartiteSpace::new(da, db).unwrap();
        let psi = StateVector::random(space.dim(), &mut rng).unwrap();
        let table = j.probability_table(&psi).unwrap();
        let left = embed_left(&ma, space).unwrap();
        let right = embed_right(&mb, space).unwrap();
        for (x, label) in j.outcomes_a().iter().enumerate() {
            let row: f64 = table[x].iter().sum();
            prop_assert!((row - born_probability(&left, &psi, label).unwrap()).abs() <= 1e-10);
        }
        for (y, label) in j.outcomes_b().iter().enumerate() {
            let col: f64 = table.iter().map(|r| r[y]).sum();
            prop_assert!((col - born_probability(&right, &psi, label).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn product_states_factorize_and_are_separate(seed in any::<u64>(), da in 1usize..=4, db in 1usize..=4) {
        let mut rng = streams::seeded(seed);
        let ma = random_pvm(da, rng.random_range(1..=da), &mut rng).unwrap();
        let mb = random_pvm(db, rng.random_range(1..=db), &mut rng).unwrap();
        let a = StateVector::random(da, &mut rng).unwrap();
        let b = StateVector::random(db, &mut rng).unwrap();
        let j = joint_measurement(&ma, &mb).unwrap();
        let psi = tensor_vec(&a, &b);
        let table = j.probability_table(&psi).unwrap();
        let pa = ma.probabilities(&a).unwrap();
        let pb = mb.probabilities(&b).unwrap();
        for x in 0..pa.len() {
            for y in 0..pb.len() {
                prop_assert!((table[x][y] - pa[x] * pb[y]).abs() <= 1e-10);
            }
        }
        prop_assert!(separation_verdict(&j, &psi, 1e-10).unwrap().separate);
    }

    #[test]
    fn schmidt_reconstructs(seed in any::<u64>(), da in 1usize..=4, db in 1usize..=4, product in any::<bool>()) {
        let mut rng = streams::seeded(seed);
        let space = BipartiteSpace::new(da, db).unwrap();
        let psi = if product {
            tensor_vec(&StateVector::random(da, &mut rng).unwrap(), &StateVector::random(db, &mut rng).unwrap())
        } else {
            StateVector::random(space.dim(), &mut rng).unwrap()
        };
        let terms = schmidt(&psi, space).unwrap();
        prop_assert!(terms.windows(2).all(|w| w[0].coefficient >= w[1].coefficient));
        prop_assert!((terms.iter().map(|t| t.coefficient.powi(2)).sum::<f64>() - 1.0).abs() <= 1e-10);
        let rebuilt = terms.iter().fold(StateVector::zeros(space.dim()).unwrap(), |acc, t| {
            &acc + &tensor_vec(&t.left, &t.right).scale(c(t.coefficient, 0.0))
        });
        prop_assert!(rebuilt.distance(&psi).unwrap() <= 1e-9);
        if product {
            prop_assert_eq!(terms.len(), 1);
        }
    }

    #[test]
    fn witness_on_commuting_pairs(seed in any::<u64>(), dim in 4usize..=16) {
        let mut rng = streams::seeded(seed);
        let (pa, pb) = random_commuting_pair(dim, &mut rng).unwrap();
        let w = construct_witness(&pa, &pb, &mut rng).unwrap();
        prop_assert!(w.residuals.within(WITNESS_TOL), "{:?}", w.residuals);
        let v = separation_verdict(&binary_joint(&pa, &pb).unwrap(), &w.psi, 1e-10).unwrap();
        prop_assert!(!v.separate);
        let mut missing = v.missing_couples.clone();
        missing.sort();
        prop_assert_eq!(missing, vec![("+".to_string(), "+".to_string()), ("-".to_string(), "-".to_string())]);
    }

    #[test]
    fn witness_on_fine_grained_tensor_measurements(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = streams::seeded(seed);
        let ma = random_pvm(da, rng.random_range(2..=da), &mut rng).unwrap();
        let mb = random_pvm(db, rng.random_range(2..=db), &mut rng).unwrap();
        let j = joint_measurement(&ma, &mb).unwrap();
        let i_set = random_proper_subset(&j.outcomes_a(), &mut rng);
        let j_set = random_proper_subset(&j.outcomes_b(), &mut rng);
        let w = sepq_core::separation::witness_for_subsets(&j, &i_set, &j_set, &mut rng).unwrap();
        prop_assert!(w.residuals.within(WITNESS_TOL));
        let v = separation_verdict(&j, &w.psi, 1e-10).unwrap();
        prop_assert!(!v.separate);
        // every missing couple lies in I×J or (E−I)×(F−J)
        for (x, y) in &v.missing_couples {
            let in_i = i_set.contains(x);
            let in_j = j_set.contains(y);
            if in_i != in_j {
                prop_assert!(false, "unexpected missing couple ({}, {})", x, y);
            }
        }
    }

    #[test]
    fn verdict_is_self_consistent_under_tolerance(seed in any::<u64>(), dim in 4usize..=9, k in 0u32..8) {
        let mut rng = streams::seeded(seed);
        let (pa, pb) = random_commuting_pair(dim, &mut rng).unwrap();
        let psi = StateVector::random(dim, &mut rng).unwrap();
        let j = binary_joint(&pa, &pb).unwrap();
        let tol = 1e-10;
        let tol2 = tol * 10f64.powi(k as i32 + 1);
        let v1 = separation_verdict(&j, &psi, tol).unwrap();
        let v2 = separation_verdict(&j, &psi, tol2).unwrap();
        prop_assert!(v2.possible_a.iter().all(|x| v1.possible_a.contains(x)));
        prop_assert!(v2.possible_b.iter().all(|y| v1.possible_b.contains(y)));
        for v in [&v1, &v2] {
            prop_assert_eq!(v.separate, v.missing_couples.is_empty());
            for (x, y) in &v.missing_couples {
                let i = v.outcomes_a.iter().position(|o| o == x).unwrap();
                let jj = v.outcomes_b.iter().position(|o| o == y).unwrap();
                prop_assert!(v.probabilities[i][jj] <= v.tol);
            }
        }
    }

    #[test]
    fn quantum_models_respect_bounds(seed in any::<u64>()) {
        let mut rng = streams::seeded(seed);
        let psi = StateVector::random(4, &mut rng).unwrap();
        let angles: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        let m = quantum_coincidence_model(&psi, &angles[..2], &angles[2..]).unwrap();
        prop_assert!(chsh_exact(&m).unwrap().abs_s() <= TSIRELSON_BOUND + 1e-9);
        prop_assert!(no_signaling_defect(&m).unwrap() <= 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!(m.exact_distribution(i, j).unwrap().is_distribution(1e-12));
            }
        }
    }

    #[test]
    fn finite_hidden_variable_models_respect_classical_bound(seed in any::<u64>(), states in 1usize..=12) {
        let mut rng = streams::seeded(seed);
        let raw: Vec<f64> = (0..states).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let fix = 1.0 - weights.iter().sum::<f64>();
        let mut weights = weights;
        weights[0] += fix;
        let mut resp = |n: usize| -> Vec<Vec<Sign>> {
            (0..n)
                .map(|_| (0..states).map(|_| if rng.random::<bool>() { Sign::Plus } else { Sign::Minus }).collect())
                .collect()
        };
        let (ra, rb) = (resp(2), resp(2));
        let m = HiddenVariableModel::new(weights, ra, rb).unwrap();
        prop_assert!(chsh_exact(&m).unwrap().abs_s() <= 2.0 + 1e-9);
        prop_assert!(no_signaling_defect(&m).unwrap() <= 1e-12);
    }
}

/// Sampled correlations stay within 4 standard errors of the exact ones in
/// at least 99% of cells over seeded trials.
#[test]
fn sampled_correlations_track_exact_ones() {
    let mut rng = streams::seeded(99);
    let mut cells = 0;
    let mut within = 0;
    for seed in 0..100u64 {
        let psi = StateVector::random(4, &mut rng).unwrap();
        let angles: Vec<f64> = (0..4).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect();
        let m = quantum_coincidence_model(&psi, &angles[..2], &angles[2..]).unwrap();
        let exact = chsh_exact(&m).unwrap();
        let sampled = chsh_sampled(&m, 2000, seed).unwrap();
        let stats = sampled.cells.unwrap();
        for i in 0..2 {
            for j in 0..2 {
                cells += 1;
                let se = stats[i][j].stderr.max(1e-12);
                if (sampled.correlations[i][j] - exact.correlations[i][j]).abs() < 4.0 * se {
                    within += 1;
                }
            }
        }
    }
    assert!(within as f64 >= 0.99 * cells as f64, "{within}/{cells}");
}
