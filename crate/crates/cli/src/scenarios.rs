use std::f64::consts::TAU;

use sepq_core::bell::{
    chsh_exact, chsh_sampled, no_signaling_defect, quantum_coincidence_model, sampled_signaling_score,
    ChshReport, CoincidenceModel, CHSH_CONVENTION,
};
use sepq_core::bipartite::{joint_measurement, phi_plus, psi_plus, singlet, JointMeasurement};
use sepq_core::classical_models::{rock_grid_max_chsh, rock_model, rod_dice_model, vessels_model};
use sepq_core::hilbert::{c, StateVector};
use sepq_core::measurement::{random_pvm, sample_index, Pvm};
use sepq_core::product_test::{half_certain_entity, is_actual, meet_actual, wooden_cube, epr_protocol, EprObservable};
use sepq_core::separation::{binary_joint, no_cloning_witness, separation_verdict, witness_for_subsets, SeparationVerdict};
use sepq_core::streams;

use crate::config::{ModelChoice, Scenario, ScenarioConfig, TwoQubitState};
use crate::error::CliError;
use crate::report::{Cell, Report, Table};

// stream indices under the run seed
const STREAM_BASIS_A: u64 = 1;
const STREAM_BASIS_B: u64 = 2;
const STREAM_WITNESS: u64 = 3;
const STREAM_SAMPLES: u64 = 4;

/// Run a resolved configuration.
pub fn run(config: &ScenarioConfig) -> Result<Report, CliError> {
    let mut report = Report::new(config);
    match config.scenario {
        Scenario::Aerts => aerts(config, &mut report)?,
        Scenario::Chsh => chsh(config, &mut report)?,
        Scenario::Models => models(config, &mut report)?,
        Scenario::ProductTest => product_tests(config, &mut report)?,
        Scenario::Epr => epr(config, &mut report)?,
        Scenario::NoCloning => no_cloning(config, &mut report)?,
    }
    Ok(report)
}

pub fn two_qubit_state(s: TwoQubitState) -> StateVector {
    match s {
        TwoQubitState::Singlet => singlet(),
        TwoQubitState::PsiPlus => psi_plus(),
        TwoQubitState::PhiPlus => phi_plus(),
        TwoQubitState::Product00 => StateVector::basis(4, 0).expect("dim 4"),
    }
}

/// Named single-qubit states `0`, `1`, `+`, `-`, `+i`, `-i`.
pub fn qubit_state(name: &str) -> Result<StateVector, CliError> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match name {
        "0" => vec![c(1.0, 0.0), c(0.0, 0.0)],
        "1" => vec![c(0.0, 0.0), c(1.0, 0.0)],
        "+" => vec![c(h, 0.0), c(h, 0.0)],
        "-" => vec![c(h, 0.0), c(-h, 0.0)],
        "+i" => vec![c(h, 0.0), c(0.0, h)],
        "-i" => vec![c(h, 0.0), c(0.0, -h)],
        _ => return Err(CliError::config("state", format!("unknown qubit state `{name}`"))),
    };
    Ok(StateVector::normalized(amps)?)
}

fn verdict_table(name: &str, v: &SeparationVerdict) -> Table {
    let mut t = Table::new(name, &["x", "y", "probability", "marginally_possible", "missing"]);
    for (i, x) in v.outcomes_a.iter().enumerate() {
        for (j, y) in v.outcomes_b.iter().enumerate() {
            let marginal = v.possible_a.contains(x) && v.possible_b.contains(y);
            let missing = v.missing_couples.iter().any(|(a, b)| a == x && b == y);
            t.row(vec![
                x.as_str().into(),
                y.as_str().into(),
                v.probabilities[i][j].into(),
                marginal.into(),
                missing.into(),
            ]);
        }
    }
    t
}

fn couples_text(v: &SeparationVerdict) -> String {
    let parts: Vec<String> = v.missing_couples.iter().map(|(x, y)| format!("({x},{y})")).collect();
    format!("{{{}}}", parts.join(","))
}

fn state_table(name: &str, states: &[(&str, &StateVector)]) -> Table {
    let mut t = Table::new(name, &["vector", "index", "re", "im"]);
    for (label, v) in states {
        for (k, a) in v.amplitudes().iter().enumerate() {
            t.row(vec![(*label).into(), k.into(), a.re.into(), a.im.into()]);
        }
    }
    t
}

fn aerts(config: &ScenarioConfig, report: &mut Report) -> Result<(), CliError> {
    let p = &config.aerts;
    let seed = config.seed();
    let side = |dim: usize, stream: u64| -> Result<Pvm, CliError> {
        Ok(if p.random_basis {
            random_pvm(dim, dim, &mut streams::stream(seed, stream))?
        } else {
            Pvm::computational(dim)?
        })
    };
    let m_a = side(p.dim_a, STREAM_BASIS_A)?;
    let m_b = side(p.dim_b, STREAM_BASIS_B)?;
    let joint = joint_measurement(&m_a, &m_b)?;
    let labels = |m: &Pvm, idx: &[usize]| -> Vec<String> {
        idx.iter().map(|&k| m.outcomes().get(k).label.clone()).collect()
    };
    let subset_a = labels(&m_a, &p.subset_a);
    let subset_b = labels(&m_b, &p.subset_b);
    let w = witness_for_subsets(&joint, &subset_a, &subset_b, &mut streams::stream(seed, STREAM_WITNESS))?;

    for (name, r) in w.residuals.entries() {
        report.value(format!("residual.{name}"), r);
    }
    report.value("residual.max", w.residuals.max());
    report.verdict("witness_verified", w.residuals.within(sepq_core::separation::WITNESS_TOL));

    let p_a = joint.coarse_a(&subset_a)?;
    let p_b = joint.coarse_b(&subset_b)?;
    let binary = binary_joint(&p_a, &p_b)?;
    let coarse = separation_verdict(&binary, &w.psi, p.tol)?;
    let fine = separation_verdict(&joint, &w.psi, p.tol)?;
    report.verdict("separate", coarse.separate);
    report.verdict("missing_couples", couples_text(&coarse));
    report.verdict("fine.separate", fine.separate);
    report.verdict("fine.missing_couples", couples_text(&fine));
    report.note("binary outcomes: `+` = inside the chosen subset, `-` = outside it");
    report.note(format!(
        "I = {{{}}} on A, J = {{{}}} on B",
        subset_a.join(","),
        subset_b.join(",")
    ));

    report.table(verdict_table("binary_probabilities", &coarse));
    report.table(verdict_table("fine_probabilities", &fine));
    report.table(sampled_couples(&binary, &w.psi, config.samples(), seed)?);
    report.table(state_table("witness", &[("phi", &w.phi), ("chi", &w.chi), ("psi", &w.psi)]));
    Ok(())
}

/// Empirical couple counts from repeated joint measurement of `psi`.
fn sampled_couples(joint: &JointMeasurement, psi: &StateVector, n: u64, seed: u64) -> Result<Table, CliError> {
    let pvm = joint.as_pvm();
    let probs = pvm.probabilities(psi)?;
    let mut counts = vec![0u64; probs.len()];
    let mut rng = streams::stream(seed, STREAM_SAMPLES);
    for _ in 0..n {
        counts[sample_index(&probs, &mut rng)] += 1;
    }
    let mut t = Table::new("binary_sampled_counts", &["couple", "count", "frequency"]);
    for (k, o) in pvm.outcomes().iter().enumerate() {
        t.row(vec![o.label.as_str().into(), counts[k].into(), (counts[k] as f64 / n as f64).into()]);
    }
    Ok(t)
}

fn correlation_table(name: &str, exact: &ChshReport, sampled: Option<&ChshReport>) -> Table {
    let mut t = Table::new(
        name,
        &["i", "j", "setting_a", "setting_b", "e_exact", "e_sampled", "stderr", "trials"],
    );
    for i in 0..2 {
        for j in 0..2 {
            let (es, se, n) = match sampled.and_then(|s| s.cells.map(|c| (s.correlations[i][j], c[i][j]))) {
                Some((e, cell)) => (Cell::Num(e), Cell::Num(cell.stderr), Cell::Int(cell.trials as i64)),
                None => (Cell::Text(String::new()), Cell::Text(String::new()), Cell::Int(0)),
            };
            t.row(vec![
                (i + 1).into(),
                (j + 1).into(),
                exact.settings_a[i].as_str().into(),
                exact.settings_b[j].as_str().into(),
                exact.correlations[i][j].into(),
                es,
                se,
                n,
            ]);
        }
    }
    t
}

fn record_chsh(
    report: &mut Report,
    prefix: &str,
    model: &dyn CoincidenceModel,
    samples: u64,
    seed: u64,
) -> Result<(), CliError> {
    let exact = chsh_exact(model)?;
    let sampled = chsh_sampled(model, samples, seed)?;
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    report.value(key("s_exact"), exact.s);
    report.value(key("abs_s_exact"), exact.abs_s());
    report.value(key("s_sampled"), sampled.s);
    report.value(key("s_sampled_stderr"), sampled.s_stderr().unwrap_or(f64::NAN));
    let defect = no_signaling_defect(model)?;
    report.value(key("no_signaling_defect"), defect);
    report.value(key("sampled_signaling_z"), sampled_signaling_score(&sampled).unwrap_or(f64::NAN));
    report.verdict(key("exceeds_classical"), exact.exceeds_classical());
    report.verdict(key("exceeds_tsirelson"), exact.exceeds_tsirelson());
    report.verdict(key("no_signaling"), defect <= 1e-12);
    let label = if prefix.is_empty() { exact.model.clone() } else { prefix.to_string() };
    report.note(format!("{label}: {}", exact.bound_summary()));
    report.table(correlation_table(&key("correlations"), &exact, Some(&sampled)));
    Ok(())
}

fn chsh(config: &ScenarioConfig, report: &mut Report) -> Result<(), CliError> {
    let p = &config.chsh;
    let model = quantum_coincidence_model(&two_qubit_state(p.state), &p.angles_a, &p.angles_b)?;
    report.note(format!("convention: {CHSH_CONVENTION}"));
    report.note("bounds: classical 2, Tsirelson 2.82842712475, algebraic 4");
    record_chsh(report, "", &model, config.samples(), config.seed())
}

fn models(config: &ScenarioConfig, report: &mut Report) -> Result<(), CliError> {
    let p = &config.models;
    let (n, seed) = (config.samples(), config.seed());
    report.note(format!("convention: {CHSH_CONVENTION}"));
    let want = |m: ModelChoice| p.model == ModelChoice::All || p.model == m;
    if want(ModelChoice::RodDice) {
        record_chsh(report, "rod-dice", &rod_dice_model(), n, seed)?;
    }
    if want(ModelChoice::Vessels) {
        record_chsh(report, "vessels", &vessels_model(), n, seed)?;
    }
    if want(ModelChoice::Rock) {
        record_chsh(report, "rock", &rock_model(&p.rock_angles_a, &p.rock_angles_b), n, seed)?;
        let step = TAU / (p.grid_points - 1) as f64;
        let grid: Vec<f64> = (0..p.grid_points).map(|k| k as f64 * step).collect();
        let (max_s, argmax) = rock_grid_max_chsh(&grid, p.directions)?;
        report.value("rock.grid_max_abs_s", max_s);
        report.verdict("rock.grid_within_classical", max_s <= 2.0 + 1e-6);
        let mut t = Table::new("rock.grid_argmax", &["a1", "a2", "b1", "b2", "abs_s"]);
        t.row(vec![argmax[0].into(), argmax[1].into(), argmax[2].into(), argmax[3].into(), max_s.into()]);
        report.table(t);
    }
    Ok(())
}

fn product_tests(config: &ScenarioConfig, report: &mut Report) -> Result<(), CliError> {
    let trials = config.samples() as usize;
    let mut t = Table::new(
        "product_tests",
        &["entity", "state", "tests", "individually_actual", "meet_actual", "trials", "positive", "failure_frequency"],
    );
    let mut corpus = Vec::new();
    for state in &config.product_test.cube_states {
        corpus.push(("wooden-cube", wooden_cube(state)?, vec!["burn", "float"]));
    }
    corpus.push(("half-certain", half_certain_entity()?, vec!["sure", "coin"]));
    for (k, (name, entity, tests)) in corpus.iter().enumerate() {
        let individual: Vec<String> = tests
            .iter()
            .map(|test| Ok(format!("{test}={}", is_actual(entity, test)?.actual)))
            .collect::<Result<_, CliError>>()?;
        let cert = meet_actual(entity, tests, trials, &mut streams::stream(config.seed(), k as u64 + 1))?;
        report.verdict(format!("{name}.{}.meet_actual", entity.current()), cert.actual);
        t.row(vec![
            (*name).into(),
            entity.current().into(),
            tests.join("+").into(),
            individual.join(" ").into(),
            cert.actual.into(),
            cert.trials.into(),
            cert.positive_trials.into(),
            cert.failure_frequency().into(),
        ]);
    }
    report.note("a meet property is certified actual iff every constituent test is certain to be positive");
    report.table(t);
    Ok(())
}

fn epr(config: &ScenarioConfig, report: &mut Report) -> Result<(), CliError> {
    let p = &config.epr;
    let observables = p
        .observables
        .iter()
        .map(|o| EprObservable::parse(o))
        .collect::<Result<Vec<_>, _>>()?;
    let r = epr_protocol(
        &two_qubit_state(p.state),
        &observables,
        config.samples() as usize,
        &mut streams::seeded(config.seed()),
    )?;
    report.value("hit_rate", r.hit_rate());
    let mut t = Table::new("epr", &["observable", "trials", "hits", "hit_rate", "min_prediction_certainty"]);
    for b in &r.per_observable {
        report.value(format!("hit_rate.{}", b.observable.name()), b.hit_rate());
        t.row(vec![
            b.observable.name().into(),
            b.trials.into(),
            b.hits.into(),
            b.hit_rate().into(),
            b.min_prediction_certainty.into(),
        ]);
    }
    report.verdict("all_predictions_certain", r.per_observable.iter().all(|b| b.min_prediction_certainty >= 1.0 - 1e-10));
    report.note("per trial: pick an observable, measure it on B, predict A by the most likely conditional outcome, then measure A");
    report.table(t);
    Ok(())
}

fn no_cloning(config: &ScenarioConfig, report: &mut Report) -> Result<(), CliError> {
    let p = &config.no_cloning;
    let cert = no_cloning_witness(&qubit_state(&p.psi)?, &qubit_state(&p.phi)?)?;
    report.value("overlap", cert.overlap);
    report.value("defect", cert.defect);
    report.verdict("cloning_obstructed", cert.cloning_obstructed);
    report.note("a unitary cloner preserves inner products, so it needs overlap c with c = c^2");
    Ok(())
}
