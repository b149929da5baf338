//! Macroscopic coincidence models.
//!
//! The exploding rock carries correlations fixed at the moment of the
//! explosion and only discovered by the measurements; it is a local
//! hidden-variable model and stays within `|S| ≤ 2`. The rod-connected dice
//! and the connected vessels create their correlations during the joint
//! measurement and reach `S = 4`.
//!
//! The dice and vessels tables are defined here, not taken from a published
//! protocol: they are the simplest distributions with that behaviour.

use std::f64::consts::{PI, TAU};

use rand::{Rng, RngCore};

use crate::bell::{check_setting, CoincidenceModel, HiddenVariableModel, OutcomeTable, Sign};
use crate::error::Result;

/// Total water volume of the connected vessels, in litres.
pub const VESSELS_TOTAL_LITRES: f64 = 20.0;
/// A siphon test is positive iff it collects more than this.
pub const VESSELS_THRESHOLD_LITRES: f64 = 10.0;

/// Angular distance in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `E(θ_A, θ_B) = 2Δ/π − 1`: the two fragments fly off along `λ` and
/// `λ + π`, each analyzer answers `sign cos(θ − direction)`, and the
/// answers agree on a fraction `Δ/π` of the circle.
pub fn rock_expectation(theta_a: f64, theta_b: f64) -> f64 {
    2.0 * angular_distance(theta_a, theta_b) / PI - 1.0
}

fn rock_response(theta: f64, direction: f64) -> Sign {
    Sign::of((theta - direction).cos())
}

/// Exploding rock with the fragment direction uniform on the circle.
#[derive(Clone, Debug)]
pub struct RockModel {
    pub angles_a: Vec<f64>,
    pub angles_b: Vec<f64>,
}

pub fn rock_model(angles_a: &[f64], angles_b: &[f64]) -> RockModel {
    RockModel {
        angles_a: angles_a.to_vec(),
        angles_b: angles_b.to_vec(),
    }
}

impl RockModel {
    /// The same model with the direction restricted to `n` equally spaced
    /// midpoints `2π(k + ½)/n`, as an explicit hidden-variable model.
    pub fn discretized(&self, n: usize) -> Result<HiddenVariableModel> {
        let dirs: Vec<f64> = (0..n).map(|k| TAU * (k as f64 + 0.5) / n as f64).collect();
        let response = |angles: &[f64], offset: f64| -> Vec<Vec<Sign>> {
            angles
                .iter()
                .map(|&t| dirs.iter().map(|&l| rock_response(t, l + offset)).collect())
                .collect()
        };
        let mut m = HiddenVariableModel::new(
            vec![1.0 / n as f64; n],
            response(&self.angles_a, 0.0),
            response(&self.angles_b, PI),
        )?;
        m.name = format!("exploding-rock (directions discretized to {n})");
        m.labels_a = self.settings_a();
        m.labels_b = self.settings_b();
        Ok(m)
    }
}

impl CoincidenceModel for RockModel {
    fn name(&self) -> String {
        "exploding-rock".into()
    }

    fn settings_a(&self) -> Vec<String> {
        self.angles_a.iter().map(|t| format!("theta={t:.6}")).collect()
    }

    fn settings_b(&self) -> Vec<String> {
        self.angles_b.iter().map(|t| format!("theta={t:.6}")).collect()
    }

    fn sample(&self, i: usize, j: usize, rng: &mut dyn RngCore) -> Result<(Sign, Sign)> {
        check_setting(i, j, self.angles_a.len(), self.angles_b.len())?;
        let direction = rng.random::<f64>() * TAU;
        Ok((
            rock_response(self.angles_a[i], direction),
            rock_response(self.angles_b[j], direction + PI),
        ))
    }

    fn exact_distribution(&self, i: usize, j: usize) -> Option<OutcomeTable> {
        let delta = angular_distance(*self.angles_a.get(i)?, *self.angles_b.get(j)?);
        let same = delta / (2.0 * PI);
        let differ = (PI - delta) / (2.0 * PI);
        Some(OutcomeTable::new(same, differ, differ, same))
    }
}

/// Largest `|S|` of the discretized rock model over every choice of two
/// settings per side from `grid`, with the maximizing angles
/// `[a1, a2, b1, b2]`.
pub fn rock_grid_max_chsh(grid: &[f64], directions: usize) -> Result<(f64, [f64; 4])> {
    let hv = rock_model(grid, grid).discretized(directions)?;
    let e = hv.correlation_matrix();
    let (s, idx) = crate::bell::max_chsh_over_grid(&e);
    Ok((s, [grid[idx[0]], grid[idx[1]], grid[idx[2]], grid[idx[3]]]))
}

/// Two dice joined by a rigid rod. A shared fair coin decides the faces;
/// the rod makes them agree for every setting pair except `(2, 2)`, where
/// they disagree.
#[derive(Clone, Copy, Debug, Default)]
pub struct RodDiceModel;

pub fn rod_dice_model() -> RodDiceModel {
    RodDiceModel
}

impl CoincidenceModel for RodDiceModel {
    fn name(&self) -> String {
        "rod-dice".into()
    }

    fn settings_a(&self) -> Vec<String> {
        vec!["roll-1".into(), "roll-2".into()]
    }

    fn settings_b(&self) -> Vec<String> {
        vec!["roll-1".into(), "roll-2".into()]
    }

    fn sample(&self, i: usize, j: usize, rng: &mut dyn RngCore) -> Result<(Sign, Sign)> {
        check_setting(i, j, 2, 2)?;
        let a = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
        let b = if (i, j) == (1, 1) { a.flip() } else { a };
        Ok((a, b))
    }

    fn exact_distribution(&self, i: usize, j: usize) -> Option<OutcomeTable> {
        if i > 1 || j > 1 {
            return None;
        }
        Some(if (i, j) == (1, 1) {
            OutcomeTable::new(0.0, 0.5, 0.5, 0.0)
        } else {
            OutcomeTable::new(0.5, 0.0, 0.0, 0.5)
        })
    }
}

/// Vessel-side test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VesselTest {
    /// Reference test, always positive.
    Reference,
    /// Siphon out the water; positive iff more than 10 L is collected.
    Siphon,
}

/// Two vessels holding 20 L of water, connected by a tube. Settings per
/// side are `[R, S]`.
///
/// A lone siphon drains both vessels and collects all 20 L. Two siphons
/// split the water as `V_A = 20u`, `V_B = 20 − V_A` with `u` uniform, so
/// exactly one side exceeds 10 L; the exact 10/10 tie (probability zero)
/// reads `(−1, −1)`. The tube makes side A's siphon marginal depend on
/// whether side B siphons too, so this model signals.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConnectedVesselsModel;

pub fn vessels_model() -> ConnectedVesselsModel {
    ConnectedVesselsModel
}

impl ConnectedVesselsModel {
    pub const SETTINGS: [VesselTest; 2] = [VesselTest::Reference, VesselTest::Siphon];

    /// Litres collected by `(A, B)` when both siphon with split `u`.
    pub fn split(u: f64) -> (f64, f64) {
        let v_a = VESSELS_TOTAL_LITRES * u;
        (v_a, VESSELS_TOTAL_LITRES - v_a)
    }

    fn siphon_outcome(litres: f64) -> Sign {
        if litres > VESSELS_THRESHOLD_LITRES {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl CoincidenceModel for ConnectedVesselsModel {
    fn name(&self) -> String {
        "connected-vessels".into()
    }

    fn settings_a(&self) -> Vec<String> {
        vec!["R".into(), "S".into()]
    }

    fn settings_b(&self) -> Vec<String> {
        vec!["R".into(), "S".into()]
    }

    fn sample(&self, i: usize, j: usize, rng: &mut dyn RngCore) -> Result<(Sign, Sign)> {
        check_setting(i, j, 2, 2)?;
        use VesselTest::*;
        Ok(match (Self::SETTINGS[i], Self::SETTINGS[j]) {
            (Siphon, Siphon) => {
                let (v_a, v_b) = Self::split(rng.random::<f64>());
                (Self::siphon_outcome(v_a), Self::siphon_outcome(v_b))
            }
            // reference is +1; a lone siphon collects all 20 L
            _ => (Sign::Plus, Sign::Plus),
        })
    }

    fn exact_distribution(&self, i: usize, j: usize) -> Option<OutcomeTable> {
        if i > 1 || j > 1 {
            return None;
        }
        Some(match (Self::SETTINGS[i], Self::SETTINGS[j]) {
            (VesselTest::Siphon, VesselTest::Siphon) => OutcomeTable::new(0.0, 0.5, 0.5, 0.0),
            _ => OutcomeTable::certain(Sign::Plus, Sign::Plus),
        })
    }
}
