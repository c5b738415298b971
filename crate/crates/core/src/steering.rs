//! The fine-grained steering test.
//!
//! Bob asks Alice to steer his qubit into an eigenstate of one of two
//! maximally incompatible observables P, Q. Alice measures S (for P) or T
//! (for Q) and announces her result. The steering functional is
//!
//! ```text
//! F = P(b along P | a along S) + P(b along Q | a along T)
//! ```
//!
//! and a local-hidden-state model bounds it by twice the best winning
//! probability of the single-qubit uncertainty game:
//!
//! - Scenario I (the supplier knows Bob's pair in advance): `1 + 1/√2`.
//! - Scenario II (the pair is revealed only after the states are sent):
//!   `3/2`, from averaging the game over Bob's second observable.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::{conditional_prob, marginal_prob, ConditionalProfile, Direction, Event, Outcome};
use crate::optimizer::{maximize_over_directions, GridSpec, OptResult};
use crate::qcore::{BlochVector, DensityMatrix};
use crate::tol;

const ALICE: usize = 0;
const BOB: usize = 1;

/// Alice's two measurement axes, Bob's two (orthogonal) axes and the
/// announced/target outcomes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteeringSetting {
    alice_s: Direction,
    alice_t: Direction,
    bob_p: Direction,
    bob_q: Direction,
    outcome_a: Outcome,
    outcome_b: Outcome,
}

impl SteeringSetting {
    pub fn new(
        alice_s: Direction,
        alice_t: Direction,
        bob_p: Direction,
        bob_q: Direction,
        outcome_a: Outcome,
        outcome_b: Outcome,
    ) -> Result<Self> {
        let overlap = bob_p.dot(&bob_q);
        if overlap.abs() > tol::ORTHOGONALITY_TOL {
            return Err(Error::invalid(format!(
                "Bob's observables must be orthogonal on the Bloch sphere (|p·q| = {:e})",
                overlap.abs()
            )));
        }
        Ok(Self { alice_s, alice_t, bob_p, bob_q, outcome_a, outcome_b })
    }

    /// S = P = σz, T = Q = σx.
    pub fn zx(outcome_a: Outcome, outcome_b: Outcome) -> Self {
        Self::new(Direction::Z, Direction::X, Direction::Z, Direction::X, outcome_a, outcome_b)
            .expect("z and x are orthogonal")
    }

    pub fn with_alice(self, alice_s: Direction, alice_t: Direction) -> Self {
        Self { alice_s, alice_t, ..self }
    }

    pub fn alice_s(&self) -> Direction {
        self.alice_s
    }
    pub fn alice_t(&self) -> Direction {
        self.alice_t
    }
    pub fn bob_p(&self) -> Direction {
        self.bob_p
    }
    pub fn bob_q(&self) -> Direction {
        self.bob_q
    }
    pub fn outcome_a(&self) -> Outcome {
        self.outcome_a
    }
    pub fn outcome_b(&self) -> Outcome {
        self.outcome_b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// Bob's observable pair is known before the states are prepared.
    I,
    /// The pair is revealed only after preparation.
    II,
}

impl Scenario {
    pub fn bound(self) -> f64 {
        match self {
            Scenario::I => scenario1_bound(),
            Scenario::II => scenario2_bound(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteeringVerdict {
    pub functional_value: f64,
    pub bound: f64,
    pub scenario: Scenario,
    pub steerable: bool,
    pub margin: f64,
}

/// ½·P(win along p) + ½·P(win along q) for a single qubit.
pub fn fur_game_value(rho: &DensityMatrix, p: Direction, q: Direction, win: Outcome) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::invalid(format!("uncertainty game needs a qubit, got dim {}", rho.dim())));
    }
    let along = |d| marginal_prob(rho, Event::new(0, d, win)).map(|pr| pr.value());
    Ok(0.5 * along(p)? + 0.5 * along(q)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FurMax {
    pub value: f64,
    /// A maximally certain state. The origin when p = −q, where every state
    /// scores ½.
    pub maximizer: BlochVector,
}

/// Best game value over all qubit states: ½ + |p̂+q̂|/4, attained on the
/// pure state along ±(p̂+q̂).
pub fn fur_game_max(p: Direction, q: Direction, win: Outcome) -> FurMax {
    let (a, b) = (p.unit(), q.unit());
    let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
    let len = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
    if len < 1e-12 {
        return FurMax { value: 0.5, maximizer: BlochVector::ORIGIN };
    }
    let s = win.sign() / len;
    let maximizer = BlochVector::new(s * sum[0], s * sum[1], s * sum[2]).expect("unit vector");
    FurMax { value: 0.5 + len / 4.0, maximizer }
}

/// P(b along P | a along S) + P(b along Q | a along T).
pub fn steering_functional(rho: &DensityMatrix, s: &SteeringSetting) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::invalid(format!("steering functional needs two qubits, got dim {}", rho.dim())));
    }
    let term = |alice: Direction, bob: Direction| {
        conditional_prob(
            rho,
            Event::new(ALICE, alice, s.outcome_a),
            Event::new(BOB, bob, s.outcome_b),
        )
        .map(|p| p.value())
    };
    Ok(term(s.alice_s, s.bob_p)? + term(s.alice_t, s.bob_q)?)
}

/// Local-hidden-state bound when the observable pair is known in advance.
pub const fn scenario1_bound() -> f64 {
    1.0 + FRAC_1_SQRT_2
}

/// Local-hidden-state bound when the observable pair is unknown in advance.
pub const fn scenario2_bound() -> f64 {
    1.5
}

/// Average over a uniformly random second observable q̂ of the game value
/// ½P(0 along p̂) + ½P(0 along q̂) for the hidden state n: ¼(2 + n·p̂).
pub fn scenario2_average(n: BlochVector, p: Direction) -> f64 {
    0.25 * (2.0 + n.dot(p.unit()))
}

/// Independent random streams used by [`scenario2_average_mc`]; fixed so the
/// estimate depends only on the seed.
const MC_STREAMS: u64 = 64;

/// Monte-Carlo estimate of [`scenario2_average`] with q̂ drawn uniformly on
/// the sphere.
pub fn scenario2_average_mc(n: BlochVector, p: Direction, samples: u64, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::invalid("Monte-Carlo estimate needs at least one sample"));
    }
    let fixed = 0.25 * (1.0 + n.dot(p.unit()));
    let per_stream = samples / MC_STREAMS;
    let extra = samples % MC_STREAMS;

    let partial: Vec<f64> = (0..MC_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let count = per_stream + u64::from(stream < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            let mut acc = 0.0;
            for _ in 0..count {
                let q = Direction::random(&mut rng);
                acc += fixed + 0.25 * (1.0 + n.dot(q.unit()));
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum::<f64>() / samples as f64)
}

pub fn verdict(rho: &DensityMatrix, s: &SteeringSetting, scenario: Scenario) -> Result<SteeringVerdict> {
    verdict_with_slack(rho, s, scenario, tol::VERDICT_SLACK)
}

pub fn verdict_with_slack(
    rho: &DensityMatrix,
    s: &SteeringSetting,
    scenario: Scenario,
    slack: f64,
) -> Result<SteeringVerdict> {
    let value = steering_functional(rho, s)?;
    Ok(classify(value, scenario, slack))
}

/// Strict comparison `value > bound + slack`.
pub fn classify(value: f64, scenario: Scenario, slack: f64) -> SteeringVerdict {
    let bound = scenario.bound();
    SteeringVerdict {
        functional_value: value,
        bound,
        scenario,
        steerable: value > bound + slack,
        margin: value - bound,
    }
}

/// The two closed-form terms for √α|00⟩ + √(1−α)|11⟩ with Bob on σz/σx,
/// a = b = 0, Alice along (θs, ·) and (θt, φt).
///
/// Only the sum equals the steering functional: the first term exceeds
/// P(0_z | 0_S) by ½ and the second falls short of P(0_x | 0_T) by ½.
pub fn schmidt_closed_form_terms(alpha: f64, theta_s: f64, theta_t: f64, phi_t: f64) -> (f64, f64) {
    let cs = theta_s.cos();
    let first = ((4.0 * alpha - 1.0) * cs + 2.0 * alpha + 1.0) / ((4.0 * alpha - 2.0) * cs + 2.0);
    let second = ((1.0 - alpha) * alpha).sqrt() * theta_t.sin() * phi_t.cos()
        / ((2.0 * alpha - 1.0) * theta_t.cos() + 1.0);
    (first, second)
}

/// Alice's optimal axes for √α|00⟩ + √(1−α)|11⟩ against σz/σx:
/// θs = 0 and θt = arccos(1 − 2α), both at φ = 0.
pub fn schmidt_optimal_alice(alpha: f64) -> Result<(Direction, Direction)> {
    Ok((Direction::Z, Direction::new((1.0 - 2.0 * alpha).clamp(-1.0, 1.0).acos(), 0.0)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AliceOptimum {
    pub value: f64,
    pub setting: SteeringSetting,
    pub s_search: OptResult,
    pub t_search: OptResult,
}

/// Maximise the functional over Alice's two axes, keeping Bob's axes and
/// the outcomes of `base`.
///
/// The functional is a sum of one term per Alice axis, so each axis is
/// searched on its own.
pub fn optimize_alice(rho: &DensityMatrix, base: &SteeringSetting, spec: GridSpec) -> Result<AliceOptimum> {
    if rho.dim() != 4 {
        return Err(Error::invalid(format!("steering functional needs two qubits, got dim {}", rho.dim())));
    }
    let search = |bob: Direction| -> Result<OptResult> {
        let profile = ConditionalProfile::new(rho, ALICE, base.outcome_a, Event::new(BOB, bob, base.outcome_b))?;
        maximize_over_directions(|d| profile.eval(&d[0]).map(|p| p.value()), 1, spec)
    };
    let s_search = search(base.bob_p)?;
    let t_search = search(base.bob_q)?;
    let setting = base.with_alice(s_search.best_directions[0], t_search.best_directions[0]);
    Ok(AliceOptimum { value: s_search.best_value + t_search.best_value, setting, s_search, t_search })
}

/// Evenly spaced second observables orthogonal to `p`, for averaging the
/// functional over Bob's choice of Q.
pub fn orthogonal_ring(p: Direction, count: usize) -> Vec<Direction> {
    (0..count).map(|k| p.orthogonal(TAU * k as f64 / count as f64)).collect()
}
