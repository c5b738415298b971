//! Monogamy of the steering functional over a three-qubit state and the
//! resulting key-rate bounds for one-sided device-independent QKD.
//!
//! Parties are ordered A (0), B (1), C (2). Bob's axes are shared between
//! the A–B and B–C functionals:
//!
//! ```text
//! T_AB = P(b_P | a_S)  + P(b_Q | a_T)
//! T_BC = P(b_Q | c_T') + P(b_P | c_S')
//! ```
//!
//! The violation k is defined through ½·T_AB = c + k with
//! c = ½ + 1/(2√2), the single-qubit game maximum.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, SQRT_2};

use crate::error::{Error, Result};
use crate::measure::{
    conditional_prob, events_prob, marginal_prob, ConditionalProfile, Direction, Event, Outcome,
};
use crate::optimizer::{maximize_over_directions, GridSpec, OptResult};
use crate::qcore::{bloch_to_state, partial_trace, BlochVector, DensityMatrix, PureState};
use crate::steering::{fur_game_value, scenario1_bound};
use crate::tol;

const ALICE: usize = 0;
const BOB: usize = 1;
const CHARLIE: usize = 2;

/// ½ + 1/(2√2)
pub const GAME_MAX: f64 = 0.5 + 0.5 * FRAC_1_SQRT_2;

/// Largest attainable violation, reached when T_AB = 2.
pub const MAX_VIOLATION: f64 = 1.0 - GAME_MAX;

/// Published reference values at maximal violation: the key rate, and the
/// value quoted for the linear lower bound. The quoted linear value does not
/// match direct evaluation of the formula (≈ 0.4951); both are reported.
pub const REFERENCE_RATE_AT_MAX: f64 = 0.5;
pub const REFERENCE_LINEAR_AT_MAX: f64 = 0.47;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TripartiteSetting {
    pub bob_p: Direction,
    pub bob_q: Direction,
    pub alice_s: Direction,
    pub alice_t: Direction,
    pub charlie_s: Direction,
    pub charlie_t: Direction,
    pub a: Outcome,
    pub b: Outcome,
    pub c: Outcome,
}

impl TripartiteSetting {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        bob_p: Direction,
        bob_q: Direction,
        alice_s: Direction,
        alice_t: Direction,
        charlie_s: Direction,
        charlie_t: Direction,
        a: Outcome,
        b: Outcome,
        c: Outcome,
    ) -> Result<Self> {
        if bob_p.dot(&bob_q).abs() > tol::ORTHOGONALITY_TOL {
            return Err(Error::invalid("Bob's observables must be orthogonal on the Bloch sphere"));
        }
        Ok(Self { bob_p, bob_q, alice_s, alice_t, charlie_s, charlie_t, a, b, c })
    }

    /// Everyone measures σz in P-rounds and σx in Q-rounds.
    pub fn zx(a: Outcome, b: Outcome, c: Outcome) -> Self {
        let (z, x) = (Direction::Z, Direction::X);
        Self::new(z, x, z, x, z, x, a, b, c).expect("z and x are orthogonal")
    }
}

/// How a party's announced outcome enters each steering term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Conditioning {
    /// Bob's target outcome is relabelled by the announced one:
    /// P(b_P ⊕ a_S = a ⊕ b) = Σ_a' P(a') · P(b_P = a' ⊕ a ⊕ b | a_S = a').
    OutcomeAveraged,
    /// P(b_P = b | a_S = a) for the single announced outcome a.
    FixedOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TPair {
    pub t_ab: f64,
    pub t_bc: f64,
}

fn require_three_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 8 {
        return Err(Error::invalid(format!("expected a three-qubit state, got dim {}", rho.dim())));
    }
    Ok(())
}

/// One steering term between `party` (measuring `d`, announcing `o`) and Bob
/// (measuring `bob`, target `b`).
fn term(
    rho: &DensityMatrix,
    mode: Conditioning,
    party: usize,
    d: Direction,
    o: Outcome,
    bob: Direction,
    b: Outcome,
) -> Result<f64> {
    match mode {
        Conditioning::FixedOutcome => {
            conditional_prob(rho, Event::new(party, d, o), Event::new(BOB, bob, b)).map(|p| p.value())
        }
        Conditioning::OutcomeAveraged => {
            let delta = o.xor(b);
            let mut total = 0.0;
            for x in Outcome::BOTH {
                total += events_prob(rho, &[Event::new(party, d, x), Event::new(BOB, bob, x.xor(delta))])?.raw();
            }
            Ok(total.clamp(0.0, 1.0))
        }
    }
}

/// A term as a function of the non-Bob party's direction, for the optimizer.
enum TermProfile {
    Fixed(ConditionalProfile),
    Averaged([ConditionalProfile; 2]),
}

impl TermProfile {
    fn new(rho: &DensityMatrix, mode: Conditioning, party: usize, o: Outcome, bob: Direction, b: Outcome) -> Result<Self> {
        Ok(match mode {
            Conditioning::FixedOutcome => {
                TermProfile::Fixed(ConditionalProfile::new(rho, party, o, Event::new(BOB, bob, b))?)
            }
            Conditioning::OutcomeAveraged => {
                let delta = o.xor(b);
                let make = |x: Outcome| ConditionalProfile::new(rho, party, x, Event::new(BOB, bob, x.xor(delta)));
                TermProfile::Averaged([make(Outcome::Up)?, make(Outcome::Down)?])
            }
        })
    }

    fn eval(&self, d: &Direction) -> Result<f64> {
        match self {
            TermProfile::Fixed(p) => p.eval(d).map(|v| v.value()),
            TermProfile::Averaged([up, down]) => Ok((up.joint(d) + down.joint(d)).clamp(0.0, 1.0)),
        }
    }
}

/// T_AB and T_BC under the given conditioning.
pub fn t_pair(rho: &DensityMatrix, ts: &TripartiteSetting, mode: Conditioning) -> Result<TPair> {
    require_three_qubits(rho)?;
    let t_ab = term(rho, mode, ALICE, ts.alice_s, ts.a, ts.bob_p, ts.b)?
        + term(rho, mode, ALICE, ts.alice_t, ts.a, ts.bob_q, ts.b)?;
    let t_bc = term(rho, mode, CHARLIE, ts.charlie_t, ts.c, ts.bob_q, ts.b)?
        + term(rho, mode, CHARLIE, ts.charlie_s, ts.c, ts.bob_p, ts.b)?;
    Ok(TPair { t_ab, t_bc })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonogamyCheck {
    pub t_ab: f64,
    pub t_bc: f64,
    pub average: f64,
    pub satisfied: bool,
}

impl MonogamyCheck {
    fn from_pair(pair: TPair) -> Self {
        let average = 0.5 * (pair.t_ab + pair.t_bc);
        Self {
            t_ab: pair.t_ab,
            t_bc: pair.t_bc,
            average,
            satisfied: average <= scenario1_bound() + tol::VERDICT_SLACK,
        }
    }
}

/// ½(T_AB + T_BC) against 1 + 1/√2.
///
/// The bound holds for [`Conditioning::OutcomeAveraged`]. With
/// [`Conditioning::FixedOutcome`] Alice and Charlie can each post-select on
/// a rare outcome and the bound can fail (see [`post_selection_counterexample`]).
pub fn monogamy_check(rho: &DensityMatrix, ts: &TripartiteSetting, mode: Conditioning) -> Result<MonogamyCheck> {
    t_pair(rho, ts, mode).map(MonogamyCheck::from_pair)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizedMonogamy {
    pub check: MonogamyCheck,
    pub setting: TripartiteSetting,
    pub searches: [OptResult; 4],
}

/// Maximise T_AB over Alice's axes and T_BC over Charlie's, each axis on its
/// own (every term depends on exactly one of them).
pub fn optimize_monogamy(
    rho: &DensityMatrix,
    base: &TripartiteSetting,
    mode: Conditioning,
    spec: GridSpec,
) -> Result<OptimizedMonogamy> {
    require_three_qubits(rho)?;
    let search = |party: usize, out: Outcome, bob: Direction| -> Result<OptResult> {
        let profile = TermProfile::new(rho, mode, party, out, bob, base.b)?;
        maximize_over_directions(|d| profile.eval(&d[0]), 1, spec)
    };
    let a_s = search(ALICE, base.a, base.bob_p)?;
    let a_t = search(ALICE, base.a, base.bob_q)?;
    let c_s = search(CHARLIE, base.c, base.bob_p)?;
    let c_t = search(CHARLIE, base.c, base.bob_q)?;
    let setting = TripartiteSetting {
        alice_s: a_s.best_directions[0],
        alice_t: a_t.best_directions[0],
        charlie_s: c_s.best_directions[0],
        charlie_t: c_t.best_directions[0],
        ..*base
    };
    let pair = TPair {
        t_ab: a_s.best_value + a_t.best_value,
        t_bc: c_s.best_value + c_t.best_value,
    };
    Ok(OptimizedMonogamy { check: MonogamyCheck::from_pair(pair), setting, searches: [a_s, a_t, c_s, c_t] })
}

/// The two cross terms P(b_P|a_S) + P(b_Q|c_T') and P(b_Q|a_T) + P(b_P|c_S').
/// Their mean equals ½(T_AB + T_BC).
pub fn mixed_terms(rho: &DensityMatrix, ts: &TripartiteSetting, mode: Conditioning) -> Result<(f64, f64)> {
    require_three_qubits(rho)?;
    let first = term(rho, mode, ALICE, ts.alice_s, ts.a, ts.bob_p, ts.b)?
        + term(rho, mode, CHARLIE, ts.charlie_t, ts.c, ts.bob_q, ts.b)?;
    let second = term(rho, mode, ALICE, ts.alice_t, ts.a, ts.bob_q, ts.b)?
        + term(rho, mode, CHARLIE, ts.charlie_s, ts.c, ts.bob_p, ts.b)?;
    Ok((first, second))
}

/// Bob's qubit after Alice's and Charlie's measurements gave the outcomes
/// in `alice` and `charlie`.
pub fn post_measured_bob(rho: &DensityMatrix, alice: Event, charlie: Event) -> Result<DensityMatrix> {
    require_three_qubits(rho)?;
    if alice.party != ALICE || charlie.party != CHARLIE {
        return Err(Error::invalid("expected an Alice event and a Charlie event"));
    }
    let weight = events_prob(rho, &[alice, charlie])?.raw();
    if weight <= tol::DEGENERATE_COND {
        return Err(Error::DegenerateCondition { probability: weight });
    }
    let mut bloch = [0.0; 3];
    for (k, axis) in [Direction::X, Direction::Y, Direction::Z].into_iter().enumerate() {
        let up = events_prob(rho, &[alice, Event::new(BOB, axis, Outcome::Up), charlie])?.raw();
        bloch[k] = ((2.0 * up - weight) / weight).clamp(-1.0, 1.0);
    }
    let norm = bloch.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        bloch = bloch.map(|v| v / norm);
    }
    Ok(bloch_to_state(BlochVector::from_array(bloch)?))
}

/// One joint outcome (a', c') of Alice's S and Charlie's T' measurements:
/// its probability and the uncertainty-game value of Bob's post-measured
/// qubit for the targets that the first cross term assigns to it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PostMeasuredBranch {
    pub alice: Outcome,
    pub charlie: Outcome,
    pub weight: f64,
    pub game_value: f64,
}

/// Split the first cross term over the joint outcomes of Alice's S and
/// Charlie's T' measurements.
///
/// With [`Conditioning::OutcomeAveraged`] the cross term equals
/// Σ weight · 2·game_value, and every game value is bounded by
/// ½ + 1/(2√2), which proves the monogamy bound. Branches of negligible
/// weight are dropped.
pub fn post_measured_branches(rho: &DensityMatrix, ts: &TripartiteSetting) -> Result<Vec<PostMeasuredBranch>> {
    require_three_qubits(rho)?;
    let (delta_a, delta_c) = (ts.a.xor(ts.b), ts.c.xor(ts.b));
    let mut out = Vec::with_capacity(4);
    for a in Outcome::BOTH {
        for c in Outcome::BOTH {
            let (ea, ec) = (Event::new(ALICE, ts.alice_s, a), Event::new(CHARLIE, ts.charlie_t, c));
            let weight = events_prob(rho, &[ea, ec])?.raw();
            if weight <= tol::DEGENERATE_COND {
                continue;
            }
            let bob = post_measured_bob(rho, ea, ec)?;
            let on = |d: Direction, o: Outcome| marginal_prob(&bob, Event::new(0, d, o)).map(|p| p.value());
            let game_value = 0.5 * (on(ts.bob_p, a.xor(delta_a))? + on(ts.bob_q, c.xor(delta_c))?);
            out.push(PostMeasuredBranch { alice: a, charlie: c, weight, game_value });
        }
    }
    Ok(out)
}

/// Uncertainty-game value of Bob's qubit after Alice announced `a` for S and
/// Charlie announced `c` for T', both targets set to `b`.
pub fn post_measured_game_value(rho: &DensityMatrix, ts: &TripartiteSetting) -> Result<f64> {
    let bob = post_measured_bob(
        rho,
        Event::new(ALICE, ts.alice_s, ts.a),
        Event::new(CHARLIE, ts.charlie_t, ts.c),
    )?;
    fur_game_value(&bob, ts.bob_p, ts.bob_q, ts.b)
}

/// ε|0,0,1⟩ + ε|1,+,0⟩ + √(1−2ε²)|1,+,1⟩ (order A, B, C).
///
/// Alice's σz result 0 leaves Bob in |0⟩ and Charlie's σz result 0 leaves
/// him in |+⟩, so fixed-outcome terms certify both of Bob's bases at once.
pub fn post_selection_counterexample(eps: f64) -> Result<DensityMatrix> {
    if !(eps > 0.0 && 2.0 * eps * eps < 1.0) {
        return Err(Error::invalid(format!("eps = {eps} outside (0, 1/√2)")));
    }
    let h = FRAC_1_SQRT_2;
    let rest = (1.0 - 2.0 * eps * eps).sqrt();
    let mut amp = vec![num_complex::Complex64::new(0.0, 0.0); 8];
    amp[0b001] += eps;
    amp[0b100] += eps * h;
    amp[0b110] += eps * h;
    amp[0b101] += rest * h;
    amp[0b111] += rest * h;
    Ok(PureState::normalized(amp)?.to_density())
}

// ---------------------------------------------------------------------------
// Information quantities

fn entropy_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

/// I(X:Y) in bits for a 2×2 joint table `joint[x][y]`.
pub fn mutual_information(joint: [[f64; 2]; 2]) -> Result<f64> {
    let flat = [joint[0][0], joint[0][1], joint[1][0], joint[1][1]];
    if flat.iter().any(|&p| !p.is_finite() || p < -tol::PROB_SUM_TOL) {
        return Err(Error::invalid(format!("probability table has invalid entries {joint:?}")));
    }
    let total: f64 = flat.iter().sum();
    if (total - 1.0).abs() > tol::PROB_SUM_TOL {
        return Err(Error::invalid(format!("probability table sums to {total}")));
    }
    let flat = flat.map(|p| p.max(0.0));
    let hx = entropy_bits([flat[0] + flat[1], flat[2] + flat[3]]);
    let hy = entropy_bits([flat[0] + flat[2], flat[1] + flat[3]]);
    let hxy = entropy_bits(flat);
    Ok((hx + hy - hxy).max(0.0))
}

/// Joint outcome table of `party` (rows) and Bob (columns) on a two-party
/// reduced state ordered (party, Bob).
fn pair_table(pair_state: &DensityMatrix, party_dir: Direction, bob_dir: Direction, bob_first: bool) -> Result<[[f64; 2]; 2]> {
    let mut table = [[0.0; 2]; 2];
    let (party_idx, bob_idx) = if bob_first { (1, 0) } else { (0, 1) };
    for o in Outcome::BOTH {
        for b in Outcome::BOTH {
            table[o.bit() as usize][b.bit() as usize] = events_prob(
                pair_state,
                &[Event::new(party_idx, party_dir, o), Event::new(bob_idx, bob_dir, b)],
            )?
            .raw();
        }
    }
    Ok(table)
}

fn mix_tables(x: [[f64; 2]; 2], y: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[0.5 * (x[0][0] + y[0][0]), 0.5 * (x[0][1] + y[0][1])], [0.5 * (x[1][0] + y[1][0]), 0.5 * (x[1][1] + y[1][1])]]
}

/// I(B:A) from the equal mixture of the {S,P} and {T,Q} rounds.
pub fn information_ab(rho: &DensityMatrix, ts: &TripartiteSetting) -> Result<f64> {
    require_three_qubits(rho)?;
    let ab = partial_trace(rho, &[2, 2, 2], &[ALICE, BOB])?;
    mutual_information(mix_tables(
        pair_table(&ab, ts.alice_s, ts.bob_p, false)?,
        pair_table(&ab, ts.alice_t, ts.bob_q, false)?,
    ))
}

/// I(B:C) with Charlie measuring S' in P-rounds and T' in Q-rounds.
pub fn information_bc(rho: &DensityMatrix, ts: &TripartiteSetting) -> Result<f64> {
    require_three_qubits(rho)?;
    let bc = partial_trace(rho, &[2, 2, 2], &[BOB, CHARLIE])?;
    information_bc_reduced(&bc, ts.charlie_s, ts.charlie_t, ts.bob_p, ts.bob_q)
}

fn information_bc_reduced(bc: &DensityMatrix, cs: Direction, ct: Direction, p: Direction, q: Direction) -> Result<f64> {
    mutual_information(mix_tables(pair_table(bc, cs, p, true)?, pair_table(bc, ct, q, true)?))
}

/// r = I(B:A) − I(B:C) for Charlie's fixed per-basis measurements.
pub fn key_rate_exact(rho: &DensityMatrix, ts: &TripartiteSetting) -> Result<f64> {
    Ok(information_ab(rho, ts)? - information_bc(rho, ts)?)
}

/// log₂[(c+k)/(c−k)]
pub fn logratio_bound(k: f64) -> f64 {
    ((GAME_MAX + k) / (GAME_MAX - k)).log2()
}

/// 8k / ((2+√2)·ln 2)
pub fn linear_bound(k: f64) -> f64 {
    8.0 * k / ((2.0 + SQRT_2) * LN_2)
}

/// Both lower bounds on the key rate for a violation `k` ∈ [0, c).
pub fn key_rate_bounds(k: f64) -> Result<(f64, f64)> {
    if !(0.0..GAME_MAX).contains(&k) {
        return Err(Error::invalid(format!("violation k = {k} outside [0, {GAME_MAX})")));
    }
    Ok((logratio_bound(k), linear_bound(k)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyRateReport {
    pub t_ab: f64,
    pub t_bc: f64,
    pub k_violation: f64,
    pub rate_exact_bits: f64,
    pub rate_logratio_bits: f64,
    pub rate_linear_bound_bits: f64,
}

pub fn key_rate_report(rho: &DensityMatrix, ts: &TripartiteSetting, mode: Conditioning) -> Result<KeyRateReport> {
    let pair = t_pair(rho, ts, mode)?;
    let k = 0.5 * pair.t_ab - GAME_MAX;
    Ok(KeyRateReport {
        t_ab: pair.t_ab,
        t_bc: pair.t_bc,
        k_violation: k,
        rate_exact_bits: key_rate_exact(rho, ts)?,
        rate_logratio_bits: logratio_bound(k),
        rate_linear_bound_bits: linear_bound(k),
    })
}

/// Charlie's most informative fixed per-basis pair (S', T'), found by a
/// joint grid search maximising I(B:C). Not claimed to be a global optimum.
pub fn worst_case_charlie(rho: &DensityMatrix, ts: &TripartiteSetting, spec: GridSpec) -> Result<(TripartiteSetting, OptResult)> {
    require_three_qubits(rho)?;
    let bc = partial_trace(rho, &[2, 2, 2], &[BOB, CHARLIE])?;
    let res = maximize_over_directions(
        |d| information_bc_reduced(&bc, d[0], d[1], ts.bob_p, ts.bob_q),
        2,
        spec,
    )?;
    let setting = TripartiteSetting { charlie_s: res.best_directions[0], charlie_t: res.best_directions[1], ..*ts };
    Ok((setting, res))
}
