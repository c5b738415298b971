//! Spin measurements on multi-qubit states.
//!
//! Outcome bit 0 is spin up (eigenvalue +1) and bit 1 spin down, everywhere.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::qcore::{kron_all, spin_operator, ComplexMatrix, DensityMatrix};
use crate::tol;

/// A point on the Bloch sphere, the axis of the observable n·σ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
    unit: [f64; 3],
}

impl Direction {
    pub const Z: Direction = Direction { theta: 0.0, phi: 0.0, unit: [0.0, 0.0, 1.0] };
    pub const X: Direction = Direction { theta: FRAC_PI_2, phi: 0.0, unit: [1.0, 0.0, 0.0] };
    pub const Y: Direction = Direction { theta: FRAC_PI_2, phi: FRAC_PI_2, unit: [0.0, 1.0, 0.0] };

    /// `theta` must lie in [0, π]; `phi` is wrapped into [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::invalid("direction angles must be finite"));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid(format!("polar angle {theta} outside [0, π]")));
        }
        let phi = phi.rem_euclid(TAU);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(Self { theta, phi, unit: [st * cp, st * sp, ct] })
    }

    /// Direction of a non-zero real vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot take the direction of a zero vector"));
        }
        let u = [v[0] / norm, v[1] / norm, v[2] / norm];
        let theta = u[2].clamp(-1.0, 1.0).acos();
        let phi = u[1].atan2(u[0]).rem_euclid(TAU);
        Ok(Self { theta, phi, unit: u })
    }

    /// Uniform on the sphere: cos θ and φ drawn uniformly.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..TAU);
        Self::new(cos_theta.acos(), phi).expect("sampled angles are in range")
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit(&self) -> [f64; 3] {
        self.unit
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        let (a, b) = (self.unit, other.unit);
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    pub fn opposite(&self) -> Direction {
        let u = self.unit;
        Direction::from_vector([-u[0], -u[1], -u[2]]).expect("unit vector")
    }

    /// The direction perpendicular to `self` at azimuth `psi` around it.
    pub fn orthogonal(&self, psi: f64) -> Direction {
        let u = self.unit;
        // seed with the coordinate axis least aligned with u
        let seed = if u[0].abs() <= u[1].abs() && u[0].abs() <= u[2].abs() {
            [1.0, 0.0, 0.0]
        } else if u[1].abs() <= u[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let e1 = normalize(cross(u, seed));
        let e2 = cross(u, e1);
        let (s, c) = psi.sin_cos();
        Direction::from_vector([
            c * e1[0] + s * e2[0],
            c * e1[1] + s * e2[1],
            c * e1[2] + s * e2[2],
        ])
        .expect("non-zero combination of orthonormal vectors")
    }

    /// Angle to `other`, in radians.
    pub fn angle_to(&self, other: &Direction) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    /// bit 0, eigenvalue +1
    Up,
    /// bit 1, eigenvalue −1
    Down,
}

impl Outcome {
    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Outcome::Up),
            1 => Ok(Outcome::Down),
            b => Err(Error::invalid(format!("outcome bit must be 0 or 1, got {b}"))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Outcome::Up => 0,
            Outcome::Down => 1,
        }
    }

    /// (−1)^bit
    pub fn sign(self) -> f64 {
        match self {
            Outcome::Up => 1.0,
            Outcome::Down => -1.0,
        }
    }

    /// Bitwise exclusive or of the two outcome bits.
    pub fn xor(self, other: Outcome) -> Outcome {
        if self == other {
            Outcome::Up
        } else {
            Outcome::Down
        }
    }

    pub const BOTH: [Outcome; 2] = [Outcome::Up, Outcome::Down];
}

/// (I + (−1)^bit n·σ)/2
pub fn projector(d: Direction, o: Outcome) -> ComplexMatrix {
    let s = o.sign();
    let u = d.unit();
    let half = spin_operator([s * u[0], s * u[1], s * u[2]]).scale_real(0.5);
    &ComplexMatrix::identity(2).scale_real(0.5) + &half
}

/// A probability clamped to [0, 1] with the unclamped value kept alongside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Probability {
    value: f64,
    raw: f64,
}

impl Probability {
    fn from_raw(raw: f64) -> Self {
        Self { value: raw.clamp(0.0, 1.0), raw }
    }

    pub fn value(self) -> f64 {
        self.value
    }

    pub fn raw(self) -> f64 {
        self.raw
    }
}

/// Which qubits are measured, and along which axis. Unmeasured parties are
/// traced out.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementLayout {
    parties: Vec<Option<Direction>>,
}

impl MeasurementLayout {
    pub fn new(parties: Vec<Option<Direction>>) -> Result<Self> {
        if parties.iter().all(Option::is_none) {
            return Err(Error::invalid("measurement layout measures no party"));
        }
        Ok(Self { parties })
    }

    pub fn parties(&self) -> &[Option<Direction>] {
        &self.parties
    }

    pub fn measured_count(&self) -> usize {
        self.parties.iter().filter(|p| p.is_some()).count()
    }
}

/// One party's measurement and the outcome of interest.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub party: usize,
    pub direction: Direction,
    pub outcome: Outcome,
}

impl Event {
    pub fn new(party: usize, direction: Direction, outcome: Outcome) -> Self {
        Self { party, direction, outcome }
    }
}

fn qubit_count(rho: &DensityMatrix) -> Result<usize> {
    let dim = rho.dim();
    if !dim.is_power_of_two() || dim < 2 {
        return Err(Error::invalid(format!("state of dim {dim} is not a multi-qubit state")));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn event_operator(n_parties: usize, events: &[Event]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = (0..n_parties)
        .map(|p| match events.iter().find(|e| e.party == p) {
            Some(e) => projector(e.direction, e.outcome),
            None => ComplexMatrix::identity(2),
        })
        .collect();
    kron_all(&factors)
}

/// Probability that every listed event occurs.
pub fn events_prob(rho: &DensityMatrix, events: &[Event]) -> Result<Probability> {
    let n = qubit_count(rho)?;
    if events.is_empty() {
        return Err(Error::invalid("no events to evaluate"));
    }
    for (i, e) in events.iter().enumerate() {
        if e.party >= n {
            return Err(Error::invalid(format!("party {} out of range for {n} qubits", e.party)));
        }
        if events[..i].iter().any(|o| o.party == e.party) {
            return Err(Error::invalid(format!("party {} listed twice", e.party)));
        }
    }
    Ok(Probability::from_raw(rho.expectation(&event_operator(n, events))))
}

/// Joint probability of `outcomes`, one per measured party of `layout`, in
/// party order.
pub fn joint_prob(
    rho: &DensityMatrix,
    layout: &MeasurementLayout,
    outcomes: &[Outcome],
) -> Result<Probability> {
    let n = qubit_count(rho)?;
    if layout.parties.len() != n {
        return Err(Error::invalid(format!(
            "layout covers {} parties, state has {n} qubits",
            layout.parties.len()
        )));
    }
    if outcomes.len() != layout.measured_count() {
        return Err(Error::invalid(format!(
            "{} outcomes supplied for {} measured parties",
            outcomes.len(),
            layout.measured_count()
        )));
    }
    let events: Vec<Event> = layout
        .parties
        .iter()
        .enumerate()
        .filter_map(|(p, d)| d.map(|d| (p, d)))
        .zip(outcomes)
        .map(|((p, d), &o)| Event::new(p, d, o))
        .collect();
    events_prob(rho, &events)
}

pub fn marginal_prob(rho: &DensityMatrix, event: Event) -> Result<Probability> {
    events_prob(rho, &[event])
}

/// P(target | condition). Fails with [`Error::DegenerateCondition`] when the
/// conditioning event has probability at most [`tol::DEGENERATE_COND`].
pub fn conditional_prob(rho: &DensityMatrix, condition: Event, target: Event) -> Result<Probability> {
    if condition.party == target.party {
        return Err(Error::invalid("conditioning and target party must differ"));
    }
    let marginal = marginal_prob(rho, condition)?.raw();
    if marginal <= tol::DEGENERATE_COND {
        return Err(Error::DegenerateCondition { probability: marginal });
    }
    let joint = events_prob(rho, &[condition, target])?.raw();
    Ok(Probability::from_raw(joint / marginal))
}

/// P(target | outcome on `cond_party` along d), precomputed as a function of
/// the conditioning direction d.
///
/// Both the joint and the marginal are affine in the unit vector of d, so
/// seven traces against Pauli operators fix the whole profile and each
/// evaluation costs a handful of flops.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalProfile {
    sign: f64,
    joint_const: f64,
    joint_lin: [f64; 3],
    marg_lin: [f64; 3],
}

impl ConditionalProfile {
    pub fn new(
        rho: &DensityMatrix,
        cond_party: usize,
        cond_outcome: Outcome,
        target: Event,
    ) -> Result<Self> {
        let n = qubit_count(rho)?;
        if cond_party >= n || target.party >= n {
            return Err(Error::invalid("party out of range"));
        }
        if cond_party == target.party {
            return Err(Error::invalid("conditioning and target party must differ"));
        }
        let with_cond = |cond_op: ComplexMatrix, include_target: bool| {
            let factors: Vec<ComplexMatrix> = (0..n)
                .map(|p| {
                    if p == cond_party {
                        cond_op.clone()
                    } else if include_target && p == target.party {
                        projector(target.direction, target.outcome)
                    } else {
                        ComplexMatrix::identity(2)
                    }
                })
                .collect();
            rho.expectation(&kron_all(&factors))
        };
        let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let joint_const = with_cond(ComplexMatrix::identity(2), true);
        let joint_lin = axes.map(|a| with_cond(spin_operator(a), true));
        let marg_lin = axes.map(|a| with_cond(spin_operator(a), false));
        Ok(Self { sign: cond_outcome.sign(), joint_const, joint_lin, marg_lin })
    }

    pub fn joint(&self, d: &Direction) -> f64 {
        let u = d.unit();
        let lin = self.joint_lin[0] * u[0] + self.joint_lin[1] * u[1] + self.joint_lin[2] * u[2];
        0.5 * (self.joint_const + self.sign * lin)
    }

    pub fn marginal(&self, d: &Direction) -> f64 {
        let u = d.unit();
        let lin = self.marg_lin[0] * u[0] + self.marg_lin[1] * u[1] + self.marg_lin[2] * u[2];
        0.5 * (1.0 + self.sign * lin)
    }

    pub fn eval(&self, d: &Direction) -> Result<Probability> {
        let marginal = self.marginal(d);
        if marginal <= tol::DEGENERATE_COND {
            return Err(Error::DegenerateCondition { probability: marginal });
        }
        Ok(Probability::from_raw(self.joint(d) / marginal))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{pauli_y, PureState, ONE, ZERO};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn werner(p: f64) -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(vec![h.into(), ZERO, ZERO, h.into()]).unwrap().to_density();
        bell.mix(&DensityMatrix::maximally_mixed(4), p).unwrap()
    }

    fn pure_alpha(alpha: f64) -> DensityMatrix {
        PureState::new(vec![alpha.sqrt().into(), ZERO, ZERO, (1.0 - alpha).sqrt().into()])
            .unwrap()
            .to_density()
    }

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
        // G G† / Tr with G complex Ginibre-like (uniform entries suffice here)
        let g: Vec<Complex64> = (0..dim * dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let g = ComplexMatrix::from_entries(dim, g).unwrap();
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
    }

    #[test]
    fn projector_examples() {
        assert_eq!(projector(Direction::Z, Outcome::Up), ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));

        let minus = projector(Direction::X, Outcome::Down);
        let want = ComplexMatrix::from_entries(
            2,
            vec![0.5.into(), (-0.5).into(), (-0.5).into(), 0.5.into()],
        )
        .unwrap();
        assert!(minus.max_abs_diff(&want) < 1e-15);

        let y_up = projector(Direction::new(FRAC_PI_2, FRAC_PI_2).unwrap(), Outcome::Up);
        let want = (&ComplexMatrix::identity(2) + &pauli_y()).scale_real(0.5);
        assert!(y_up.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn direction_validation_and_wrapping() {
        assert!(Direction::new(-0.1, 0.0).is_err());
        assert!(Direction::new(3.2, 0.0).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());
        let d = Direction::new(1.0, -FRAC_PI_2).unwrap();
        assert!((d.phi() - 1.5 * PI).abs() < 1e-15);
        let u = d.unit();
        assert!(((u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt() - 1.0).abs() < 1e-12);
        assert!(Direction::from_vector([0.0; 3]).is_err());
        let back = Direction::from_vector(d.unit()).unwrap();
        assert!((back.theta() - d.theta()).abs() < 1e-12);
        assert!((back.phi() - d.phi()).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let d = Direction::random(&mut rng);
            let psi = rng.gen_range(0.0..TAU);
            let q = d.orthogonal(psi);
            assert!(d.dot(&q).abs() < 1e-12);
            assert!((q.angle_to(&d.orthogonal(psi + FRAC_PI_2)) - FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn outcome_bits() {
        assert_eq!(Outcome::from_bit(0).unwrap(), Outcome::Up);
        assert_eq!(Outcome::from_bit(1).unwrap().sign(), -1.0);
        assert!(Outcome::from_bit(2).is_err());
    }

    #[test]
    fn werner_joint_zz() {
        for p in [0.0, 0.3, 0.6, 1.0] {
            let layout = MeasurementLayout::new(vec![Some(Direction::Z), Some(Direction::Z)]).unwrap();
            let got = joint_prob(&werner(p), &layout, &[Outcome::Up, Outcome::Up]).unwrap();
            assert!((got.value() - (1.0 + p) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn maximally_mixed_joint_is_quarter() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = DensityMatrix::maximally_mixed(4);
        for _ in 0..20 {
            let layout = MeasurementLayout::new(vec![
                Some(Direction::random(&mut rng)),
                Some(Direction::random(&mut rng)),
            ])
            .unwrap();
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    let p = joint_prob(&rho, &layout, &[a, b]).unwrap().value();
                    assert!((p - 0.25).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn pure_half_z_then_x() {
        // ⟨0+|ψ⟩ = √α/√2, so the probability is α/2 = 1/4 at α = 1/2.
        let layout = MeasurementLayout::new(vec![Some(Direction::Z), Some(Direction::X)]).unwrap();
        let p = joint_prob(&pure_alpha(0.5), &layout, &[Outcome::Up, Outcome::Up]).unwrap();
        assert!((p.value() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn layout_errors() {
        assert!(MeasurementLayout::new(vec![None, None]).is_err());
        let layout = MeasurementLayout::new(vec![Some(Direction::Z)]).unwrap();
        assert!(joint_prob(&werner(0.5), &layout, &[Outcome::Up]).is_err());
        let layout = MeasurementLayout::new(vec![Some(Direction::Z), None]).unwrap();
        assert!(joint_prob(&werner(0.5), &layout, &[Outcome::Up, Outcome::Up]).is_err());
        assert!(joint_prob(&werner(0.5), &layout, &[Outcome::Up]).is_ok());
    }

    #[test]
    fn conditional_examples() {
        let p = 0.37;
        let c = conditional_prob(
            &werner(p),
            Event::new(0, Direction::Z, Outcome::Up),
            Event::new(1, Direction::Z, Outcome::Up),
        )
        .unwrap();
        assert!((c.value() - (1.0 + p) / 2.0).abs() < 1e-14);

        let mut v = vec![ZERO; 4];
        v[0] = ONE;
        let product = PureState::new(v).unwrap().to_density();
        let c = conditional_prob(
            &product,
            Event::new(0, Direction::Z, Outcome::Up),
            Event::new(1, Direction::X, Outcome::Up),
        )
        .unwrap();
        assert!((c.value() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn conditional_pure_alpha_matches_projector_algebra() {
        for &alpha in &[0.1, 0.3, 0.5, 0.8] {
            for &ts in &[0.0, 0.4, 1.3, 2.5] {
                let c = conditional_prob(
                    &pure_alpha(alpha),
                    Event::new(0, Direction::new(ts, 0.0).unwrap(), Outcome::Up),
                    Event::new(1, Direction::Z, Outcome::Up),
                )
                .unwrap()
                .value();
                let want = alpha * (1.0 + ts.cos()) / (1.0 + (2.0 * alpha - 1.0) * ts.cos());
                assert!((c - want).abs() < 1e-13, "alpha {alpha} theta {ts}: {c} vs {want}");
            }
        }
    }

    #[test]
    fn degenerate_conditioning_is_its_own_error() {
        let mut v = vec![ZERO; 4];
        v[0] = ONE;
        let product = PureState::new(v).unwrap().to_density();
        let err = conditional_prob(
            &product,
            Event::new(0, Direction::Z, Outcome::Down),
            Event::new(1, Direction::Z, Outcome::Up),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateCondition { .. }));

        let err = conditional_prob(
            &product,
            Event::new(0, Direction::Z, Outcome::Up),
            Event::new(0, Direction::X, Outcome::Up),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn completeness_and_no_signaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let rho = random_state(&mut rng, 4);
            let (a1, a2, b) = (
                Direction::random(&mut rng),
                Direction::random(&mut rng),
                Direction::random(&mut rng),
            );
            let mut total = 0.0;
            let mut bob_marg = [[0.0; 2]; 2];
            for (k, a) in [a1, a2].into_iter().enumerate() {
                let layout = MeasurementLayout::new(vec![Some(a), Some(b)]).unwrap();
                for oa in Outcome::BOTH {
                    for ob in Outcome::BOTH {
                        let p = joint_prob(&rho, &layout, &[oa, ob]).unwrap().raw();
                        if k == 0 {
                            total += p;
                        }
                        bob_marg[k][ob.bit() as usize] += p;
                    }
                }
            }
            assert!((total - 1.0).abs() < 1e-10);
            assert!((bob_marg[0][0] - bob_marg[1][0]).abs() < 1e-10);
            assert!((bob_marg[0][1] - bob_marg[1][1]).abs() < 1e-10);
        }
    }

    #[test]
    fn conditional_times_marginal_is_joint() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rho = random_state(&mut rng, 8);
            let cond = Event::new(2, Direction::random(&mut rng), Outcome::Down);
            let target = Event::new(1, Direction::random(&mut rng), Outcome::Up);
            let c = conditional_prob(&rho, cond, target).unwrap().raw();
            let m = marginal_prob(&rho, cond).unwrap().raw();
            let j = events_prob(&rho, &[cond, target]).unwrap().raw();
            assert!((c * m - j).abs() < 1e-10);
        }
    }

    #[test]
    fn profile_agrees_with_direct_conditional() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let rho = random_state(&mut rng, 8);
            let target = Event::new(1, Direction::random(&mut rng), Outcome::Up);
            for (party, out) in [(0, Outcome::Up), (2, Outcome::Down)] {
                let profile = ConditionalProfile::new(&rho, party, out, target).unwrap();
                let d = Direction::random(&mut rng);
                let fast = profile.eval(&d).unwrap().raw();
                let slow = conditional_prob(&rho, Event::new(party, d, out), target).unwrap().raw();
                assert!((fast - slow).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projector_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let d = Direction::random(&mut rng);
            for o in Outcome::BOTH {
                let p = projector(d, o);
                assert!((&p * &p).max_abs_diff(&p) < 1e-12);
                assert!(p.is_hermitian(1e-15));
                assert!((p.trace().re - 1.0).abs() < 1e-15);
            }
        }
    }
}
