//! Comparison criteria: CHSH nonlocality and the linear n-setting steering
//! inequality (1/n)·Σ⟨A_k σ_k⟩ ≤ C_n.

use crate::error::{Error, Result};
use crate::measure::Direction;
use crate::qcore::{kron, max_eigenvalue, spin_operator, symmetric_eigenvalues, ComplexMatrix, DensityMatrix};
use crate::tol;

/// Largest measurement set accepted; the bound enumerates 2ⁿ sign patterns.
pub const MAX_SETTINGS: usize = 16;

const AXES: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::invalid(format!("expected a two-qubit state, got dim {}", rho.dim())));
    }
    Ok(())
}

/// T_ij = Tr[ρ σ_i ⊗ σ_j]
pub fn correlation_matrix(rho: &DensityMatrix) -> Result<[[f64; 3]; 3]> {
    require_two_qubits(rho)?;
    let mut t = [[0.0; 3]; 3];
    for (i, a) in AXES.iter().enumerate() {
        for (j, b) in AXES.iter().enumerate() {
            t[i][j] = rho.expectation(&kron(&spin_operator(*a), &spin_operator(*b)));
        }
    }
    Ok(t)
}

/// ⟨(a·σ) ⊗ (b·σ)⟩ = aᵀ T b
pub fn correlator(t: &[[f64; 3]; 3], a: &Direction, b: &Direction) -> f64 {
    let (a, b) = (a.unit(), b.unit());
    (0..3).map(|i| a[i] * (0..3).map(|j| t[i][j] * b[j]).sum::<f64>()).sum()
}

/// E(a0,b0) + E(a0,b1) + E(a1,b0) − E(a1,b1)
pub fn chsh_value(
    rho: &DensityMatrix,
    a0: &Direction,
    a1: &Direction,
    b0: &Direction,
    b1: &Direction,
) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    Ok(correlator(&t, a0, b0) + correlator(&t, a0, b1) + correlator(&t, a1, b0) - correlator(&t, a1, b1))
}

/// Maximal CHSH value 2√(t₁ + t₂), with t₁ ≥ t₂ the two largest eigenvalues
/// of TᵀT.
pub fn chsh_max(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let mut ttt = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            ttt[i * 3 + j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let eig = symmetric_eigenvalues(3, &ttt);
    Ok(2.0 * (eig[1] + eig[2]).max(0.0).sqrt())
}

/// Bob's n measurement axes for the linear steering inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    directions: Vec<Direction>,
}

impl MeasurementSet {
    pub fn new(directions: Vec<Direction>) -> Result<Self> {
        if directions.len() < 2 {
            return Err(Error::invalid("a measurement set needs at least two directions"));
        }
        if directions.len() > MAX_SETTINGS {
            return Err(Error::invalid(format!(
                "{} settings exceed the enumeration limit of {MAX_SETTINGS}",
                directions.len()
            )));
        }
        for (i, a) in directions.iter().enumerate() {
            for b in &directions[..i] {
                if a.angle_to(b) <= tol::DISTINCT_ANGLE {
                    return Err(Error::invalid("measurement directions must be pairwise distinct"));
                }
            }
        }
        Ok(Self { directions })
    }

    /// {σz, σx} for n = 2 and {σz, σx, σy} for n = 3.
    pub fn standard(n: usize) -> Result<Self> {
        match n {
            2 => Self::new(vec![Direction::Z, Direction::X]),
            3 => Self::new(vec![Direction::Z, Direction::X, Direction::Y]),
            _ => Err(Error::invalid(format!("no standard set with {n} settings (use 2 or 3)"))),
        }
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// C_n = max over sign patterns s ∈ {±1}ⁿ of λ_max(Σ_k s_k n̂_k·σ) / n.
pub fn saunders_bound(ms: &MeasurementSet) -> Result<f64> {
    let n = ms.len();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        let mut sum = ComplexMatrix::zeros(2);
        for (k, d) in ms.directions.iter().enumerate() {
            let sign = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
            sum = &sum + &spin_operator(d.unit().map(|c| sign * c));
        }
        best = best.max(max_eigenvalue(&sum)?);
    }
    Ok(best / n as f64)
}

/// (1/n)·Σ_k ⟨A_k σ_k⟩ with A_k Alice's ±1 result.
///
/// Alice answers each k with the spin measurement along T n̂_k, which
/// maximises ⟨A_k σ_k⟩ = |T n̂_k| over her projective spin measurements.
pub fn saunders_lhs(rho: &DensityMatrix, ms: &MeasurementSet) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let total: f64 = ms
        .directions
        .iter()
        .map(|d| {
            let u = d.unit();
            let tn: Vec<f64> = (0..3).map(|i| (0..3).map(|j| t[i][j] * u[j]).sum()).collect();
            tn.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .sum();
    Ok(total / ms.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statezoo::{pure_alpha, random_mixed, werner, SchmidtParam, WernerParam};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn chsh_closed_forms() {
        for k in 0..=100 {
            let p = k as f64 / 100.0;
            let v = chsh_max(&werner(WernerParam::new(p).unwrap())).unwrap();
            assert!((v - 2.0 * SQRT_2 * p).abs() < 1e-9, "p={p}");

            let a = p;
            let v = chsh_max(&pure_alpha(SchmidtParam::new(a).unwrap()).to_density()).unwrap();
            assert!((v - 2.0 * (1.0 + 4.0 * a * (1.0 - a)).sqrt()).abs() < 1e-9, "alpha={a}");
        }
        assert_eq!(chsh_max(&DensityMatrix::maximally_mixed(4)).unwrap(), 0.0);
    }

    #[test]
    fn chsh_standard_angles_on_bell_state() {
        let bell = werner(WernerParam::new(1.0).unwrap());
        let b0 = Direction::new(std::f64::consts::FRAC_PI_4, 0.0).unwrap();
        let b1 = Direction::new(std::f64::consts::FRAC_PI_4, std::f64::consts::PI).unwrap();
        let v = chsh_value(&bell, &Direction::Z, &Direction::X, &b0, &b1).unwrap();
        assert!((v - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn tsirelson_holds_for_random_states() {
        for seed in 0..1000 {
            let v = chsh_max(&random_mixed(4, seed)).unwrap();
            assert!(v <= 2.0 * SQRT_2 + 1e-9, "seed {seed}: {v}");
        }
    }

    #[test]
    fn saunders_examples() {
        let c2 = saunders_bound(&MeasurementSet::standard(2).unwrap()).unwrap();
        assert!((c2 - FRAC_1_SQRT_2).abs() < 1e-12);
        let c3 = saunders_bound(&MeasurementSet::standard(3).unwrap()).unwrap();
        assert!((c3 - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!(MeasurementSet::new(vec![Direction::Z, Direction::Z]).is_err());
        assert!(MeasurementSet::new(vec![Direction::Z]).is_err());
        assert!(MeasurementSet::standard(4).is_err());
    }

    #[test]
    fn saunders_lhs_werner_is_p() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let w = werner(WernerParam::new(p).unwrap());
            for n in [2, 3] {
                let v = saunders_lhs(&w, &MeasurementSet::standard(n).unwrap()).unwrap();
                assert!((v - p).abs() < 1e-12);
            }
        }
        let ms = MeasurementSet::standard(3).unwrap();
        assert_eq!(saunders_lhs(&DensityMatrix::maximally_mixed(4), &ms).unwrap(), 0.0);
    }

    #[test]
    fn saunders_bound_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let n = rng.gen_range(2..=5);
            let dirs: Vec<Direction> = (0..n).map(|_| Direction::random(&mut rng)).collect();
            let base = saunders_bound(&MeasurementSet::new(dirs.clone()).unwrap()).unwrap();

            // rotation by angle g about a random axis (Rodrigues)
            let axis = Direction::random(&mut rng).unit();
            let g: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rotate = |v: [f64; 3]| {
                let (s, c) = g.sin_cos();
                let dot = axis[0] * v[0] + axis[1] * v[1] + axis[2] * v[2];
                let cr = [
                    axis[1] * v[2] - axis[2] * v[1],
                    axis[2] * v[0] - axis[0] * v[2],
                    axis[0] * v[1] - axis[1] * v[0],
                ];
                [0, 1, 2].map(|i| v[i] * c + cr[i] * s + axis[i] * dot * (1.0 - c))
            };
            let rotated: Vec<Direction> =
                dirs.iter().map(|d| Direction::from_vector(rotate(d.unit())).unwrap()).collect();
            let after = saunders_bound(&MeasurementSet::new(rotated).unwrap()).unwrap();
            assert!((base - after).abs() < 1e-10);
        }
    }
}
