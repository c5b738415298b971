//! State families: Werner states, Schmidt-form pure states, and three-qubit
//! states for monogamy and key-rate experiments.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::qcore::{
    hermitian_eigenvalues, partial_transpose, ComplexMatrix, DensityMatrix, PureState, ONE, ZERO,
};
use crate::tol;

fn unit_interval(name: &str, v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::invalid(format!("{name} = {v} outside [0, 1]")))
    }
}

/// Werner mixing weight p.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct WernerParam(f64);

impl WernerParam {
    pub fn new(p: f64) -> Result<Self> {
        unit_interval("Werner parameter p", p).map(Self)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Schmidt weight α of √α|00⟩ + √(1−α)|11⟩.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SchmidtParam(f64);

impl SchmidtParam {
    pub fn new(alpha: f64) -> Result<Self> {
        unit_interval("Schmidt parameter alpha", alpha).map(Self)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// (|00⟩ + |11⟩)/√2
pub fn bell_phi_plus() -> PureState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    PureState::new(vec![h, ZERO, ZERO, h]).expect("normalised")
}

/// p·|Φ⁺⟩⟨Φ⁺| + (1−p)/4·I
pub fn werner(p: WernerParam) -> DensityMatrix {
    let p = p.get();
    let bell = bell_phi_plus().to_density();
    let m = &bell.matrix().scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    DensityMatrix::new(m).expect("Werner states are valid for p in [0,1]")
}

/// √α|00⟩ + √(1−α)|11⟩
pub fn pure_alpha(alpha: SchmidtParam) -> PureState {
    let a = alpha.get();
    PureState::new(vec![a.sqrt().into(), ZERO, ZERO, (1.0 - a).sqrt().into()])
        .expect("Schmidt amplitudes are normalised")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TripartiteFamily {
    /// (|000⟩ + |111⟩)/√2
    Ghz,
    /// (|001⟩ + |010⟩ + |100⟩)/√3
    W,
    /// pure_alpha(α) ⊗ |0⟩⟨0| on C.
    ProductExtension(SchmidtParam),
    /// Eight i.i.d. complex standard normal amplitudes, normalised.
    RandomPure { seed: u64 },
    /// √q|Φ⁺⟩|0⟩ + √(1−q)|Φ⁻⟩|1⟩: a purification of the rank-two
    /// Bell-diagonal pair q·Φ⁺ + (1−q)·Φ⁻ held by A and B.
    DephasedBellPurified(f64),
}

fn basis_vector(dim: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

pub fn tripartite_pure(kind: TripartiteFamily) -> Result<PureState> {
    match kind {
        TripartiteFamily::Ghz => {
            let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
            let mut v = vec![ZERO; 8];
            v[0] = h;
            v[7] = h;
            PureState::new(v)
        }
        TripartiteFamily::W => {
            let t = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
            let mut v = vec![ZERO; 8];
            v[1] = t;
            v[2] = t;
            v[4] = t;
            PureState::normalized(v)
        }
        TripartiteFamily::ProductExtension(alpha) => {
            let ab = pure_alpha(alpha);
            let c0 = basis_vector(2, 0);
            let v = ab
                .amplitudes()
                .iter()
                .flat_map(|&a| c0.iter().map(move |&c| a * c))
                .collect();
            PureState::new(v)
        }
        TripartiteFamily::RandomPure { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = (0..8)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            PureState::normalized(v)
        }
        TripartiteFamily::DephasedBellPurified(q) => {
            let q = unit_interval("dephasing weight q", q)?;
            let (a, b) = (
                Complex64::new((q / 2.0).sqrt(), 0.0),
                Complex64::new(((1.0 - q) / 2.0).sqrt(), 0.0),
            );
            // |Φ±⟩ = (|00⟩ ± |11⟩)/√2, C appended as the last qubit.
            let mut v = vec![ZERO; 8];
            v[0b000] = a;
            v[0b110] = a;
            v[0b001] = b;
            v[0b111] = -b;
            PureState::normalized(v)
        }
    }
}

pub fn tripartite_family(kind: TripartiteFamily) -> Result<DensityMatrix> {
    tripartite_pure(kind).map(|s| s.to_density())
}

/// Ginibre-ensemble mixed state of dimension `dim`.
pub fn random_mixed(dim: usize, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: Vec<Complex64> = (0..dim * dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let g = ComplexMatrix::from_entries(dim, g).expect("square");
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    let mut m = m.scale_real(1.0 / tr);
    // clear rounding asymmetry before validation
    for i in 0..dim {
        for j in i..dim {
            let z = 0.5 * (m.get(i, j) + m.get(j, i).conj());
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    DensityMatrix::new(m).expect("G G† is a valid state")
}

/// Sum of the magnitudes of the negative eigenvalues of the partial
/// transpose on B. Two-qubit states only.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::invalid(format!("negativity needs a two-qubit state, got dim {}", rho.dim())));
    }
    let pt = partial_transpose(rho, &[2, 2], 1)?;
    let eig = hermitian_eigenvalues(&pt)?;
    Ok(eig.iter().filter(|&&e| e < 0.0).map(|e| -e).sum())
}

/// PPT criterion, exact for two qubits.
pub fn is_entangled(rho: &DensityMatrix) -> Result<bool> {
    Ok(negativity(rho)? > tol::EIG_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::partial_trace;

    fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, eps: f64) {
        let d = a.max_abs_diff(b);
        assert!(d < eps, "matrices differ by {d}: {a:?} vs {b:?}");
    }

    #[test]
    fn parameter_validation() {
        assert!(WernerParam::new(-0.01).is_err());
        assert!(WernerParam::new(1.01).is_err());
        assert!(WernerParam::new(f64::NAN).is_err());
        assert!(SchmidtParam::new(1.5).is_err());
        assert!(tripartite_family(TripartiteFamily::DephasedBellPurified(2.0)).is_err());
    }

    #[test]
    fn werner_endpoints() {
        approx_eq(werner(WernerParam::new(0.0).unwrap()).matrix(), DensityMatrix::maximally_mixed(4).matrix(), 1e-16);
        approx_eq(werner(WernerParam::new(1.0).unwrap()).matrix(), bell_phi_plus().to_density().matrix(), 1e-16);
    }

    #[test]
    fn werner_half_diagonal() {
        let w = werner(WernerParam::new(0.5).unwrap());
        let diag: Vec<f64> = (0..4).map(|i| w.matrix().get(i, i).re).collect();
        for (g, want) in diag.iter().zip([0.375, 0.125, 0.125, 0.375]) {
            assert!((g - want).abs() < 1e-16);
        }
        assert!((w.matrix().get(0, 3).re - 0.25).abs() < 1e-16);
    }

    #[test]
    fn werner_marginal_is_mixed() {
        let w = werner(WernerParam::new(0.6).unwrap());
        // direct summation over B's index
        let mut oracle = ComplexMatrix::zeros(2);
        for a in 0..2 {
            for a2 in 0..2 {
                let mut s = ZERO;
                for b in 0..2 {
                    s += w.matrix().get(a * 2 + b, a2 * 2 + b);
                }
                oracle.set(a, a2, s);
            }
        }
        let ra = partial_trace(&w, &[2, 2], &[0]).unwrap();
        approx_eq(ra.matrix(), &oracle, 1e-15);
        approx_eq(ra.matrix(), DensityMatrix::maximally_mixed(2).matrix(), 1e-15);
    }

    #[test]
    fn pure_alpha_amplitudes() {
        let s = pure_alpha(SchmidtParam::new(1.0).unwrap());
        assert_eq!(s.amplitudes(), &[ONE, ZERO, ZERO, ZERO]);
        let s = pure_alpha(SchmidtParam::new(0.5).unwrap());
        for (g, w) in s.amplitudes().iter().zip(bell_phi_plus().amplitudes()) {
            assert!((g - w).norm() < 1e-16);
        }
        let s = pure_alpha(SchmidtParam::new(0.25).unwrap());
        assert_eq!(s.amplitudes()[0].re, 0.5);
        assert_eq!(s.amplitudes()[3].re, 0.75f64.sqrt());
    }

    #[test]
    fn ghz_reduces_to_classical_mixture() {
        let ghz = tripartite_family(TripartiteFamily::Ghz).unwrap();
        let ab = partial_trace(&ghz, &[2, 2, 2], &[0, 1]).unwrap();
        approx_eq(ab.matrix(), &ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]), 1e-15);
    }

    #[test]
    fn product_extension_structure() {
        let rho = tripartite_family(TripartiteFamily::ProductExtension(SchmidtParam::new(0.5).unwrap())).unwrap();
        let b = partial_trace(&rho, &[2, 2, 2], &[1]).unwrap();
        approx_eq(b.matrix(), DensityMatrix::maximally_mixed(2).matrix(), 1e-15);
        let c = partial_trace(&rho, &[2, 2, 2], &[2]).unwrap();
        approx_eq(c.matrix(), &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]), 1e-15);
        let bc = partial_trace(&rho, &[2, 2, 2], &[1, 2]).unwrap();
        approx_eq(bc.matrix(), b.tensor(&c).matrix(), 1e-15);
    }

    #[test]
    fn dephased_purification_reduces_to_bell_mixture() {
        let q = 0.8;
        let rho = tripartite_family(TripartiteFamily::DephasedBellPurified(q)).unwrap();
        let ab = partial_trace(&rho, &[2, 2, 2], &[0, 1]).unwrap();
        let mut want = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        want.set(0, 3, Complex64::new(q - 0.5, 0.0));
        want.set(3, 0, Complex64::new(q - 0.5, 0.0));
        approx_eq(ab.matrix(), &want, 1e-15);
    }

    #[test]
    fn random_pure_is_reproducible() {
        let a = tripartite_family(TripartiteFamily::RandomPure { seed: 7 }).unwrap();
        let b = tripartite_family(TripartiteFamily::RandomPure { seed: 7 }).unwrap();
        let c = tripartite_family(TripartiteFamily::RandomPure { seed: 8 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn factories_satisfy_density_invariants() {
        let mut states = vec![
            werner(WernerParam::new(0.3).unwrap()),
            pure_alpha(SchmidtParam::new(0.2).unwrap()).to_density(),
            random_mixed(4, 1),
            random_mixed(8, 2),
        ];
        for kind in [
            TripartiteFamily::Ghz,
            TripartiteFamily::W,
            TripartiteFamily::ProductExtension(SchmidtParam::new(0.3).unwrap()),
            TripartiteFamily::RandomPure { seed: 99 },
            TripartiteFamily::DephasedBellPurified(0.9),
        ] {
            states.push(tripartite_family(kind).unwrap());
        }
        for s in states {
            let m = s.matrix();
            assert!(m.hermiticity_defect() <= tol::HERM_TOL);
            assert!((m.trace().re - 1.0).abs() <= tol::HERM_TOL && m.trace().im.abs() <= tol::HERM_TOL);
            assert!(s.eigenvalues()[0] >= -tol::PSD_TOL);
        }
    }

    #[test]
    fn werner_negativity_closed_form() {
        // PT spectrum is {(1+p)/4 ×3, (1−3p)/4}
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let n = negativity(&werner(WernerParam::new(p).unwrap())).unwrap();
            let want = ((3.0 * p - 1.0) / 4.0).max(0.0);
            assert!((n - want).abs() < 1e-12, "p={p}: {n} vs {want}");
        }
        assert!(negativity(&DensityMatrix::maximally_mixed(8)).is_err());
    }
}
