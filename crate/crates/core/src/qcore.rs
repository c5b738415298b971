//! Dense complex linear algebra and qubit-state primitives.
//!
//! Subsystems are always ordered A ⊗ B (⊗ C) with A leftmost, so the
//! computational basis index of |a b c⟩ is `a·4 + b·2 + c`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::invalid(format!(
                "{} entries cannot form a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// |v⟩⟨v|
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Complex64 {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.entries[i * n + j] * other.entries[j * n + i];
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max |M[i][j] − conj(M[j][i])|
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_defect() <= tolerance
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix { dim: 2, entries: vec![ZERO, ONE, ONE, ZERO] }
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix { dim: 2, entries: vec![ZERO, -I, I, ZERO] }
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix { dim: 2, entries: vec![ONE, ZERO, ZERO, -ONE] }
}

/// n·σ for a real 3-vector `n` (not necessarily unit).
pub fn spin_operator(n: [f64; 3]) -> ComplexMatrix {
    let [x, y, z] = n;
    ComplexMatrix {
        dim: 2,
        entries: vec![
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        ],
    }
}

/// Kronecker product; `a` is the left (more significant) factor.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim, b.dim);
    let dim = da * db;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.entries[(i * db + k) * dim + j * db + l] = aij * b.get(k, l);
                }
            }
        }
    }
    out
}

/// Kronecker product of a non-empty list of factors, left to right.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = iter.next().expect("kron_all needs at least one factor").clone();
    iter.fold(first, |acc, f| kron(&acc, f))
}

// ---------------------------------------------------------------------------
// Eigenvalues

/// Eigenvalues of a real symmetric `n×n` matrix (row-major) by cyclic Jacobi
/// rotations, ascending.
pub fn symmetric_eigenvalues(n: usize, matrix: &[f64]) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n, "matrix must be n*n");
    let mut a = matrix.to_vec();
    let scale = a.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
        }
        if off.sqrt() < tol::JACOBI_OFFDIAG * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// 2×2 uses the closed form; larger matrices go through the real symmetric
/// embedding `[[Re H, −Im H], [Im H, Re H]]`, whose spectrum is that of `H`
/// with every eigenvalue doubled.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if !h.is_hermitian(tol::EIG_TOL) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {:e})",
            h.hermiticity_defect()
        )));
    }
    let n = h.dim;
    if n == 1 {
        return Ok(vec![h.get(0, 0).re]);
    }
    if n == 2 {
        let a = h.get(0, 0).re;
        let d = h.get(1, 1).re;
        let b = h.get(0, 1);
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return Ok(vec![mean - radius, mean + radius]);
    }

    let m = 2 * n;
    let mut real = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // symmetrise so the embedding is exactly symmetric
            let z = 0.5 * (h.get(i, j) + h.get(j, i).conj());
            real[i * m + j] = z.re;
            real[(i + n) * m + (j + n)] = z.re;
            real[i * m + (j + n)] = -z.im;
            real[(i + n) * m + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(m, &real);
    Ok(doubled.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    hermitian_eigenvalues(h).map(|e| *e.last().expect("non-empty spectrum"))
}

// ---------------------------------------------------------------------------
// States

/// Trace-one positive-semidefinite Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > tol::HERM_TOL {
            return Err(Error::invalid(format!("density matrix not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol::HERM_TOL || tr.im.abs() > tol::HERM_TOL {
            return Err(Error::invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix)?[0];
        if min_eig < -tol::PSD_TOL {
            return Err(Error::invalid(format!(
                "density matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// `I/dim`
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density matrices are Hermitian")
    }

    /// Re Tr(ρ O)
    pub fn expectation(&self, operator: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(operator).re
    }

    /// ρ_A ⊗ ρ_B
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix { matrix: kron(&self.matrix, &other.matrix) }
    }

    /// Convex combination `weight·self + (1−weight)·other`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::invalid(format!("mixing weight {weight} outside [0,1]")));
        }
        if self.dim() != other.dim() {
            return Err(Error::invalid("cannot mix states of different dimension"));
        }
        DensityMatrix::new(&self.matrix.scale_real(weight) + &other.matrix.scale_real(1.0 - weight))
    }
}

/// Normalised state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::invalid("pure state needs at least one amplitude"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::NORM_TOL {
            return Err(Error::invalid(format!("state vector has norm {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Normalises `amplitudes` first; fails only on a zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::invalid("cannot normalise a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { matrix: ComplexMatrix::outer(&self.amplitudes) }
    }
}

/// Real 3-vector `n` with ρ = (I + n·σ)/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self { x, y, z };
        let norm = v.norm();
        if !norm.is_finite() || norm > 1.0 + tol::BLOCH_TOL {
            return Err(Error::invalid(format!("Bloch vector norm {norm} exceeds 1")));
        }
        Ok(v)
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, v: [f64; 3]) -> f64 {
        self.x * v[0] + self.y * v[1] + self.z * v[2]
    }
}

pub fn bloch_of(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::invalid(format!("Bloch vector needs a qubit, got dim {}", rho.dim())));
    }
    let m = rho.matrix();
    let off = m.get(0, 1);
    BlochVector::new(2.0 * off.re, -2.0 * off.im, m.get(0, 0).re - m.get(1, 1).re)
}

pub fn bloch_to_state(n: BlochVector) -> DensityMatrix {
    let matrix = (&ComplexMatrix::identity(2) + &spin_operator(n.to_array())).scale_real(0.5);
    DensityMatrix { matrix }
}

// ---------------------------------------------------------------------------
// Subsystem operations

fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::invalid("subsystem dimensions must be positive"));
    }
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::invalid(format!(
            "subsystem dims {dims:?} multiply to {product}, state has dim {total}"
        )));
    }
    Ok(())
}

/// Mixed-radix digits of `index`, most significant (party 0) first.
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

fn compose(digits: &[usize], dims: &[usize], parties: &[usize]) -> usize {
    parties.iter().fold(0, |acc, &p| acc * dims[p] + digits[p])
}

/// Reduced state on the parties listed in `keep`, traced over the rest.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    check_dims(rho.dim(), dims)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() || kept.iter().any(|&p| p >= dims.len()) {
        return Err(Error::invalid(format!("invalid subsystem selection {keep:?}")));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !kept.contains(p)).collect();

    let out_dim: usize = kept.iter().map(|&p| dims[p]).product();
    let mut out = ComplexMatrix::zeros(out_dim);
    let n = rho.dim();
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            if traced.iter().all(|&p| di[p] == dj[p]) {
                let (r, c) = (compose(&di, dims, &kept), compose(&dj, dims, &kept));
                let v = out.get(r, c) + rho.matrix().get(i, j);
                out.set(r, c, v);
            }
        }
    }
    DensityMatrix::new(out)
}

/// Transpose on the indices of party `party`. The result is Hermitian with
/// unit trace but may have negative eigenvalues, so it is returned as a raw
/// matrix.
pub fn partial_transpose(rho: &DensityMatrix, dims: &[usize], party: usize) -> Result<ComplexMatrix> {
    check_dims(rho.dim(), dims)?;
    if party >= dims.len() {
        return Err(Error::invalid(format!("party {party} out of range")));
    }
    let n = rho.dim();
    let all: Vec<usize> = (0..dims.len()).collect();
    let mut out = ComplexMatrix::zeros(n);
    let mut di = vec![0; dims.len()];
    let mut dj = vec![0; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            std::mem::swap(&mut di[party], &mut dj[party]);
            let (r, c) = (compose(&di, dims, &all), compose(&dj, dims, &all));
            std::mem::swap(&mut di[party], &mut dj[party]);
            out.set(r, c, rho.matrix().get(i, j));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> DensityMatrix {
        PureState::new(vec![c(FRAC_1_SQRT_2), ZERO, ZERO, c(FRAC_1_SQRT_2)])
            .unwrap()
            .to_density()
    }

    #[test]
    fn kron_identities() {
        let id4 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(id4, ComplexMatrix::identity(4));

        let zz = kron(&pauli_z(), &pauli_z());
        assert_eq!(zz, ComplexMatrix::from_real_diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_x_z_entries() {
        // σx ⊗ σz = [[0, σz], [σz, 0]]
        let m = kron(&pauli_x(), &pauli_z());
        assert_eq!(m.get(0, 2), ONE);
        assert_eq!(m.get(1, 3), -ONE);
        assert_eq!(m.get(2, 0), ONE);
        assert_eq!(m.get(3, 1), -ONE);
        assert_eq!(m.get(0, 0), ZERO);
        assert_eq!(m.get(0, 3), ZERO);
    }

    #[test]
    fn partial_trace_of_bell_is_mixed() {
        let reduced = partial_trace(&bell(), &[2, 2], &[0]).unwrap();
        assert!(reduced.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut v = vec![ZERO; 4];
        v[0] = ONE;
        let rho = PureState::new(v).unwrap().to_density();
        let b = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert_eq!(b.matrix(), &ComplexMatrix::from_real_diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn partial_trace_keeps_requested_order_of_factors() {
        // ρ_A ⊗ ρ_B with distinguishable factors; keeping B must return ρ_B.
        let a = bloch_to_state(BlochVector::new(0.3, 0.0, 0.2).unwrap());
        let b = bloch_to_state(BlochVector::new(0.0, -0.4, 0.5).unwrap());
        let ab = a.tensor(&b);
        let rb = partial_trace(&ab, &[2, 2], &[1]).unwrap();
        let ra = partial_trace(&ab, &[2, 2], &[0]).unwrap();
        assert!(rb.matrix().max_abs_diff(b.matrix()) < 1e-15);
        assert!(ra.matrix().max_abs_diff(a.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(partial_trace(&bell(), &[2, 3], &[0]).is_err());
        assert!(partial_trace(&bell(), &[2, 2], &[]).is_err());
        assert!(partial_trace(&bell(), &[2, 2], &[2]).is_err());
        assert!(partial_trace(&bell(), &[2, 2], &[0, 0]).is_err());
    }

    #[test]
    fn bloch_examples() {
        let up = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        assert_eq!(bloch_of(&up).unwrap().to_array(), [0.0, 0.0, 1.0]);
        assert_eq!(bloch_of(&DensityMatrix::maximally_mixed(2)).unwrap().to_array(), [0.0; 3]);

        // top eigenvector of (σx+σz)/√2: (cos π/8, sin π/8)
        let (c8, s8) = ((std::f64::consts::PI / 8.0).cos(), (std::f64::consts::PI / 8.0).sin());
        let eig = PureState::new(vec![c(c8), c(s8)]).unwrap().to_density();
        let n = bloch_of(&eig).unwrap().to_array();
        for (got, want) in n.iter().zip([FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]) {
            assert!((got - want).abs() < 1e-15, "{n:?}");
        }
    }

    #[test]
    fn bloch_rejects_long_vectors() {
        assert!(BlochVector::new(1.0, 1.0, 0.0).is_err());
        assert!(BlochVector::new(0.0, 0.0, 1.0 + 5e-11).is_ok());
        assert!(bloch_of(&bell()).is_err());
    }

    #[test]
    fn max_eigenvalue_examples() {
        assert!((max_eigenvalue(&pauli_z()).unwrap() - 1.0).abs() < 1e-15);
        let zx = &pauli_z() + &pauli_x();
        assert!((max_eigenvalue(&zx).unwrap() - SQRT_2).abs() < 1e-14);
        let xyz = &(&pauli_x() + &pauli_y()) + &pauli_z();
        assert!((max_eigenvalue(&xyz).unwrap() - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn max_eigenvalue_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, ONE);
        assert!(matches!(max_eigenvalue(&m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn jacobi_matches_known_spectra() {
        // σx⊗σx + σy⊗σy + σz⊗σz has spectrum {−3, 1, 1, 1}
        let h = &(&kron(&pauli_x(), &pauli_x()) + &kron(&pauli_y(), &pauli_y()))
            + &kron(&pauli_z(), &pauli_z());
        let e = hermitian_eigenvalues(&h).unwrap();
        let want = [-3.0, 1.0, 1.0, 1.0];
        for (g, w) in e.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{e:?}");
        }

        let sym = [2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0];
        let e = symmetric_eigenvalues(3, &sym);
        for (g, w) in e.iter().zip([1.0, 3.0, 5.0]) {
            assert!((g - w).abs() < 1e-13, "{e:?}");
        }
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.2, -0.2])).is_err());
        let mut m = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        m.set(0, 1, I * 0.1);
        assert!(DensityMatrix::new(m).is_err());
        assert!(PureState::new(vec![ONE, ONE]).is_err());
        assert!(PureState::normalized(vec![ONE, ONE]).is_ok());
    }

    #[test]
    fn partial_transpose_of_bell_has_negative_eigenvalue() {
        let pt = partial_transpose(&bell(), &[2, 2], 1).unwrap();
        let e = hermitian_eigenvalues(&pt).unwrap();
        assert!((e[0] + 0.5).abs() < 1e-12);
        assert!((pt.trace().re - 1.0).abs() < 1e-15);
    }
}
