//! Tolerances shared by the library, the CLI and the acceptance suite.

/// Hermiticity and unit-trace checks on density matrices.
pub const HERM_TOL: f64 = 1e-12;

/// Smallest eigenvalue allowed for a positive-semidefinite state.
pub const PSD_TOL: f64 = 1e-10;

/// Accuracy target for Hermitian eigenvalues, and the Hermiticity slack
/// accepted by [`crate::qcore::max_eigenvalue`].
pub const EIG_TOL: f64 = 1e-10;

/// Jacobi sweeps stop once the off-diagonal Frobenius norm drops below this.
pub const JACOBI_OFFDIAG: f64 = 1e-13;

/// Norm slack for pure-state amplitudes and unit directions.
pub const NORM_TOL: f64 = 1e-12;

/// Bloch vectors may exceed unit length by at most this much.
pub const BLOCH_TOL: f64 = 1e-10;

/// Marginal probability below which a conditioning event is rejected.
pub const DEGENERATE_COND: f64 = 1e-12;

/// Slack for strict "functional > bound" steerability verdicts.
pub const VERDICT_SLACK: f64 = 1e-9;

/// Bob's two observables must satisfy |p·q| below this.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Probability tables must sum to one within this.
pub const PROB_SUM_TOL: f64 = 1e-10;

/// Minimum angle separating two directions of a measurement set.
pub const DISTINCT_ANGLE: f64 = 1e-6;
