//! Numerical tolerances shared across the crate. Matrix checks scale these by
//! `max(1, ‖M‖_max)`.

/// Hermiticity check, `‖M − M†‖_max`.
pub const HERM: f64 = 1e-10;
/// Smallest eigenvalue tolerated for a PSD matrix.
pub const PSD: f64 = 1e-10;
/// Eigen-reconstruction accuracy.
pub const RECON: f64 = 1e-10;
/// Eigenvalues at or below this are treated as exact zeros.
pub const EPS_EIG: f64 = 1e-12;
/// Unit-trace check for density matrices.
pub const TRACE: f64 = 1e-10;
/// Channel completeness / trace-preservation / Choi positivity.
pub const CPTP: f64 = 1e-8;
/// Support inclusion test in the relative entropy.
pub const SUPPORT: f64 = 1e-10;
