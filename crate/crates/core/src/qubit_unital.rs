//! Unital qubit channels and the one-parameter family of inputs
//! `|√P⟩⟩ = √p|00⟩ + √(1−p)|11⟩`.
//!
//! For these inputs the extended output is `(1 ⊗ √P) D_Φ (1 ⊗ √P)` and
//!
//! ```text
//! f(p) = D((Φ⊗1)(φ_P) ‖ (R⊗1)(φ_P)) = log 2 + h(p) − H(σ_p)
//! ```
//!
//! with `h` the binary entropy. For unital `Φ`, `f` is symmetric about 1/2 and
//! concave, so its maximum sits at the maximally entangled input and
//! `H(Φ) = H^K(Φ) − log 2`.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::channels::{is_unital, shannon_entropy, Channel};
use crate::entropy::{channel_entropy, map_entropy, matrix_entropy, OptimizerConfig};
use crate::error::{Error, Result};

/// `f` is only evaluated on `(EPS_P, 1 − EPS_P)`.
pub const EPS_P: f64 = 1e-9;
pub const DEFAULT_GRID_POINTS: usize = 99;
pub const DEFAULT_H_STEP: f64 = 1e-2;
/// Largest second difference accepted as concave.
pub const TOL_CONCAVE: f64 = 1e-6;
/// Symmetry is asserted to this accuracy.
pub const TOL_SYMMETRY: f64 = 1e-9;
/// Interval width at which the golden-section search stops.
pub const GOLDEN_TOL: f64 = 1e-9;

/// A channel verified to be a unital qubit channel.
#[derive(Clone, Debug)]
pub struct UnitalQubit<'a> {
    phi: &'a Channel,
}

impl<'a> UnitalQubit<'a> {
    pub fn new(phi: &'a Channel) -> Result<Self> {
        if phi.dim_in() != 2 || phi.dim_out() != 2 {
            return Err(Error::NotQubit(phi.dim_in(), phi.dim_out()));
        }
        phi.ensure_cptp()?;
        let report = is_unital(phi);
        if !report.unital {
            return Err(Error::NotUnital(report.deviation));
        }
        Ok(Self { phi })
    }

    pub fn channel(&self) -> &Channel {
        self.phi
    }

    pub fn f(&self, p: f64) -> Result<f64> {
        if !(p > EPS_P && p < 1.0 - EPS_P) {
            return Err(Error::POutOfRange(p));
        }
        let weights = [p, 1.0 - p];
        let sigma = self.phi.choi_sandwich(&weights)?;
        Ok(LN_2 + shannon_entropy(&weights) - matrix_entropy(&sigma)?)
    }
}

/// `f(p)` for a unital qubit channel.
pub fn f_of_p(phi: &Channel, p: f64) -> Result<f64> {
    UnitalQubit::new(phi)?.f(p)
}

/// Sample points in `(0, 1)` with their `f` values.
#[derive(Clone, Debug, Serialize)]
pub struct PGrid {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

impl PGrid {
    /// `n` uniformly spaced points `k/(n+1)`, symmetric about 1/2.
    pub fn symmetric(n: usize) -> Vec<f64> {
        (1..=n).map(|k| k as f64 / (n + 1) as f64).collect()
    }

    pub fn evaluate(phi: &Channel, points: Vec<f64>) -> Result<Self> {
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("grid points must be strictly increasing".into()));
        }
        let q = UnitalQubit::new(phi)?;
        let values = points.iter().map(|&p| q.f(p)).collect::<Result<_>>()?;
        Ok(Self { points, values })
    }
}

/// `max_p |f(p) − f(1 − p)|` over the grid.
pub fn verify_symmetry(phi: &Channel, grid: &[f64]) -> Result<f64> {
    let q = UnitalQubit::new(phi)?;
    let mut worst = 0.0_f64;
    for &p in grid {
        worst = worst.max((q.f(p)? - q.f(1.0 - p)?).abs());
    }
    Ok(worst)
}

/// Largest central second difference `(f(p−h) − 2f(p) + f(p+h))/h²` over the
/// grid points whose stencil stays inside the domain.
pub fn verify_concavity(phi: &Channel, grid: &[f64], h_step: f64) -> Result<f64> {
    if !(h_step > 0.0) {
        return Err(Error::InvalidParameter(format!("step {h_step} must be positive")));
    }
    let q = UnitalQubit::new(phi)?;
    let mut worst = f64::NEG_INFINITY;
    for &p in grid {
        if p - h_step <= EPS_P || p + h_step >= 1.0 - EPS_P {
            continue;
        }
        let dd = (q.f(p - h_step)? - 2.0 * q.f(p)? + q.f(p + h_step)?) / (h_step * h_step);
        worst = worst.max(dd);
    }
    if worst == f64::NEG_INFINITY {
        return Err(Error::InvalidParameter("no grid point admits the stencil".into()));
    }
    Ok(worst)
}

/// Golden-section search for the maximizer of the unimodal `f` on `(0, 1)`.
///
/// Returns `(p_star, f(p_star))`. When the two probes tie the bracket shrinks
/// to the inner interval, which keeps it symmetric about 1/2 for flat `f`.
pub fn maximize_f(phi: &Channel) -> Result<(f64, f64)> {
    let q = UnitalQubit::new(phi)?;
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (EPS_P * 2.0, 1.0 - EPS_P * 2.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = q.f(c)?;
    let mut fd = q.f(d)?;
    while b - a > GOLDEN_TOL {
        let tie = (fc - fd).abs() <= 4.0 * f64::EPSILON * fc.abs().max(fd.abs()).max(1.0);
        if tie {
            a = c;
            b = d;
            c = b - ratio * (b - a);
            d = a + ratio * (b - a);
            fc = q.f(c)?;
            fd = q.f(d)?;
        } else if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = q.f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = q.f(d)?;
        }
    }
    let p = 0.5 * (a + b);
    Ok((p, q.f(p)?))
}

/// Both sides of `H(Φ) = H^K(Φ) − log 2`.
#[derive(Clone, Debug, Serialize)]
pub struct SaturationReport {
    /// `H(Φ)` from the general optimizer over `(λ, U)`.
    pub lhs: f64,
    /// `H^K(Φ) − log 2`.
    pub rhs: f64,
    pub delta: f64,
    /// `H(Φ)` from `log 2 − max_p f(p)`.
    pub lhs_from_p: f64,
    pub delta_from_p: f64,
    pub p_star: f64,
}

pub fn verify_theorem2(phi: &Channel, cfg: &OptimizerConfig) -> Result<SaturationReport> {
    UnitalQubit::new(phi)?;
    let rhs = map_entropy(phi)? - LN_2;
    let lhs = channel_entropy(phi, cfg)?;
    let (p_star, fmax) = maximize_f(phi)?;
    let lhs_from_p = LN_2 - fmax;
    Ok(SaturationReport {
        lhs,
        rhs,
        delta: lhs - rhs,
        lhs_from_p,
        delta_from_p: lhs_from_p - rhs,
        p_star,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::named;
    use approx::assert_abs_diff_eq;

    fn binary_entropy(p: f64) -> f64 {
        -(p * p.ln() + (1.0 - p) * (1.0 - p).ln())
    }

    #[test]
    fn identity_closed_form() {
        let id = named::identity(2).unwrap();
        for p in [0.1, 0.25, 0.5, 0.8] {
            assert_abs_diff_eq!(f_of_p(&id, p).unwrap(), LN_2 + binary_entropy(p), epsilon = 1e-12);
        }
    }

    #[test]
    fn depolarizing_is_flat() {
        let r = named::depolarizing(2).unwrap();
        for p in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(f_of_p(&r, p).unwrap(), 0.0, epsilon = 1e-12);
        }
        let (p, v) = maximize_f(&r).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn midpoint_equals_map_entropy_complement() {
        let phi = named::pauli_mixture([0.7, 0.3, 0.0, 0.0]).unwrap();
        let hk = map_entropy(&phi).unwrap();
        assert_abs_diff_eq!(f_of_p(&phi, 0.5).unwrap(), 2.0 * LN_2 - hk, epsilon = 1e-10);
        // J_Φ has spectrum (0.7, 0.3, 0, 0)
        assert_abs_diff_eq!(hk, -(0.7 * 0.7f64.ln() + 0.3 * 0.3f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn preconditions() {
        let id = named::identity(2).unwrap();
        assert!(matches!(f_of_p(&id, 0.0), Err(Error::POutOfRange(_))));
        assert!(matches!(f_of_p(&id, 1.0), Err(Error::POutOfRange(_))));
        assert!(matches!(
            f_of_p(&named::amplitude_damping(0.5).unwrap(), 0.5),
            Err(Error::NotUnital(_))
        ));
        assert!(matches!(
            f_of_p(&named::identity(3).unwrap(), 0.5),
            Err(Error::NotQubit(3, 3))
        ));
    }

    #[test]
    fn identity_second_difference() {
        // l''(p) = -1/(p(1-p)) = -4 at p = 1/2
        let id = named::identity(2).unwrap();
        let dd = verify_concavity(&id, &[0.5], 0.01).unwrap();
        assert!((dd + 4.0).abs() < 0.04, "{dd}");
        assert_abs_diff_eq!(verify_symmetry(&id, &PGrid::symmetric(99)).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn identity_maximum() {
        let (p, v) = maximize_f(&named::identity(2).unwrap()).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(v, 2.0 * LN_2, epsilon = 1e-12);
    }

    #[test]
    fn saturation_extremes() {
        let cfg = OptimizerConfig::with_restarts(2, 7);
        let id = verify_theorem2(&named::identity(2).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(id.rhs, -LN_2, epsilon = 1e-10);
        assert_abs_diff_eq!(id.lhs, -LN_2, epsilon = 1e-8);
        let r = verify_theorem2(&named::depolarizing(2).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(r.rhs, LN_2, epsilon = 1e-10);
        assert_abs_diff_eq!(r.lhs, LN_2, epsilon = 1e-10);
        assert_abs_diff_eq!(r.lhs_from_p, LN_2, epsilon = 1e-10);
    }

    #[test]
    fn grid_is_symmetric() {
        let g = PGrid::symmetric(99);
        assert_eq!(g.len(), 99);
        for (a, b) in g.iter().zip(g.iter().rev()) {
            assert_abs_diff_eq!(a + b, 1.0, epsilon = 1e-15);
        }
        assert!(PGrid::evaluate(&named::identity(2).unwrap(), vec![0.5, 0.4]).is_err());
    }
}
