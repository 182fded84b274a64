//! Standard channel constructors.

use num_complex::Complex64;
use rand::Rng;

use crate::channels::channel::Channel;
use crate::channels::random::haar_unitary;
use crate::error::{Error, Result};
use crate::linalg::{vectorize, ComplexMatrix};
use crate::tol;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(())
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

fn check_weights(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return Err(Error::InvalidParameter("empty weight vector".into()));
    }
    for &x in w {
        check_probability("weight", x)?;
    }
    let s: f64 = w.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("weights sum to {s}, expected 1")));
    }
    Ok(())
}

pub fn identity(d: usize) -> Result<Channel> {
    check_dim(d)?;
    Channel::from_kraus(vec![ComplexMatrix::identity(d)])
}

/// `ρ ↦ W ρ W†`.
pub fn unitary(w: ComplexMatrix) -> Result<Channel> {
    if !w.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "unitary must be square, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let defect = w.unitarity_defect();
    if defect > tol::CPTP {
        return Err(Error::NotUnitary(defect));
    }
    Channel::from_kraus(vec![w])
}

/// Completely depolarizing channel `R: ρ ↦ Tr(ρ) I/d`, with Kraus operators
/// `E_ij / √d`.
pub fn depolarizing(d: usize) -> Result<Channel> {
    check_dim(d)?;
    let s = 1.0 / (d as f64).sqrt();
    let ops = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            ComplexMatrix::from_fn(d, d, |a, b| if (a, b) == (i, j) { c(s, 0.0) } else { c(0.0, 0.0) })
        })
        .collect();
    Channel::from_kraus(ops)
}

/// `ρ ↦ (1 − q) ρ + q Tr(ρ) I/d`.
pub fn partial_depolarizing(d: usize, q: f64) -> Result<Channel> {
    check_dim(d)?;
    check_probability("q", q)?;
    let phi = ComplexMatrix::outer(&vectorize(&ComplexMatrix::identity(d)));
    let choi = &phi.scale_real(1.0 - q) + &ComplexMatrix::identity(d * d).scale_real(q / d as f64);
    Channel::from_choi(choi, (d, d))
}

pub fn pauli_matrices() -> [ComplexMatrix; 4] {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let m = |rows: [[Complex64; 2]; 2]| {
        ComplexMatrix::from_rows(&[rows[0].to_vec(), rows[1].to_vec()]).expect("2x2")
    };
    [
        m([[one, z], [z, one]]),
        m([[z, one], [one, z]]),
        m([[z, -i], [i, z]]),
        m([[one, z], [z, -one]]),
    ]
}

/// Unital qubit channel `ρ ↦ Σ q_i σ_i ρ σ_i` with `σ_0 = I`.
pub fn pauli_mixture(q: [f64; 4]) -> Result<Channel> {
    check_weights(&q)?;
    let ops = pauli_matrices()
        .into_iter()
        .zip(q)
        .filter(|(_, w)| *w > 0.0)
        .map(|(s, w)| s.scale_real(w.sqrt()))
        .collect();
    Channel::from_kraus(ops)
}

/// Mixture of unitary conjugations `ρ ↦ Σ w_k U_k ρ U_k†`; always unital.
pub fn unitary_mixture(unitaries: &[ComplexMatrix], weights: &[f64]) -> Result<Channel> {
    check_weights(weights)?;
    if unitaries.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} unitaries but {} weights",
            unitaries.len(),
            weights.len()
        )));
    }
    for u in unitaries {
        let defect = u.unitarity_defect();
        if defect > tol::CPTP {
            return Err(Error::NotUnitary(defect));
        }
    }
    let ops = unitaries
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(u, w)| u.scale_real(w.sqrt()))
        .collect();
    Channel::from_kraus(ops)
}

/// Mixture of `weights.len()` Haar-random unitaries on `C^d`.
pub fn random_unitary_mixture<R: Rng + ?Sized>(d: usize, weights: &[f64], rng: &mut R) -> Result<Channel> {
    check_dim(d)?;
    let us: Vec<ComplexMatrix> = weights.iter().map(|_| haar_unitary(d, rng)).collect();
    unitary_mixture(&us, weights)
}

/// Qubit amplitude damping with decay probability `gamma`; not unital for `gamma > 0`.
pub fn amplitude_damping(gamma: f64) -> Result<Channel> {
    check_probability("gamma", gamma)?;
    let k0 = ComplexMatrix::from_diag(&[1.0, (1.0 - gamma).sqrt()]);
    let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]])?;
    Channel::from_kraus(vec![k0, k1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::is_unital;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pauli_matrices_are_unitary_and_hermitian() {
        for s in pauli_matrices() {
            assert!(s.unitarity_defect() < 1e-15);
            assert!(s.hermiticity_defect() < 1e-15);
        }
    }

    #[test]
    fn pauli_mixture_endpoints() {
        let id = pauli_mixture([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(id.choi().approx_eq(identity(2).unwrap().choi(), 1e-14));
        let full = pauli_mixture([0.25; 4]).unwrap();
        assert!(full.choi().approx_eq(depolarizing(2).unwrap().choi(), 1e-14));
    }

    #[test]
    fn partial_depolarizing_interpolates() {
        let q = 0.3;
        let phi = partial_depolarizing(2, q).unwrap();
        let mix = &identity(2).unwrap().choi().scale_real(1.0 - q) + &depolarizing(2).unwrap().choi().scale_real(q);
        assert!(phi.choi().approx_eq(&mix, 1e-14));
    }

    #[test]
    fn invalid_parameters() {
        assert!(amplitude_damping(1.5).is_err());
        assert!(pauli_mixture([0.5, 0.5, 0.5, -0.5]).is_err());
        assert!(partial_depolarizing(0, 0.5).is_err());
        let not_unitary = ComplexMatrix::from_diag(&[1.0, 2.0]);
        assert!(matches!(unitary(not_unitary), Err(Error::NotUnitary(_))));
        assert!(unitary_mixture(&[ComplexMatrix::identity(2)], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn random_unitary_mixture_is_unital() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        let phi = random_unitary_mixture(3, &[0.25, 0.75], &mut rng).unwrap();
        let report = is_unital(&phi);
        assert!(report.unital);
        assert_abs_diff_eq!(report.deviation, 0.0, epsilon = 1e-12);
    }
}
