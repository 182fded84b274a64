use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{devectorize, hermitian_eig, hermitian_eigenvalues, partial_trace, vectorize, ComplexMatrix, Keep};
use crate::tol;

/// A linear map `L(X_in) → L(X_out)` held by its dynamical (Choi) matrix
/// `D_Φ = (Φ ⊗ 1)(φ⁺)` on `X_out ⊗ X_in`, with a Kraus decomposition computed
/// on demand when the channel was not built from one.
#[derive(Clone, Debug)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    choi: ComplexMatrix,
    kraus: OnceLock<Vec<ComplexMatrix>>,
    verified: bool,
}

/// Outcome of [`is_cptp`] with the measured violations.
#[derive(Clone, Debug, Serialize)]
pub struct CptpReport {
    pub cptp: bool,
    pub choi_min_eigenvalue: f64,
    /// `‖Tr_out D_Φ − I‖_max`.
    pub tp_violation: f64,
    /// `‖Σ K†K − I‖_max`, when a Kraus form is held.
    pub completeness_violation: Option<f64>,
}

/// Outcome of [`is_unital`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UnitalReport {
    pub unital: bool,
    /// `‖Φ(I/d_in) − I/d_out‖_max`.
    pub deviation: f64,
}

/// Choi–Jamiołkowski state `J_Φ = D_Φ / d_in`.
#[derive(Clone, Debug)]
pub struct JamiolkowskiState {
    pub dim: usize,
    pub state: DensityMatrix,
}

fn kraus_dims(kraus: &[ComplexMatrix]) -> Result<(usize, usize)> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty Kraus list".into()))?;
    let dims = (first.rows(), first.cols());
    if let Some(k) = kraus.iter().position(|k| (k.rows(), k.cols()) != dims) {
        return Err(Error::DimensionMismatch(format!(
            "Kraus operator {k} is {}x{}, expected {}x{}",
            kraus[k].rows(),
            kraus[k].cols(),
            dims.0,
            dims.1
        )));
    }
    Ok(dims)
}

/// `D_Φ = Σ_k |K_k⟩⟩⟨⟨K_k|`.
pub fn choi_from_kraus(kraus: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (d_out, d_in) = kraus_dims(kraus)?;
    let vecs: Vec<Vec<Complex64>> = kraus.iter().map(vectorize).collect();
    let stacked = ComplexMatrix::from_fn(d_out * d_in, vecs.len(), |i, k| vecs[k][i]);
    Ok((&stacked * &stacked.adjoint()).hermitian_part())
}

fn tp_violation(choi: &ComplexMatrix, d_out: usize, d_in: usize) -> f64 {
    partial_trace(choi, (d_out, d_in), Keep::B)
        .map(|m| m.max_abs_diff(&ComplexMatrix::identity(d_in)))
        .unwrap_or(f64::INFINITY)
}

fn check_choi_shape(choi: &ComplexMatrix, d_out: usize, d_in: usize) -> Result<()> {
    let n = d_out * d_in;
    if choi.rows() != n || choi.cols() != n || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix for {d_in} -> {d_out} must be {n}x{n}, got {}x{}",
            choi.rows(),
            choi.cols()
        )));
    }
    Ok(())
}

/// Kraus operators from the spectral decomposition of `D_Φ`, largest weight
/// first. Eigenvalues at or below `EPS_EIG` are dropped.
pub fn kraus_from_choi(choi: &ComplexMatrix, dims: (usize, usize)) -> Result<Vec<ComplexMatrix>> {
    let (d_out, d_in) = dims;
    check_choi_shape(choi, d_out, d_in)?;
    let eig = hermitian_eig(choi)?;
    let min = eig.eigenvalues[0];
    if min < -tol::CPTP {
        return Err(Error::NotPsd(min));
    }
    let tp = tp_violation(choi, d_out, d_in);
    if tp > tol::CPTP {
        return Err(Error::NotTracePreserving(tp));
    }
    let n = choi.rows();
    let mut ops = Vec::new();
    for k in (0..n).rev() {
        let w = eig.eigenvalues[k];
        if w <= tol::EPS_EIG {
            break;
        }
        let col: Vec<Complex64> = (0..n).map(|i| eig.eigenvectors.get(i, k) * w.sqrt()).collect();
        ops.push(devectorize(&col, d_out, d_in)?);
    }
    Ok(ops)
}

impl Channel {
    /// Channel from Kraus operators; fails unless `Σ K†K = I` within `tol::CPTP`.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        let report = is_cptp(&ch);
        if !report.cptp {
            return Err(Error::NotCptp {
                min_eig: report.choi_min_eigenvalue,
                tp_violation: report.tp_violation,
            });
        }
        Ok(Self { verified: true, ..ch })
    }

    /// Builds the map without checking complete positivity or trace preservation.
    pub fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let (dim_out, dim_in) = kraus_dims(&kraus)?;
        let choi = choi_from_kraus(&kraus)?;
        let cell = OnceLock::new();
        let _ = cell.set(kraus);
        Ok(Self {
            dim_in,
            dim_out,
            choi,
            kraus: cell,
            verified: false,
        })
    }

    /// Channel from its dynamical matrix on `X_out ⊗ X_in`; `dims = (d_out, d_in)`.
    pub fn from_choi(choi: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let ch = Self::from_choi_unchecked(choi, dims)?;
        let report = is_cptp(&ch);
        if !report.cptp {
            return Err(Error::NotCptp {
                min_eig: report.choi_min_eigenvalue,
                tp_violation: report.tp_violation,
            });
        }
        Ok(Self { verified: true, ..ch })
    }

    pub fn from_choi_unchecked(choi: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let (dim_out, dim_in) = dims;
        check_choi_shape(&choi, dim_out, dim_in)?;
        Ok(Self {
            dim_in,
            dim_out,
            choi,
            kraus: OnceLock::new(),
            verified: false,
        })
    }

    /// For constructions that are PSD by design; only trace preservation is checked.
    pub(crate) fn from_choi_trusted(choi: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let ch = Self::from_choi_unchecked(choi, dims)?;
        let tp = tp_violation(&ch.choi, ch.dim_out, ch.dim_in);
        if tp > tol::CPTP {
            return Err(Error::NotTracePreserving(tp));
        }
        Ok(Self { verified: true, ..ch })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Dynamical matrix `D_Φ` on `X_out ⊗ X_in`.
    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn kraus(&self) -> Result<&[ComplexMatrix]> {
        if let Some(k) = self.kraus.get() {
            return Ok(k);
        }
        let k = kraus_from_choi(&self.choi, (self.dim_out, self.dim_in))?;
        Ok(self.kraus.get_or_init(|| k))
    }

    pub fn jamiolkowski(&self) -> JamiolkowskiState {
        let dim = self.dim_out * self.dim_in;
        JamiolkowskiState {
            dim,
            state: DensityMatrix::new_unchecked(self.choi.scale_real(1.0 / self.dim_in as f64)),
        }
    }

    /// `Ok` when the channel was validated at construction or passes [`is_cptp`] now.
    pub fn ensure_cptp(&self) -> Result<()> {
        if self.verified {
            return Ok(());
        }
        let report = is_cptp(self);
        if report.cptp {
            Ok(())
        } else {
            Err(Error::NotCptp {
                min_eig: report.choi_min_eigenvalue,
                tp_violation: report.tp_violation,
            })
        }
    }

    /// `Φ(X)` for an arbitrary operator, read off the Choi blocks:
    /// `Φ(X) = Σ_ij X_ij D[(·,i),(·,j)]`.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim_in || x.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {0}x{0}, operator is {1}x{2}",
                self.dim_in,
                x.rows(),
                x.cols()
            )));
        }
        let (din, dout) = (self.dim_in, self.dim_out);
        Ok(ComplexMatrix::from_fn(dout, dout, |a, b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..din {
                for j in 0..din {
                    acc += x.get(i, j) * self.choi.get(a * din + i, b * din + j);
                }
            }
            acc
        }))
    }

    /// `Φ(ρ)`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.ensure_cptp()?;
        let out = self.apply_operator(rho.matrix())?;
        Ok(DensityMatrix::new_unchecked(out.hermitian_part()))
    }

    /// `(Φ ⊗ 1)(ρ_AR)` by `Σ_k (K_k ⊗ I) ρ (K_k ⊗ I)†`; the reference
    /// dimension is `dim(ρ) / d_in`.
    pub fn apply_extended(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.ensure_cptp()?;
        let n = rho.dim();
        if n % self.dim_in != 0 {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {n} is not X_in ⊗ X_R with d_in = {}",
                self.dim_in
            )));
        }
        let d_r = n / self.dim_in;
        let id_r = ComplexMatrix::identity(d_r);
        let mut out = ComplexMatrix::zeros(self.dim_out * d_r, self.dim_out * d_r);
        for k in self.kraus()? {
            let big = crate::linalg::kron(k, &id_r);
            out = &out + &(&(&big * rho.matrix()) * &big.adjoint());
        }
        Ok(DensityMatrix::new_unchecked(out.hermitian_part()))
    }

    /// `(1 ⊗ diag(√w)) D_Φ (1 ⊗ diag(√w))`: the output `(Φ ⊗ 1)(ψ)` for the
    /// Schmidt-form input `Σ √w_i |i,i⟩`.
    pub fn choi_sandwich(&self, weights: &[f64]) -> Result<ComplexMatrix> {
        if weights.len() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for input dimension {}",
                weights.len(),
                self.dim_in
            )));
        }
        let din = self.dim_in;
        let sq: Vec<f64> = weights.iter().map(|w| w.max(0.0).sqrt()).collect();
        let n = self.choi.rows();
        Ok(ComplexMatrix::from_fn(n, n, |r, c| {
            self.choi.get(r, c) * (sq[r % din] * sq[c % din])
        }))
    }

    /// Same operator with every Kraus operator multiplied by `factor`; used to
    /// build deliberately invalid maps.
    pub fn scaled_unchecked(&self, factor: f64) -> Result<Self> {
        let ops = self.kraus()?.iter().map(|k| k.scale_real(factor)).collect();
        Self::from_kraus_unchecked(ops)
    }
}

/// Checks Choi positivity and trace preservation.
pub fn is_cptp(phi: &Channel) -> CptpReport {
    let choi_min_eigenvalue = hermitian_eigenvalues(phi.choi())
        .map(|w| w[0])
        .unwrap_or(f64::NEG_INFINITY);
    let tp_violation = tp_violation(phi.choi(), phi.dim_out, phi.dim_in);
    let completeness_violation = phi.kraus.get().map(|ops| {
        let mut acc = ComplexMatrix::zeros(phi.dim_in, phi.dim_in);
        for k in ops {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(phi.dim_in))
    });
    let cptp = choi_min_eigenvalue >= -tol::CPTP
        && tp_violation <= tol::CPTP
        && completeness_violation.is_none_or(|v| v <= tol::CPTP);
    CptpReport {
        cptp,
        choi_min_eigenvalue,
        tp_violation,
        completeness_violation,
    }
}

/// Checks `Φ(I/d_in) = I/d_out`.
pub fn is_unital(phi: &Channel) -> UnitalReport {
    let mixed = ComplexMatrix::identity(phi.dim_in).scale_real(1.0 / phi.dim_in as f64);
    let target = ComplexMatrix::identity(phi.dim_out).scale_real(1.0 / phi.dim_out as f64);
    let deviation = phi
        .apply_operator(&mixed)
        .map(|out| out.max_abs_diff(&target))
        .unwrap_or(f64::INFINITY);
    UnitalReport {
        unital: deviation <= tol::CPTP,
        deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::named;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn depolarizing_choi_is_scaled_identity() {
        let r = named::depolarizing(2).unwrap();
        assert!(r.choi().approx_eq(&ComplexMatrix::identity(4).scale_real(0.5), 1e-14));
        let j = r.jamiolkowski();
        assert_eq!(j.dim, 4);
        assert!(j.state.matrix().approx_eq(&ComplexMatrix::identity(4).scale_real(0.25), 1e-14));
    }

    #[test]
    fn identity_choi_is_maximally_entangled_projector() {
        let id = named::identity(2).unwrap();
        let phi = ComplexMatrix::outer(&[c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert!(id.choi().approx_eq(&phi, 1e-14));
    }

    #[test]
    fn kraus_choi_round_trip() {
        let phi = named::amplitude_damping(0.4).unwrap();
        let ops = kraus_from_choi(phi.choi(), (2, 2)).unwrap();
        assert_eq!(ops.len(), 2);
        let back = choi_from_kraus(&ops).unwrap();
        assert!(back.approx_eq(phi.choi(), 1e-12));
        let from_choi = Channel::from_choi(phi.choi().clone(), (2, 2)).unwrap();
        assert_eq!(from_choi.kraus().unwrap().len(), 2);
    }

    #[test]
    fn scaled_kraus_fails_completeness() {
        let phi = named::identity(2).unwrap().scaled_unchecked(1.01).unwrap();
        let report = is_cptp(&phi);
        assert!(!report.cptp);
        assert_abs_diff_eq!(report.completeness_violation.unwrap(), 0.0201, epsilon = 1e-12);
        assert_abs_diff_eq!(report.tp_violation, 0.0201, epsilon = 1e-12);
        assert!(matches!(phi.ensure_cptp(), Err(Error::NotCptp { .. })));
    }

    #[test]
    fn transpose_is_not_completely_positive() {
        // D of the transpose map is the swap operator, eigenvalue −1
        let swap = ComplexMatrix::from_fn(4, 4, |r, col| {
            let (a, i) = (r / 2, r % 2);
            let (b, j) = (col / 2, col % 2);
            if a == j && i == b {
                c(1.0)
            } else {
                c(0.0)
            }
        });
        let t = Channel::from_choi_unchecked(swap.clone(), (2, 2)).unwrap();
        let report = is_cptp(&t);
        assert!(!report.cptp);
        assert_abs_diff_eq!(report.choi_min_eigenvalue, -1.0, epsilon = 1e-12);
        assert!(matches!(kraus_from_choi(&swap, (2, 2)), Err(Error::NotPsd(_))));
    }

    #[test]
    fn apply_matches_kraus_sum() {
        let phi = named::amplitude_damping(0.3).unwrap();
        let rho = DensityMatrix::new(ComplexMatrix::from_real_rows(&[&[0.2, 0.1], &[0.1, 0.8]]).unwrap()).unwrap();
        let out = phi.apply(&rho).unwrap();
        let mut expected = ComplexMatrix::zeros(2, 2);
        for k in phi.kraus().unwrap() {
            expected = &expected + &(&(k * rho.matrix()) * &k.adjoint());
        }
        assert!(out.matrix().approx_eq(&expected, 1e-14));
        // excited population decays by gamma
        assert_abs_diff_eq!(out.matrix().get(1, 1).re, 0.8 * 0.7, epsilon = 1e-14);
    }

    #[test]
    fn extended_action_on_maximally_entangled_input_gives_jamiolkowski() {
        let phi = named::partial_depolarizing(3, 0.4).unwrap();
        let v: Vec<Complex64> = (0..9).map(|k| if k % 4 == 0 { c(1.0 / 3f64.sqrt()) } else { c(0.0) }).collect();
        let psi = DensityMatrix::pure(&v).unwrap();
        let out = phi.apply_extended(&psi).unwrap();
        assert!(out.matrix().approx_eq(phi.jamiolkowski().state.matrix(), 1e-12));
        let sandwich = phi.choi_sandwich(&[1.0 / 3.0; 3]).unwrap();
        assert!(sandwich.approx_eq(out.matrix(), 1e-12));
    }

    #[test]
    fn unitality() {
        assert!(is_unital(&named::pauli_mixture([0.1, 0.2, 0.3, 0.4]).unwrap()).unital);
        let ad = is_unital(&named::amplitude_damping(0.5).unwrap());
        assert!(!ad.unital);
        assert_abs_diff_eq!(ad.deviation, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn shape_errors() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(3);
        assert!(matches!(Channel::from_kraus(vec![a, b]), Err(Error::DimensionMismatch(_))));
        assert!(Channel::from_choi(ComplexMatrix::identity(5), (2, 2)).is_err());
        let phi = named::identity(2).unwrap();
        assert!(phi.apply_operator(&ComplexMatrix::identity(3)).is_err());
        assert!(phi.choi_sandwich(&[1.0]).is_err());
    }
}
