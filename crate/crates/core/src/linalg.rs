//! Dense complex linear algebra used by every other module.
//!
//! Matrices are stored by [`ComplexMatrix`], a thin immutable wrapper over a
//! `faer` matrix. Composite systems follow the usual Kronecker ordering, so an
//! index of `X_A ⊗ X_B` is `a * d_B + b`.
//!
//! Vectorization is row-major: `|X⟩⟩ = Σ_ij X_ij |i⟩⊗|j⟩`. Under this
//! convention `(A ⊗ B)|X⟩⟩ = |A X Bᵀ⟩⟩` and `|diag(√p, √(1-p))⟩⟩` is
//! `√p|00⟩ + √(1-p)|11⟩`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Dense complex matrix. Immutable once built.
#[derive(Clone)]
pub struct ComplexMatrix {
    inner: Mat<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: Mat::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: Mat::identity(n, n),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut f = f;
        Self {
            inner: Mat::from_fn(rows, cols, |i, j| f(i, j)),
        }
    }

    /// Builds a matrix from row vectors; all rows must have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if n == 0 || m == 0 {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has length {}, expected {m}",
                rows[bad].len()
            )));
        }
        Ok(Self::from_fn(n, m, |i, j| rows[i][j]))
    }

    /// Real-valued convenience constructor.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn from_faer(inner: Mat<Complex64>) -> Self {
        Self { inner }
    }

    pub fn as_faer(&self) -> MatRef<'_, Complex64> {
        self.inner.as_ref()
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_faer(self.inner.adjoint().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Self::from_faer(self.inner.transpose().to_owned())
    }

    pub fn conj(&self) -> Self {
        Self::from_faer(self.inner.conjugate().to_owned())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| c * self.get(i, j))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows().min(self.cols())).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry modulus, `‖M‖_max`.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0_f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                m = m.max(self.inner[(i, j)].norm());
            }
        }
        m
    }

    /// `‖self − other‖_max`, or infinity when the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return f64::INFINITY;
        }
        let mut m = 0.0_f64;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                m = m.max((self.inner[(i, j)] - other.inner[(i, j)]).norm());
            }
        }
        m
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    /// `‖M − M†‖_max`; infinity for non-square input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut m = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                m = m.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        m
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows(), self.cols(), |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows()))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows(),
            self.cols(),
            rhs.rows(),
            rhs.cols()
        );
        Self::from_faer(self.as_faer() * rhs.as_faer())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        ComplexMatrix::from_faer(self.as_faer() + rhs.as_faer())
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        ComplexMatrix::from_faer(self.as_faer() - rhs.as_faer())
    }
}

/// Tolerance scaled by the matrix magnitude: `base · max(1, ‖M‖_max)`.
pub fn scaled_tol(base: f64, m: &ComplexMatrix) -> f64 {
    base * m.max_abs().max(1.0)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigensystem {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns are the corresponding orthonormal eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    /// `V diag(f(w)) V†`.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fw: Vec<f64> = self.eigenvalues.iter().map(|&w| f(w)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, j) * fw[j]);
        &scaled * &v.adjoint()
    }

    /// `V diag(f(w)) V†` for complex-valued `f`.
    pub fn map_complex(&self, mut f: impl FnMut(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fw: Vec<Complex64> = self.eigenvalues.iter().map(|&w| f(w)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, j) * fw[j]);
        &scaled * &v.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|w| w)
    }
}

/// `exp(iH)` for Hermitian `H`.
pub fn unitary_from_generator(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(h)?;
    unitary_from_generator_trusted(h)
}

/// As [`unitary_from_generator`] for generators Hermitian by construction.
/// Sized for the small generators of the input search.
pub(crate) fn unitary_from_generator_trusted(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = h.rows();
    let evd = h
        .as_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure)?;
    let (u, s) = (evd.U(), evd.S().column_vector());
    let v: Vec<Complex64> = (0..n * n).map(|k| u[(k / n, k % n)]).collect();
    let phase: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, s[k].re)).collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| v[i * n + k] * phase[k] * v[j * n + k].conj()).sum()
    }))
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > scaled_tol(tol::HERM, m) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    check_hermitian(m)?;
    let evd = m
        .as_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure)?;
    let s = evd.S().column_vector();
    let eigenvalues = (0..m.rows()).map(|i| s[i].re).collect();
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_faer(evd.U().to_owned()),
    })
}

/// Ascending eigenvalues only; skips forming eigenvectors.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let w = m
        .as_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure)?;
    Ok(w)
}

/// As [`hermitian_eigenvalues`], for matrices Hermitian by construction.
pub(crate) fn hermitian_eigenvalues_trusted(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.as_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::ConvergenceFailure)
}

/// Eigenvalues of a general square matrix, unordered.
pub fn general_eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    m.as_faer()
        .eigenvalues()
        .map_err(|_| Error::ConvergenceFailure)
}

/// Scalar function applied through the spectral decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralFn {
    /// Natural log restricted to the support; the kernel maps to zero.
    Log,
    /// Natural log with eigenvalues clipped from below at `EPS_EIG`.
    LogClipped,
    Sqrt,
    /// Pseudo-inverse: reciprocal on the support, zero on the kernel.
    Inverse,
    /// Inverse square root on the support, zero on the kernel.
    InvSqrt,
}

impl SpectralFn {
    fn eval(self, w: f64) -> f64 {
        let on_support = w > tol::EPS_EIG;
        match self {
            SpectralFn::Log if on_support => w.ln(),
            SpectralFn::LogClipped => w.max(tol::EPS_EIG).ln(),
            SpectralFn::Sqrt => w.max(0.0).sqrt(),
            SpectralFn::Inverse if on_support => w.recip(),
            SpectralFn::InvSqrt if on_support => w.sqrt().recip(),
            _ => 0.0,
        }
    }
}

/// `V f(w) V†` for Hermitian positive semi-definite `m`.
pub fn spectral_function(m: &ComplexMatrix, f: SpectralFn) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -scaled_tol(tol::PSD, m) {
        return Err(Error::NotPsd(min));
    }
    Ok(eig.map(|w| f.eval(w)))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| {
        a.get(i / br, j / bc) * b.get(i % br, j % bc)
    })
}

/// Which factor of a bipartite system survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of `m` on `X_A ⊗ X_B` with `dims = (d_A, d_B)`.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    let n = da * db;
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {da}x{db} needs a {n}x{n} matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match keep {
        Keep::A => ComplexMatrix::from_fn(da, da, |a1, a2| {
            (0..db).map(|b| m.get(a1 * db + b, a2 * db + b)).sum()
        }),
        Keep::B => ComplexMatrix::from_fn(db, db, |b1, b2| {
            (0..da).map(|a| m.get(a * db + b1, a * db + b2)).sum()
        }),
    })
}

/// Row-major vectorization `Σ_ij X_ij |i⟩⊗|j⟩`.
pub fn vectorize(x: &ComplexMatrix) -> Vec<Complex64> {
    let mut v = Vec::with_capacity(x.rows() * x.cols());
    for i in 0..x.rows() {
        for j in 0..x.cols() {
            v.push(x.get(i, j));
        }
    }
    v
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &[Complex64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

pub const DEFAULT_QUADRATURE_NODES: usize = 64;

/// Gauss–Legendre rule mapped onto `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for k in 0..n.div_ceil(2) {
            // Tricomi initial guess for the k-th root on [-1, 1], then Newton.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[k] = 0.5 * (1.0 - x);
            nodes[n - 1 - k] = 0.5 * (1.0 + x);
            weights[k] = 0.5 * w;
            weights[n - 1 - k] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Panel boundaries for the log-derivative integral. The resolvent of an
/// eigenvalue `w` peaks within about `w` of `s = 1`, so panels are graded
/// geometrically toward 1 until they are no wider than the smallest
/// eigenvalue. States with all eigenvalues at least 1/2 get the single panel
/// `[0, 1]`.
fn graded_panels(w_min: f64) -> Vec<f64> {
    let levels = if w_min >= 0.5 { 0 } else { (1.0 / w_min).log2().ceil() as i32 };
    let mut edges = vec![0.0];
    edges.extend((1..=levels).map(|k| 1.0 - 0.5f64.powi(k)));
    edges.push(1.0);
    edges
}

/// Directional derivative of the matrix logarithm at `rho` along `direction`,
/// `∫₀¹ (s(ρ−1)+1)⁻¹ Δ (s(ρ−1)+1)⁻¹ ds`, by Gauss–Legendre quadrature with
/// `nodes` points per panel.
pub fn frechet_log_derivative(
    rho: &ComplexMatrix,
    direction: &ComplexMatrix,
    nodes: usize,
) -> Result<ComplexMatrix> {
    check_hermitian(direction)?;
    if direction.rows() != rho.rows() {
        return Err(Error::DimensionMismatch(format!(
            "direction is {}x{}, state is {}x{}",
            direction.rows(),
            direction.cols(),
            rho.rows(),
            rho.cols()
        )));
    }
    let eig = hermitian_eig(rho)?;
    let min = eig.eigenvalues[0];
    if min <= tol::EPS_EIG {
        return Err(Error::SingularState(min));
    }
    let n = rho.rows();
    let w = &eig.eigenvalues;
    let rule = GaussLegendre::new(nodes);

    // In the eigenbasis of rho the resolvents are diagonal, so the integral
    // acts on Δ entrywise with kernel ∫ r_i(s) r_j(s) ds.
    let mut kernel = vec![0.0; n * n];
    for panel in graded_panels(min).windows(2) {
        let (lo, width) = (panel[0], panel[1] - panel[0]);
        for (&t, &wt) in rule.nodes.iter().zip(&rule.weights) {
            let s = lo + width * t;
            let r: Vec<f64> = w.iter().map(|&wi| 1.0 / (s * (wi - 1.0) + 1.0)).collect();
            for i in 0..n {
                for j in 0..n {
                    kernel[i * n + j] += wt * width * r[i] * r[j];
                }
            }
        }
    }
    let v = &eig.eigenvectors;
    let rotated = &(&v.adjoint() * direction) * v;
    let weighted = ComplexMatrix::from_fn(n, n, |i, j| rotated.get(i, j) * kernel[i * n + j]);
    Ok((&(v * &weighted) * &v.adjoint()).hermitian_part())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diag_eigensystem_is_trivial() {
        let eig = hermitian_eig(&ComplexMatrix::from_diag(&[1.0, 2.0])).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eig.eigenvalues[1], 2.0, epsilon = 1e-14);
        let abs_v = ComplexMatrix::from_fn(2, 2, |i, j| c(eig.eigenvectors.get(i, j).norm(), 0.0));
        assert!(abs_v.approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let w = hermitian_eigenvalues(&x).unwrap();
        assert_abs_diff_eq!(w[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn spectral_functions_on_diagonals() {
        let log_id = spectral_function(&ComplexMatrix::identity(2), SpectralFn::Log).unwrap();
        assert!(log_id.approx_eq(&ComplexMatrix::zeros(2, 2), 1e-15));

        let s = spectral_function(&ComplexMatrix::from_diag(&[4.0, 9.0]), SpectralFn::Sqrt).unwrap();
        assert!(s.approx_eq(&ComplexMatrix::from_diag(&[2.0, 3.0]), 1e-14));

        let l = spectral_function(&ComplexMatrix::from_diag(&[0.5, 0.5]), SpectralFn::Log).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!(l.approx_eq(&ComplexMatrix::from_diag(&[-ln2, -ln2]), 1e-14));

        let inv = spectral_function(&ComplexMatrix::from_diag(&[0.0, 4.0]), SpectralFn::Inverse).unwrap();
        assert!(inv.approx_eq(&ComplexMatrix::from_diag(&[0.0, 0.25]), 1e-14));

        let isq = spectral_function(&ComplexMatrix::from_diag(&[0.0, 4.0]), SpectralFn::InvSqrt).unwrap();
        assert!(isq.approx_eq(&ComplexMatrix::from_diag(&[0.0, 0.5]), 1e-14));
    }

    #[test]
    fn log_support_vs_clipped() {
        let m = ComplexMatrix::from_diag(&[0.0, 1.0]);
        let support = spectral_function(&m, SpectralFn::Log).unwrap();
        assert_abs_diff_eq!(support.get(0, 0).re, 0.0);
        let clipped = spectral_function(&m, SpectralFn::LogClipped).unwrap();
        assert_abs_diff_eq!(clipped.get(0, 0).re, tol::EPS_EIG.ln(), epsilon = 1e-12);
    }

    #[test]
    fn negative_spectrum_is_not_psd() {
        let m = ComplexMatrix::from_diag(&[-0.1, 1.0]);
        assert!(matches!(spectral_function(&m, SpectralFn::Sqrt), Err(Error::NotPsd(_))));
    }

    #[test]
    fn kron_of_diagonals() {
        assert!(kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2))
            .approx_eq(&ComplexMatrix::identity(4), 0.0));
        let k = kron(&ComplexMatrix::from_diag(&[2.0, 3.0]), &ComplexMatrix::from_diag(&[5.0, 7.0]));
        assert!(k.approx_eq(&ComplexMatrix::from_diag(&[10.0, 14.0, 15.0, 21.0]), 0.0));
    }

    #[test]
    fn maximally_entangled_marginal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = ComplexMatrix::outer(&[c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let rb = partial_trace(&phi, (2, 2), Keep::B).unwrap();
        assert!(rb.approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));
        assert!(partial_trace(&phi, (3, 2), Keep::A).is_err());
    }

    #[test]
    fn vectorize_matches_schmidt_expansion() {
        let p: f64 = 0.25;
        let v = vectorize(&ComplexMatrix::from_diag(&[p.sqrt(), (1.0 - p).sqrt()]));
        let expected = [0.5, 0.0, 0.0, 0.75_f64.sqrt()];
        for (z, e) in v.iter().zip(expected) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0);
        }
        let id = vectorize(&ComplexMatrix::identity(2));
        assert_eq!(id, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(devectorize(&id, 3, 1).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = GaussLegendre::new(5);
        // exact up to degree 9
        assert_abs_diff_eq!(rule.integrate(|x| x.powi(9)), 0.1, epsilon = 1e-14);
        let rule = GaussLegendre::new(64);
        assert_abs_diff_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rule.integrate(|x| (1.0 - x / 2.0).powi(-2)), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn frechet_at_maximally_mixed() {
        let rho = ComplexMatrix::identity(2).scale_real(0.5);
        let delta = ComplexMatrix::from_diag(&[1.0, -1.0]);
        let d = frechet_log_derivative(&rho, &delta, DEFAULT_QUADRATURE_NODES).unwrap();
        assert!(d.approx_eq(&delta.scale_real(2.0), 1e-12));
    }

    #[test]
    fn frechet_commuting_case() {
        let (a, b) = (0.3, 0.7);
        let rho = ComplexMatrix::from_diag(&[a, b]);
        let delta = ComplexMatrix::from_diag(&[0.2, -0.5]);
        let d = frechet_log_derivative(&rho, &delta, DEFAULT_QUADRATURE_NODES).unwrap();
        assert!(d.approx_eq(&ComplexMatrix::from_diag(&[0.2 / a, -0.5 / b]), 1e-12));
    }

    #[test]
    fn frechet_rejects_singular_state() {
        let rho = ComplexMatrix::from_diag(&[0.0, 1.0]);
        let delta = ComplexMatrix::from_diag(&[1.0, 0.0]);
        assert!(matches!(
            frechet_log_derivative(&rho, &delta, 64),
            Err(Error::SingularState(_))
        ));
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial() {
        // elementary symmetric functions of the spectrum are the trace, the
        // sum of principal 2x2 minors and the determinant
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        let w = hermitian_eigenvalues(&m).unwrap();
        let g = |i: usize, j: usize| m.get(i, j);
        let e1 = (g(0, 0) + g(1, 1) + g(2, 2)).re;
        let minor = |i: usize, j: usize| (g(i, i) * g(j, j) - g(i, j) * g(j, i)).re;
        let e2 = minor(0, 1) + minor(0, 2) + minor(1, 2);
        let e3 = (g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1)) - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
            + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0)))
        .re;
        assert_abs_diff_eq!(w[0] + w[1] + w[2], e1, epsilon = 1e-12);
        assert_abs_diff_eq!(w[0] * w[1] + w[0] * w[2] + w[1] * w[2], e2, epsilon = 1e-12);
        assert_abs_diff_eq!(w[0] * w[1] * w[2], e3, epsilon = 1e-12);
        let eig = hermitian_eig(&m).unwrap();
        assert!(eig.reconstruct().approx_eq(&m, tol::RECON));
    }

    #[test]
    fn frechet_matches_central_difference() {
        let rho = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.1, 0.05), c(0.0, 0.0)],
            vec![c(0.1, -0.05), c(0.3, 0.0), c(0.02, 0.0)],
            vec![c(0.0, 0.0), c(0.02, 0.0), c(0.2, 0.0)],
        ])
        .unwrap();
        let delta = ComplexMatrix::from_rows(&[
            vec![c(0.1, 0.0), c(0.0, 0.2), c(0.3, 0.0)],
            vec![c(0.0, -0.2), c(-0.1, 0.0), c(0.0, 0.1)],
            vec![c(0.3, 0.0), c(0.0, -0.1), c(0.0, 0.0)],
        ])
        .unwrap();
        let h = 1e-5;
        let plus = spectral_function(&(&rho + &delta.scale_real(h)), SpectralFn::Log).unwrap();
        let minus = spectral_function(&(&rho - &delta.scale_real(h)), SpectralFn::Log).unwrap();
        let fd = (&plus - &minus).scale_real(0.5 / h);
        let d = frechet_log_derivative(&rho, &delta, DEFAULT_QUADRATURE_NODES).unwrap();
        assert!(d.max_abs_diff(&fd) / d.max_abs() < 1e-6);
    }

    #[test]
    fn frechet_resolves_small_eigenvalues() {
        let rho = ComplexMatrix::from_diag(&[1e-6, 1.0 - 1e-6]);
        let delta = ComplexMatrix::from_diag(&[1.0, 1.0]);
        let d = frechet_log_derivative(&rho, &delta, DEFAULT_QUADRATURE_NODES).unwrap();
        assert!((d.get(0, 0).re * 1e-6 - 1.0).abs() < 1e-10);
        assert_eq!(graded_panels(0.7), vec![0.0, 1.0]);
        assert_eq!(graded_panels(0.25), vec![0.0, 0.5, 0.75, 1.0]);
    }
}
