use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, scaled_tol, ComplexMatrix};
use crate::tol;

/// Hermitian, positive semi-definite, unit-trace operator.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let defect = mat.hermiticity_defect();
        if defect > scaled_tol(tol::HERM, &mat) {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidTrace {
                got: tr,
                expected: 1.0,
            });
        }
        let min = hermitian_eigenvalues(&mat)?[0];
        if min < -scaled_tol(tol::PSD, &mat) {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is a density matrix by construction.
    pub(crate) fn new_unchecked(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self::new_unchecked(ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    /// Projector onto `v / ‖v‖`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if v.is_empty() || norm == 0.0 {
            return Err(Error::InvalidParameter("pure state needs a nonzero vector".into()));
        }
        let u: Vec<Complex64> = v.iter().map(|z| z / norm).collect();
        Ok(Self::new_unchecked(ComplexMatrix::outer(&u)))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.mat)
    }
}

/// Schmidt coefficients of a bipartite pure state: a probability vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    lambda: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::InvalidParameter("empty Schmidt spectrum".into()));
        }
        if let Some(x) = lambda.iter().find(|x| !(**x >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "Schmidt coefficient {x} is negative"
            )));
        }
        let s: f64 = lambda.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "Schmidt coefficients sum to {s}, expected 1"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn uniform(d: usize) -> Self {
        Self {
            lambda: vec![1.0 / d as f64; d],
        }
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lambda
    }

    /// Shannon entropy in nats; entries at or below `EPS_EIG` count as zero.
    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.lambda)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lambda.iter().all(|&x| x > tol::EPS_EIG)
    }
}

/// `−Σ p log p` over entries above `EPS_EIG`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > tol::EPS_EIG)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// Distribution of Schmidt coefficients for sampled inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchmidtKind {
    /// Deterministic `(1/d, ..., 1/d)`.
    #[serde(rename = "delta")]
    Uniform,
    /// `Dir(d, 1)`: flat on the simplex.
    #[serde(rename = "dir-d-1")]
    DirichletFlat,
    /// `Dir(2, 1)` padded with zeros to length `d`.
    #[serde(rename = "dir-2-1")]
    DirichletPair,
    /// `Dir(d, 2)`: concentrated toward the centre.
    #[serde(rename = "dir-d-2")]
    DirichletCentered,
}

impl SchmidtKind {
    pub const ALL: [SchmidtKind; 4] = [
        SchmidtKind::Uniform,
        SchmidtKind::DirichletCentered,
        SchmidtKind::DirichletFlat,
        SchmidtKind::DirichletPair,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SchmidtKind::Uniform => "delta",
            SchmidtKind::DirichletFlat => "dir-d-1",
            SchmidtKind::DirichletPair => "dir-2-1",
            SchmidtKind::DirichletCentered => "dir-d-2",
        }
    }
}

impl std::str::FromStr for SchmidtKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown Schmidt distribution '{s}' (expected delta, dir-d-1, dir-2-1 or dir-d-2)"
                ))
            })
    }
}

impl std::fmt::Display for SchmidtKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

fn dirichlet<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    loop {
        let g: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let s: f64 = g.iter().sum();
        if s > 0.0 {
            return g.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Draws a Schmidt spectrum of length `d` from `kind`.
pub fn sample_schmidt<R: Rng + ?Sized>(d: usize, kind: SchmidtKind, rng: &mut R) -> Result<SchmidtSpectrum> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("Schmidt sampling needs d >= 2, got {d}")));
    }
    let lambda = match kind {
        SchmidtKind::Uniform => vec![1.0 / d as f64; d],
        SchmidtKind::DirichletFlat => dirichlet(d, 1.0, rng),
        SchmidtKind::DirichletCentered => dirichlet(d, 2.0, rng),
        SchmidtKind::DirichletPair => {
            let mut v = dirichlet(2, 1.0, rng);
            v.resize(d, 0.0);
            v
        }
    };
    Ok(SchmidtSpectrum { lambda })
}

/// Pure state `(U ⊗ V) Σ_i √λ_i |i,i⟩` as a density matrix on `d ⊗ d`.
pub fn schmidt_state(
    lambda: &SchmidtSpectrum,
    u: Option<&ComplexMatrix>,
    v: Option<&ComplexMatrix>,
) -> Result<DensityMatrix> {
    let d = lambda.len();
    for m in [u, v].into_iter().flatten() {
        if m.rows() != d || m.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "local unitary is {}x{}, Schmidt rank is {d}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.unitarity_defect();
        if defect > tol::CPTP {
            return Err(Error::NotUnitary(defect));
        }
    }
    let id = ComplexMatrix::identity(d);
    let u = u.unwrap_or(&id);
    let v = v.unwrap_or(&id);
    let sq: Vec<f64> = lambda.as_slice().iter().map(|x| x.sqrt()).collect();
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for a in 0..d {
        for b in 0..d {
            psi[a * d + b] = (0..d).map(|i| u.get(a, i) * v.get(b, i) * sq[i]).sum();
        }
    }
    Ok(DensityMatrix::new_unchecked(ComplexMatrix::outer(&psi)))
}
