//! Von Neumann and relative entropies, the map entropy `H^K`, and the
//! optimized channel entropy `H`.
//!
//! For a pure input `ψ = (U ⊗ 1) Σ √λ_i |i,i⟩` the reference output is
//! `(R ⊗ 1)(ψ) = I/d_out ⊗ diag(λ)`, and
//!
//! ```text
//! D((Φ⊗1)ψ ‖ (R⊗1)ψ) = log d_out + H(λ) − H(σ),   σ = (Φ_U ⊗ 1)(Σ √λ_i √λ_j |ii⟩⟨jj|)
//! ```
//!
//! with `Φ_U(ρ) = Φ(U ρ U†)`. The optimizer maximizes this reduced form, which
//! never needs a logarithm of a singular operator.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{haar_unitary, schmidt_state, shannon_entropy, Channel, DensityMatrix, SchmidtSpectrum};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigenvalues, hermitian_eigenvalues_trusted, kron, partial_trace, unitary_from_generator_trusted, ComplexMatrix, Keep};
use crate::rng;
use crate::tol;

/// Quantum relative entropy, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum RelEntropy {
    Finite(f64),
    Infinite,
}

impl RelEntropy {
    pub fn finite(self) -> Option<f64> {
        match self {
            RelEntropy::Finite(x) => Some(x),
            RelEntropy::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, RelEntropy::Infinite)
    }
}

/// `H(ρ) = −Tr ρ log ρ` in nats.
pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_entropy(&rho.eigenvalues()?))
}

/// Entropy of a Hermitian matrix's spectrum (used for intermediate states
/// that are density matrices by construction).
pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    Ok(shannon_entropy(&hermitian_eigenvalues(m)?))
}

/// `D(ρ‖σ) = Tr ρ (log ρ − log σ)`; infinite unless `supp ρ ⊆ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<RelEntropy> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of states with dimensions {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let n = rho.dim();
    let eig = hermitian_eig(sigma.matrix())?;
    let v = &eig.eigenvectors;
    // ρ in σ's eigenbasis: diagonal entries are ⟨v_k|ρ|v_k⟩, the kernel block
    // measures the weight of ρ outside supp σ.
    let rotated = &(&v.adjoint() * rho.matrix()) * v;
    let kernel: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] <= tol::EPS_EIG).collect();
    let leak = kernel
        .iter()
        .flat_map(|&a| kernel.iter().map(move |&b| (a, b)))
        .map(|(a, b)| rotated.get(a, b).norm())
        .fold(0.0, f64::max);
    if leak > tol::SUPPORT {
        return Ok(RelEntropy::Infinite);
    }
    let neg_entropy = -von_neumann(rho)?;
    let cross: f64 = (0..n)
        .filter(|&k| eig.eigenvalues[k] > tol::EPS_EIG)
        .map(|k| rotated.get(k, k).re * eig.eigenvalues[k].ln())
        .sum();
    Ok(RelEntropy::Finite(neg_entropy - cross))
}

/// `H^K(Φ) = H(J_Φ)`.
pub fn map_entropy(phi: &Channel) -> Result<f64> {
    phi.ensure_cptp()?;
    von_neumann(&phi.jamiolkowski().state)
}

fn check_local_unitary(phi: &Channel, u: &ComplexMatrix) -> Result<()> {
    if u.rows() != phi.dim_in() || u.cols() != phi.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "input unitary is {}x{}, channel input dimension is {}",
            u.rows(),
            u.cols(),
            phi.dim_in()
        )));
    }
    let defect = u.unitarity_defect();
    if defect > tol::CPTP {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

fn check_spectrum(phi: &Channel, lambda: &SchmidtSpectrum) -> Result<()> {
    if lambda.len() != phi.dim_in() {
        return Err(Error::DimensionMismatch(format!(
            "Schmidt spectrum of length {} for input dimension {}",
            lambda.len(),
            phi.dim_in()
        )));
    }
    Ok(())
}

/// The reduced objective for one channel, with the Choi entries copied out
/// once so that repeated evaluations avoid per-entry indexing.
struct ReducedObjective {
    d_in: usize,
    d_out: usize,
    /// Row-major `D_Φ`.
    choi: Vec<Complex64>,
}

impl ReducedObjective {
    fn new(phi: &Channel) -> Self {
        let n = phi.choi().rows();
        Self {
            d_in: phi.dim_in(),
            d_out: phi.dim_out(),
            choi: (0..n * n).map(|k| phi.choi().get(k / n, k % n)).collect(),
        }
    }

    /// `σ = (Φ_U ⊗ 1)(ψ_λ) = (1 ⊗ √Λ Uᵀ) D_Φ (1 ⊗ Ū √Λ)`, built block by
    /// block: block `(a, b)` is `m D_ab m†` with `m = √Λ Uᵀ`.
    fn extended_output(&self, lambda: &[f64], u: &ComplexMatrix) -> ComplexMatrix {
        let (d, d_out) = (self.d_in, self.d_out);
        let n = d_out * d;
        let m: Vec<Complex64> = (0..d * d)
            .map(|k| u.get(k % d, k / d) * lambda[k / d].max(0.0).sqrt())
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        let mut tmp = vec![Complex64::new(0.0, 0.0); d * d];
        for a in 0..d_out {
            for b in a..d_out {
                for k in 0..d {
                    let row = &self.choi[(a * d + k) * n + b * d..(a * d + k) * n + b * d + d];
                    for j in 0..d {
                        let mrow = &m[j * d..j * d + d];
                        tmp[k * d + j] = row.iter().zip(mrow).map(|(x, y)| x * y.conj()).sum();
                    }
                }
                for i in 0..d {
                    for j in 0..d {
                        let acc: Complex64 = (0..d).map(|k| m[i * d + k] * tmp[k * d + j]).sum();
                        out[(a * d + i) * n + b * d + j] = acc;
                        out[(b * d + j) * n + a * d + i] = acc.conj();
                    }
                }
            }
        }
        for r in 0..n {
            out[r * n + r].im = 0.0;
        }
        ComplexMatrix::from_fn(n, n, |r, c| out[r * n + c])
    }

    fn eval(&self, lambda: &[f64], u: &ComplexMatrix) -> Result<f64> {
        let sigma = self.extended_output(lambda, u);
        let w = hermitian_eigenvalues_trusted(&sigma)?;
        Ok((self.d_out as f64).ln() + shannon_entropy(lambda) - shannon_entropy(&w))
    }
}

/// `D((Φ⊗1)ψ ‖ (R⊗1)ψ)` for `ψ = (U ⊗ 1) Σ √λ_i |i,i⟩`, through the
/// reduction `log d_out + H(λ) − H(σ)`.
pub fn objective(phi: &Channel, lambda: &SchmidtSpectrum, u: &ComplexMatrix) -> Result<f64> {
    phi.ensure_cptp()?;
    check_spectrum(phi, lambda)?;
    check_local_unitary(phi, u)?;
    ReducedObjective::new(phi).eval(lambda.as_slice(), u)
}

/// The same quantity evaluated literally: both extended outputs are formed
/// and passed to [`relative_entropy`].
pub fn objective_direct(phi: &Channel, lambda: &SchmidtSpectrum, u: &ComplexMatrix) -> Result<RelEntropy> {
    phi.ensure_cptp()?;
    check_spectrum(phi, lambda)?;
    check_local_unitary(phi, u)?;
    let psi = schmidt_state(lambda, Some(u), None)?;
    let sigma = phi.apply_extended(&psi)?;
    let marginal = partial_trace(psi.matrix(), (phi.dim_in(), phi.dim_in()), Keep::B)?;
    let mixed = ComplexMatrix::identity(phi.dim_out()).scale_real(1.0 / phi.dim_out() as f64);
    let gamma = DensityMatrix::new(kron(&mixed, &marginal).hermitian_part())?;
    relative_entropy(&sigma, &gamma)
}

/// Settings for the multi-start search over pure inputs.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
    /// Stop when a sweep gains less than this.
    pub tol_improve: f64,
    pub initial_step: f64,
    /// Near a maximum a step `s` changes the objective by `O(s²)`, so steps
    /// below `√tol_improve` cannot produce a qualifying gain.
    pub min_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: rng::DEFAULT_SEED,
            max_evals: 2000,
            tol_improve: 1e-10,
            initial_step: 0.5,
            min_step: 1e-5,
        }
    }
}

impl OptimizerConfig {
    pub fn with_restarts(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            ..Self::default()
        }
    }
}

/// Search diagnostics, including the best input found.
#[derive(Clone, Debug, Serialize)]
pub struct OptimizerDiagnostics {
    pub restarts: usize,
    pub best_restart: usize,
    /// Pattern-search sweeps of the best restart.
    pub iterations: usize,
    pub evaluations: usize,
    /// Whether the best restart met the stopping rule before the evaluation budget.
    pub converged: bool,
    pub restarts_converged: usize,
    pub argmax_lambda: Vec<f64>,
    /// Input unitary `U` as `[re, im]` pairs, row-major.
    pub argmax_unitary: Vec<Vec<[f64; 2]>>,
}

/// Estimated `D(Φ‖R)` with its maximizer.
#[derive(Clone, Debug)]
pub struct ChannelRelEntropy {
    pub value: f64,
    pub lambda: SchmidtSpectrum,
    pub unitary: ComplexMatrix,
    pub diagnostics: OptimizerDiagnostics,
}

/// Moving-frame coordinates: `d_in − 1` softmax logits for λ (the last logit
/// is pinned at zero) followed by `d_in²` reals for a Hermitian generator `H`,
/// with `U = U_base · exp(iH)`. After every sweep the rotation is folded into
/// `U_base` and `H` is reset to zero, so the search always moves in the
/// well-conditioned neighbourhood of `H = 0`.
struct InputChart {
    d: usize,
    base: ComplexMatrix,
}

impl InputChart {
    fn dim(&self) -> usize {
        self.d - 1 + self.d * self.d
    }

    fn lambda(&self, x: &[f64]) -> Vec<f64> {
        let d = self.d;
        let logits: Vec<f64> = x[..d - 1].iter().copied().chain(std::iter::once(0.0)).collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let s: f64 = e.iter().sum();
        e.into_iter().map(|v| v / s).collect()
    }

    fn generator(&self, x: &[f64]) -> ComplexMatrix {
        let d = self.d;
        let g = &x[d - 1..];
        let mut h = vec![Complex64::new(0.0, 0.0); d * d];
        let mut k = d;
        for i in 0..d {
            h[i * d + i] = Complex64::new(g[i], 0.0);
            for j in i + 1..d {
                let z = Complex64::new(g[k], g[k + 1]);
                h[i * d + j] = z;
                h[j * d + i] = z.conj();
                k += 2;
            }
        }
        ComplexMatrix::from_fn(d, d, |i, j| h[i * d + j])
    }

    fn unitary(&self, x: &[f64]) -> Result<ComplexMatrix> {
        if x[self.d - 1..].iter().all(|&v| v == 0.0) {
            return Ok(self.base.clone());
        }
        Ok(&self.base * &unitary_from_generator_trusted(&self.generator(x))?)
    }

    fn recenter(&mut self, x: &mut [f64]) -> Result<()> {
        self.base = self.unitary(x)?;
        x[self.d - 1..].iter_mut().for_each(|v| *v = 0.0);
        Ok(())
    }
}

struct RestartOutcome {
    value: f64,
    lambda: Vec<f64>,
    unitary: ComplexMatrix,
    sweeps: usize,
    evals: usize,
    converged: bool,
}

/// Compass search in the moving frame. A sweep tries `±step` on every
/// coordinate in turn and keeps each improvement. A sweep gaining no more
/// than `tol_improve` halves the step; the restart has converged once the
/// step drops below `min_step`. The evaluation budget caps the restart.
fn compass_search(
    problem: &ReducedObjective,
    mut chart: InputChart,
    mut x: Vec<f64>,
    cfg: &OptimizerConfig,
) -> Result<RestartOutcome> {
    let f = |chart: &InputChart, x: &[f64]| problem.eval(&chart.lambda(x), &chart.unitary(x)?);
    let mut fx = f(&chart, &x)?;
    let mut evals = 1;
    let mut sweeps = 0;
    let mut step = cfg.initial_step;
    let mut converged = false;
    'search: loop {
        let start = fx;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                if evals >= cfg.max_evals {
                    break 'search;
                }
                let old = x[i];
                x[i] = old + dir * step;
                let v = f(&chart, &x)?;
                evals += 1;
                if v > fx {
                    fx = v;
                    break;
                }
                x[i] = old;
            }
        }
        sweeps += 1;
        chart.recenter(&mut x)?;
        if fx - start <= cfg.tol_improve {
            step *= 0.5;
            if step < cfg.min_step {
                converged = true;
                break;
            }
        }
    }
    Ok(RestartOutcome {
        value: fx,
        lambda: chart.lambda(&x),
        unitary: chart.unitary(&x)?,
        sweeps,
        evals,
        converged,
    })
}

/// `D(Φ‖R) = sup_ψ D((Φ⊗1)ψ ‖ (R⊗1)ψ)` over pure inputs on `X_in ⊗ X_in`.
///
/// Restart 0 starts at the maximally entangled input; the others start at a
/// Haar-random `U` and Gaussian logits drawn from per-restart streams.
/// Restarts run in parallel and the best value wins, ties going to the lower
/// restart index.
pub fn channel_relative_entropy(phi: &Channel, cfg: &OptimizerConfig) -> Result<ChannelRelEntropy> {
    phi.ensure_cptp()?;
    let d = phi.dim_in();
    let restarts = cfg.restarts.max(1);
    if d == 1 {
        let value = ReducedObjective::new(phi).eval(&[1.0], &ComplexMatrix::identity(1))?;
        return Ok(ChannelRelEntropy {
            value,
            lambda: SchmidtSpectrum::uniform(1),
            unitary: ComplexMatrix::identity(1),
            diagnostics: OptimizerDiagnostics {
                restarts,
                best_restart: 0,
                iterations: 0,
                evaluations: 1,
                converged: true,
                restarts_converged: restarts,
                argmax_lambda: vec![1.0],
                argmax_unitary: vec![vec![[1.0, 0.0]]],
            },
        });
    }
    let problem = ReducedObjective::new(phi);
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut chart = InputChart {
                d,
                base: ComplexMatrix::identity(d),
            };
            let mut x = vec![0.0; chart.dim()];
            if r > 0 {
                let mut rng = rng::stream(cfg.seed, "channel-relative-entropy", r as u64);
                chart.base = haar_unitary(d, &mut rng);
                for v in &mut x[..d - 1] {
                    *v = rng.sample(StandardNormal);
                }
            }
            compass_search(&problem, chart, x, cfg)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (r, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = r;
        }
    }
    let o = &outcomes[best];
    let lambda = o.lambda.clone();
    let unitary = o.unitary.clone();
    let diagnostics = OptimizerDiagnostics {
        restarts,
        best_restart: best,
        iterations: o.sweeps,
        evaluations: outcomes.iter().map(|o| o.evals).sum(),
        converged: o.converged,
        restarts_converged: outcomes.iter().filter(|o| o.converged).count(),
        argmax_lambda: lambda.clone(),
        argmax_unitary: unitary
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    Ok(ChannelRelEntropy {
        value: o.value,
        lambda: SchmidtSpectrum::new(renormalize(lambda))?,
        unitary,
        diagnostics,
    })
}

fn renormalize(mut v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// `H(Φ) = log d_out − D(Φ‖R)`. Negative for unitary channels.
pub fn channel_entropy(phi: &Channel, cfg: &OptimizerConfig) -> Result<f64> {
    Ok((phi.dim_out() as f64).ln() - channel_relative_entropy(phi, cfg)?.value)
}

/// Map entropy, channel entropy and the gap `H^K − log d_out − H ≥ 0`.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyReport {
    pub h_map: f64,
    pub h_channel: f64,
    pub gap: f64,
    pub optimizer: OptimizerDiagnostics,
}

pub fn lemma1_gap(phi: &Channel, cfg: &OptimizerConfig) -> Result<EntropyReport> {
    let h_map = map_entropy(phi)?;
    let rel = channel_relative_entropy(phi, cfg)?;
    let log_out = (phi.dim_out() as f64).ln();
    let h_channel = log_out - rel.value;
    Ok(EntropyReport {
        h_map,
        h_channel,
        gap: h_map - log_out - h_channel,
        optimizer: rel.diagnostics,
    })
}
