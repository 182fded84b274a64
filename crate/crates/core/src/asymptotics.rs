//! Large-dimension experiments on random channels.
//!
//! For an input with Schmidt coefficients `λ` the extended output is
//! `σ = (1 ⊗ √Λ) D_Φ (1 ⊗ √Λ)` and the depolarized reference is
//! `γ = I/d ⊗ Λ`. Because `Tr_out D_Φ = I`, `Tr σ log γ = −H(λ) − log d` for
//! every channel, so `D(σ‖γ) = log d + H(λ) − H(σ)`.
//!
//! Every trial draws from its own stream keyed by experiment, dimension and
//! trial index; trials run in parallel and are reduced in index order, so
//! tables are reproducible bit for bit.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{random_channel, sample_schmidt, shannon_entropy, Channel, SchmidtKind, SchmidtSpectrum};
use crate::entropy::matrix_entropy;
use crate::error::{Error, Result};
use crate::linalg::{general_eigenvalues, hermitian_eigenvalues};
use crate::rng;
use crate::tol;

fn check_square(phi: &Channel, lambda: &SchmidtSpectrum) -> Result<usize> {
    phi.ensure_cptp()?;
    let d = phi.dim_in();
    if phi.dim_out() != d {
        return Err(Error::DimensionMismatch(format!(
            "square channel required, got {} -> {}",
            phi.dim_in(),
            phi.dim_out()
        )));
    }
    if lambda.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "Schmidt spectrum of length {} for dimension {d}",
            lambda.len()
        )));
    }
    Ok(d)
}

/// Spectrum of `σ = (Φ ⊗ 1)(ψ_λ)`.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSample {
    pub d: usize,
    /// Ascending, unit sum.
    pub eigenvalues: Vec<f64>,
    /// `d² · eigenvalues`, mean 1.
    pub rescaled: Vec<f64>,
    /// `max |eig(σ) − eig(D_Φ (1 ⊗ Λ))|` after sorting both.
    pub similarity_deviation: f64,
    /// Largest imaginary part among the eigenvalues of `D_Φ (1 ⊗ Λ)`.
    pub similarity_max_imag: f64,
}

/// Eigenvalues of `σ`, plus the check that they coincide with those of the
/// non-Hermitian `D_Φ (1 ⊗ Λ)` computed by a general eigensolver.
pub fn output_spectrum(phi: &Channel, lambda: &SchmidtSpectrum) -> Result<SpectrumSample> {
    let d = check_square(phi, lambda)?;
    let sigma = phi.choi_sandwich(lambda.as_slice())?;
    let eigenvalues = hermitian_eigenvalues(&sigma)?;

    let lam = lambda.as_slice();
    let choi = phi.choi();
    let product = crate::linalg::ComplexMatrix::from_fn(d * d, d * d, |r, c| choi.get(r, c) * lam[c % d]);
    let mut other: Vec<Complex64> = general_eigenvalues(&product)?;
    other.sort_by(|a, b| a.re.total_cmp(&b.re));
    let similarity_deviation = eigenvalues
        .iter()
        .zip(&other)
        .map(|(a, b)| (a - b.re).abs())
        .fold(0.0, f64::max);
    let similarity_max_imag = other.iter().map(|z| z.im.abs()).fold(0.0, f64::max);

    let scale = (d * d) as f64;
    Ok(SpectrumSample {
        d,
        rescaled: eigenvalues.iter().map(|x| x * scale).collect(),
        eigenvalues,
        similarity_deviation,
        similarity_max_imag,
    })
}

/// `Tr σ log γ` and the value `−H(λ) − log d` it must equal.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceLogReport {
    pub value: f64,
    pub predicted: f64,
    pub deviation: f64,
}

/// `Tr σ log γ` with `γ = I/d ⊗ diag(λ)`; `log γ` is diagonal and restricted
/// to the support of `λ`.
pub fn tr_sigma_log_gamma(phi: &Channel, lambda: &SchmidtSpectrum) -> Result<TraceLogReport> {
    let d = check_square(phi, lambda)?;
    let sigma = phi.choi_sandwich(lambda.as_slice())?;
    let lam = lambda.as_slice();
    let log_gamma: Vec<f64> = lam
        .iter()
        .map(|&l| if l > tol::EPS_EIG { (l / d as f64).ln() } else { 0.0 })
        .collect();
    let value: f64 = (0..d * d).map(|r| sigma.get(r, r).re * log_gamma[r % d]).sum();
    let predicted = -lambda.entropy() - (d as f64).ln();
    Ok(TraceLogReport {
        value,
        predicted,
        deviation: (value - predicted).abs(),
    })
}

/// `D(σ‖γ) = log d + H(λ) − H(σ)`.
pub fn sigma_gamma_divergence(phi: &Channel, lambda: &SchmidtSpectrum) -> Result<f64> {
    let d = check_square(phi, lambda)?;
    let sigma = phi.choi_sandwich(lambda.as_slice())?;
    Ok((d as f64).ln() + lambda.entropy() - matrix_entropy(&sigma)?)
}

/// Random channel and Schmidt spectrum for one trial of an experiment.
pub fn sample_trial(
    experiment: &str,
    d: usize,
    k: usize,
    kind: SchmidtKind,
    seed: u64,
    trial: usize,
) -> Result<(Channel, SchmidtSpectrum)> {
    let mut rng = rng::stream(seed, &format!("{experiment}/d={d}/k={k}/nu={}", kind.tag()), trial as u64);
    let phi = random_channel(d, k, &mut rng)?;
    let lambda = sample_schmidt(d, kind, &mut rng)?;
    Ok((phi, lambda))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
}

/// Sample mean and standard error, summed in slice order.
pub fn mean_stderr(xs: &[f64]) -> MeanStderr {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let stderr = if xs.len() > 1 {
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    MeanStderr { mean, stderr }
}

/// Empirical vs free-product moments of the rescaled output spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct FreeMomentReport {
    pub d: usize,
    pub k: usize,
    pub nu_kind: SchmidtKind,
    pub trials: usize,
    pub m1: f64,
    pub m1_predicted: f64,
    pub z_m1: f64,
    pub m2: f64,
    pub m2_predicted: f64,
    pub z_m2: f64,
    /// Mean-one moments of the rescaled Choi spectrum `d · eig(D_Φ)`.
    pub a1: f64,
    pub a2: f64,
    /// Mean-one moments of the rescaled Schmidt spectrum `d · λ`.
    pub b1: f64,
    pub b2: f64,
}

/// Mean moment differences below this are exact agreement, not sampling
/// noise; the first moment is 1 on both sides by normalization.
pub const MOMENT_EXACT_TOL: f64 = 1e-12;

fn z_score(diffs: &[f64]) -> f64 {
    let ms = mean_stderr(diffs);
    if ms.mean.abs() <= MOMENT_EXACT_TOL {
        0.0
    } else if ms.stderr > 0.0 {
        ms.mean / ms.stderr
    } else {
        ms.mean.signum() * f64::INFINITY
    }
}

/// For free `a`, `b`: `φ(ab) = a1 b1` and
/// `φ((ab)²) = a2 b1² + a1² b2 − a1² b1²`.
fn free_product_moments(a1: f64, a2: f64, b1: f64, b2: f64) -> (f64, f64) {
    (a1 * b1, a2 * b1 * b1 + a1 * a1 * b2 - a1 * a1 * b1 * b1)
}

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    (xs.iter().sum::<f64>() / n, xs.iter().map(|x| x * x).sum::<f64>() / n)
}

/// Compares the first two moments of `x = d² eig(σ)` with the free
/// multiplicative convolution of the Choi and Schmidt spectra. z-scores use
/// the per-trial differences between empirical and predicted moments.
pub fn free_moment_check(d: usize, k: usize, nu_kind: SchmidtKind, trials: usize, seed: u64) -> Result<FreeMomentReport> {
    if trials < 2 {
        return Err(Error::InsufficientTrials(trials));
    }
    let per_trial: Vec<[f64; 6]> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (phi, lambda) = sample_trial("free-moments", d, k, nu_kind, seed, t)?;
            let sigma = phi.choi_sandwich(lambda.as_slice())?;
            let x: Vec<f64> = hermitian_eigenvalues(&sigma)?.iter().map(|v| v * (d * d) as f64).collect();
            let a: Vec<f64> = hermitian_eigenvalues(phi.choi())?.iter().map(|v| v * d as f64).collect();
            let b: Vec<f64> = lambda.as_slice().iter().map(|v| v * d as f64).collect();
            let (m1, m2) = moments(&x);
            let (a1, a2) = moments(&a);
            let (b1, b2) = moments(&b);
            Ok([m1, m2, a1, a2, b1, b2])
        })
        .collect::<Result<_>>()?;

    let col = |i: usize| -> Vec<f64> { per_trial.iter().map(|r| r[i]).collect() };
    let (m1s, m2s) = (col(0), col(1));
    let preds: Vec<(f64, f64)> = per_trial
        .iter()
        .map(|r| free_product_moments(r[2], r[3], r[4], r[5]))
        .collect();
    let d1: Vec<f64> = m1s.iter().zip(&preds).map(|(m, p)| m - p.0).collect();
    let d2: Vec<f64> = m2s.iter().zip(&preds).map(|(m, p)| m - p.1).collect();
    let mean = |v: &[f64]| mean_stderr(v).mean;
    let (a1, a2, b1, b2) = (mean(&col(2)), mean(&col(3)), mean(&col(4)), mean(&col(5)));
    let (m1_predicted, _) = free_product_moments(a1, a2, b1, b2);
    Ok(FreeMomentReport {
        d,
        k,
        nu_kind,
        trials,
        m1: mean(&m1s),
        m1_predicted,
        z_m1: z_score(&d1),
        m2: mean(&m2s),
        m2_predicted: mean(&preds.iter().map(|p| p.1).collect::<Vec<_>>()),
        z_m2: z_score(&d2),
        a1,
        a2,
        b1,
        b2,
    })
}

/// One point of a Schmidt-distribution curve.
#[derive(Clone, Debug, Serialize)]
pub struct CurvePoint {
    pub d: usize,
    pub nu_kind: SchmidtKind,
    /// Mean of `D(σ‖γ)` over trials.
    pub mean_d: f64,
    pub stderr: f64,
    pub trials: usize,
    /// `log d − mean_d`: the channel-entropy value this input certifies.
    pub entropy_bound: f64,
    /// `log d − 1/2`.
    pub reference: f64,
}

/// Per-trial values behind [`fig1_experiment`].
#[derive(Clone, Debug, Serialize)]
pub struct TrialValue {
    pub d: usize,
    pub nu_kind: SchmidtKind,
    pub trial: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Table {
    pub points: Vec<CurvePoint>,
    pub samples: Vec<TrialValue>,
}

pub const FIG1_EXPERIMENT: &str = "fig1";

/// `D(σ‖γ)` for random channels (`k = d²`) and inputs with Schmidt spectra
/// from each `nu_kinds` distribution.
pub fn fig1_experiment(d_list: &[usize], nu_kinds: &[SchmidtKind], trials: usize, seed: u64) -> Result<Fig1Table> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    if d_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("dimension list must be strictly ascending".into()));
    }
    let mut points = Vec::new();
    let mut samples = Vec::new();
    for &d in d_list {
        for &kind in nu_kinds {
            let values: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let (phi, lambda) = sample_trial(FIG1_EXPERIMENT, d, d * d, kind, seed, t)?;
                    sigma_gamma_divergence(&phi, &lambda)
                })
                .collect::<Result<_>>()?;
            let ms = mean_stderr(&values);
            let log_d = (d as f64).ln();
            points.push(CurvePoint {
                d,
                nu_kind: kind,
                mean_d: ms.mean,
                stderr: ms.stderr,
                trials,
                entropy_bound: log_d - ms.mean,
                reference: log_d - 0.5,
            });
            samples.extend(values.into_iter().enumerate().map(|(trial, value)| TrialValue {
                d,
                nu_kind: kind,
                trial,
                value,
            }));
        }
    }
    Ok(Fig1Table { points, samples })
}

/// Map entropy and maximally-entangled divergence statistics at one dimension.
#[derive(Clone, Debug, Serialize)]
pub struct ConjectureRow {
    pub d: usize,
    pub k: usize,
    pub trials: usize,
    pub mean_h_map: f64,
    pub h_map_stderr: f64,
    /// `mean H^K − (2 log d − 1/2)`.
    pub h_map_deviation: f64,
    /// Mean `D` at the maximally entangled input; a lower bound on `D(Φ‖R)`.
    pub mean_d_phi_plus: f64,
    pub d_phi_plus_stderr: f64,
    /// `mean_d_phi_plus − 1/2`.
    pub d_phi_plus_deviation: f64,
    /// `log d − mean_d_phi_plus`: an upper bound on the mean of `H(Φ)`.
    pub h_channel_bound: f64,
}

pub const CONJECTURE_EXPERIMENT: &str = "conjecture";

pub fn conjecture_sweep(d_list: &[usize], k: Option<usize>, trials: usize, seed: u64) -> Result<Vec<ConjectureRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    d_list
        .iter()
        .map(|&d| {
            let k = k.unwrap_or(d * d);
            let pairs: Vec<(f64, f64)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let (phi, uniform) = sample_trial(CONJECTURE_EXPERIMENT, d, k, SchmidtKind::Uniform, seed, t)?;
                    let h_map = crate::entropy::map_entropy(&phi)?;
                    let div = sigma_gamma_divergence(&phi, &uniform)?;
                    Ok((h_map, div))
                })
                .collect::<Result<_>>()?;
            let hk: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let dv: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let hk_ms = mean_stderr(&hk);
            let d_ms = mean_stderr(&dv);
            let log_d = (d as f64).ln();
            Ok(ConjectureRow {
                d,
                k,
                trials,
                mean_h_map: hk_ms.mean,
                h_map_stderr: hk_ms.stderr,
                h_map_deviation: hk_ms.mean - (2.0 * log_d - 0.5),
                mean_d_phi_plus: d_ms.mean,
                d_phi_plus_stderr: d_ms.stderr,
                d_phi_plus_deviation: d_ms.mean - 0.5,
                h_channel_bound: log_d - d_ms.mean,
            })
        })
        .collect()
}

/// Shannon entropy of a spectrum, re-exported for callers that only hold eigenvalues.
pub fn spectrum_entropy(w: &[f64]) -> f64 {
    shannon_entropy(w)
}
