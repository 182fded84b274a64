//! Random unitaries and random channels.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, ComplexMatrix, Keep};
use crate::tol;

const MAX_MARGINAL_RETRIES: usize = 16;

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    // Fill column by column so the draw order does not depend on storage layout.
    let mut entries = vec![Complex64::new(0.0, 0.0); rows * cols];
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            entries[i * cols + j] = Complex64::new(re, im);
        }
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| entries[i * cols + j])
}

/// Haar-distributed unitary: Gram–Schmidt on a Ginibre matrix, which equals
/// QR with a positive diagonal in `R`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..d).map(|j| (0..d).map(|i| g.get(i, j)).collect()).collect();
    for j in 0..d {
        // two passes keep the basis orthonormal to machine precision
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = (0..d).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..d {
                    let v = cols[k][i];
                    cols[j][i] -= proj * v;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// `(I ⊗ M) W (I ⊗ M)` for Hermitian `M`, one `d×d` block at a time.
fn conjugate_blocks(w: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.rows();
    let nb = w.rows() / d;
    let mf = m.as_faer();
    let blocks: Vec<faer::Mat<Complex64>> = (0..nb * nb)
        .map(|k| {
            let (a, b) = (k / nb, k % nb);
            let blk = w.as_faer().submatrix(a * d, b * d, d, d);
            mf * blk * mf
        })
        .collect();
    ComplexMatrix::from_fn(w.rows(), w.cols(), |r, c| blocks[(r / d) * nb + c / d][(r % d, c % d)])
}

/// Random channel on `C^d` with Kraus rank at most `k`.
///
/// `W = G G†` for a `d² × k` Ginibre matrix `G` is a Wishart matrix on
/// `X_out ⊗ X_in`; with `S = Tr_out W` the dynamical matrix is
/// `D = (I ⊗ S^{-1/2}) W (I ⊗ S^{-1/2})`. `k = d²` gives the uniform measure.
pub fn random_channel<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<Channel> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("random channel needs d >= 2, got {d}")));
    }
    if k == 0 || k > d * d {
        return Err(Error::InvalidParameter(format!(
            "Kraus rank k = {k} outside [1, {}]",
            d * d
        )));
    }
    for _ in 0..MAX_MARGINAL_RETRIES {
        let g = ginibre(d * d, k, rng);
        let w = &g * &g.adjoint();
        let s = partial_trace(&w, (d, d), Keep::B)?.hermitian_part();
        let eig = hermitian_eig(&s)?;
        if eig.eigenvalues[0] < tol::EPS_EIG {
            continue;
        }
        let s_inv_sqrt = eig.map(|x| x.sqrt().recip());
        let choi = conjugate_blocks(&w, &s_inv_sqrt).hermitian_part();
        return Channel::from_choi_trusted(choi, (d, d));
    }
    Err(Error::SingularMarginal(MAX_MARGINAL_RETRIES))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::is_cptp;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for d in [1, 2, 5, 16] {
            assert!(haar_unitary(d, &mut rng).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn random_channels_are_cptp_with_requested_rank() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for (d, k) in [(2, 1), (2, 4), (3, 2), (4, 16)] {
            let phi = random_channel(d, k, &mut rng).unwrap();
            assert!(is_cptp(&phi).cptp);
            assert_eq!(phi.kraus().unwrap().len(), k, "d={d} k={k}");
        }
    }

    #[test]
    fn block_conjugation_matches_kron() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let g = ginibre(6, 6, &mut rng);
        let w = &g * &g.adjoint();
        let m = ComplexMatrix::from_diag(&[0.5, 1.5, 2.0]);
        let big = crate::linalg::kron(&ComplexMatrix::identity(2), &m);
        let expected = &(&big * &w) * &big;
        assert!(conjugate_blocks(&w, &m).approx_eq(&expected, 1e-12));
    }

    #[test]
    fn invalid_ranks() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        assert!(random_channel(2, 0, &mut rng).is_err());
        assert!(random_channel(2, 5, &mut rng).is_err());
        assert!(random_channel(1, 1, &mut rng).is_err());
    }
}
