#![allow(dead_code)]

use chanent::channels::{haar_unitary, sample_schmidt, DensityMatrix, SchmidtKind};
use chanent::linalg::ComplexMatrix;
use rand::Rng;

/// Full-rank random state `U diag(p) U†` with `p` flat Dirichlet.
pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let p = sample_schmidt(d, SchmidtKind::DirichletFlat, rng).unwrap();
    let u = haar_unitary(d, rng);
    let m = &(&u * &ComplexMatrix::from_diag(p.as_slice())) * &u.adjoint();
    DensityMatrix::new(m.hermitian_part()).unwrap()
}
