//! Property-based invariants over random channels, states and inputs.

mod common;

use chanent::channels::{haar_unitary, is_cptp, kraus_from_choi, named, random_channel, choi_from_kraus, SchmidtSpectrum};
use chanent::entropy::{map_entropy, objective, objective_direct, relative_entropy, von_neumann, lemma1_gap, OptimizerConfig};
use chanent::linalg::{kron, partial_trace, ComplexMatrix, Keep};
use chanent::qubit_unital::f_of_p;
use chanent::channels::DensityMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relative_entropy_is_nonnegative(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let a = common::random_state(d, &mut r);
        let b = common::random_state(d, &mut r);
        let dab = relative_entropy(&a, &b).unwrap().finite().unwrap();
        prop_assert!(dab >= -1e-12);
        let daa = relative_entropy(&a, &a).unwrap().finite().unwrap();
        prop_assert!(daa.abs() < 1e-10);
    }

    #[test]
    fn entropy_is_log_d_minus_divergence_from_mixed(seed in any::<u64>(), d in 2usize..6) {
        let rho = common::random_state(d, &mut rng(seed));
        let mixed = DensityMatrix::maximally_mixed(d);
        let lhs = von_neumann(&rho).unwrap();
        let rhs = (d as f64).ln() - relative_entropy(&rho, &mixed).unwrap().finite().unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
        prop_assert!(lhs >= -1e-12 && lhs <= (d as f64).ln() + 1e-12);
    }

    #[test]
    fn choi_kraus_round_trip(seed in any::<u64>(), d in 2usize..4, k in 1usize..5) {
        let phi = random_channel(d, k.min(d * d), &mut rng(seed)).unwrap();
        prop_assert!(is_cptp(&phi).cptp);
        let ops = kraus_from_choi(phi.choi(), (d, d)).unwrap();
        prop_assert!(ops.len() <= k);
        prop_assert!(choi_from_kraus(&ops).unwrap().approx_eq(phi.choi(), 1e-10));
    }

    #[test]
    fn reduced_objective_matches_direct(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let phi = random_channel(d, d * d, &mut r).unwrap();
        let lambda = chanent::channels::sample_schmidt(d, chanent::channels::SchmidtKind::DirichletFlat, &mut r).unwrap();
        let u = haar_unitary(d, &mut r);
        let fast = objective(&phi, &lambda, &u).unwrap();
        let slow = objective_direct(&phi, &lambda, &u).unwrap().finite().unwrap();
        prop_assert!((fast - slow).abs() < 1e-8, "{} vs {}", fast, slow);
        prop_assert!(fast >= -1e-12 && fast <= 2.0 * (d as f64).ln() + 1e-12);
    }

    #[test]
    fn map_entropy_is_invariant_under_output_unitaries(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let phi = random_channel(d, 3, &mut r).unwrap();
        let w = haar_unitary(d, &mut r);
        let rotated: Vec<ComplexMatrix> = phi.kraus().unwrap().iter().map(|k| &w * k).collect();
        let psi = chanent::channels::Channel::from_kraus(rotated).unwrap();
        prop_assert!((map_entropy(&phi).unwrap() - map_entropy(&psi).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let mut r = rng(seed);
        let a = common::random_state(da, &mut r);
        let b = common::random_state(db, &mut r);
        let ab = kron(a.matrix(), b.matrix());
        prop_assert!(partial_trace(&ab, (da, db), Keep::A).unwrap().approx_eq(a.matrix(), 1e-12));
        prop_assert!(partial_trace(&ab, (da, db), Keep::B).unwrap().approx_eq(b.matrix(), 1e-12));
    }

    #[test]
    fn data_processing(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let rho = common::random_state(d, &mut r);
        let sigma = common::random_state(d, &mut r);
        let phi = random_channel(d, d * d, &mut r).unwrap();
        let before = relative_entropy(&rho, &sigma).unwrap().finite().unwrap();
        let after = relative_entropy(&phi.apply(&rho).unwrap(), &phi.apply(&sigma).unwrap()).unwrap().finite().unwrap();
        prop_assert!(after <= before + 1e-8);
    }

    #[test]
    fn unital_qubit_objective_is_symmetric(q in proptest::array::uniform4(0.0f64..1.0), p in 0.01f64..0.99) {
        let s: f64 = q.iter().sum::<f64>() + 1e-9;
        let q = [q[0] / s, q[1] / s, q[2] / s, 1.0 - (q[0] + q[1] + q[2]) / s];
        prop_assume!(q[3] >= 0.0);
        let phi = named::pauli_mixture(q).unwrap();
        prop_assert!((f_of_p(&phi, p).unwrap() - f_of_p(&phi, 1.0 - p).unwrap()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn entropy_gap_is_nonnegative(seed in any::<u64>(), d in 2usize..4) {
        let phi = random_channel(d, d * d, &mut rng(seed)).unwrap();
        let report = lemma1_gap(&phi, &OptimizerConfig::with_restarts(2, seed)).unwrap();
        prop_assert!(report.gap >= -1e-9, "gap {}", report.gap);
        prop_assert!(report.h_map >= -1e-12 && report.h_map <= 2.0 * (d as f64).ln() + 1e-12);
    }

    #[test]
    fn schmidt_spectra_are_normalized(seed in any::<u64>(), d in 2usize..20) {
        use chanent::channels::{sample_schmidt, SchmidtKind};
        let mut r = rng(seed);
        for kind in SchmidtKind::ALL {
            let s: SchmidtSpectrum = sample_schmidt(d, kind, &mut r).unwrap();
            prop_assert_eq!(s.len(), d);
            prop_assert!((s.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(s.entropy() <= (d as f64).ln() + 1e-12);
        }
    }
}
