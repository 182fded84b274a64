//! Quantum states and channels.
//!
//! Dynamical matrices live on `X_out ⊗ X_in` (output factor first), so
//! `Tr_out D_Φ = I` expresses trace preservation and `Tr_in` is the second
//! partial trace.

mod channel;
pub mod named;
mod random;
mod state;

pub use channel::{choi_from_kraus, is_cptp, is_unital, kraus_from_choi, Channel, CptpReport, JamiolkowskiState, UnitalReport};
pub use random::{haar_unitary, random_channel};
pub use state::{sample_schmidt, schmidt_state, shannon_entropy, DensityMatrix, SchmidtKind, SchmidtSpectrum};
