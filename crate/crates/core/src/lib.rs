//! Entropies of quantum channels.
//!
//! Two notions are computed side by side: the map entropy `H^K(Φ)`, the von
//! Neumann entropy of the Choi–Jamiołkowski state, and the channel entropy
//! `H(Φ) = log d_out − D(Φ‖R)`, where `D(Φ‖R)` is the relative entropy of the
//! extended output against the completely depolarizing channel, maximized over
//! pure inputs. They satisfy `H(Φ) ≤ H^K(Φ) − log d_out`.
//!
//! All quantities are in nats.

pub mod asymptotics;
pub mod channels;
pub mod entropy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod qubit_unital;
pub mod tol;

pub use error::{Error, Result};
