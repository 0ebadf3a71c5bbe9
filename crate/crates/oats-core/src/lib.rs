//! Exact simulation of one-axis-twist squeezing (OATS) for collective atomic
//! spins, in the echo configuration that lets a few control atoms steer the
//! orientation of a large target ensemble.
//!
//! Everything runs in the (N+1)-dimensional symmetric Dicke subspace, where
//! the squeezing propagator is diagonal and rotations are exact, so all
//! contracts hold at near machine precision rather than to solver tolerances.
//!
//! The crate covers:
//!
//! - [`spin`]: collective spin states, coherent states, exact rotations;
//! - [`echo`]: squeeze/unsqueeze propagators, the two-step echo protocol and
//!   its closed-form output;
//! - [`decomposition`]: the rotation-sum form of the propagator at mu = pi/n,
//!   quadratic Gauss sums, and the coherent components hidden in a squeezed
//!   state;
//! - [`husimi`]: Husimi maps over the Bloch sphere with peak detection and
//!   1/e^2 perimeter circles;
//! - [`protocols`]: deterministic entangled-cat generation and the
//!   measurement-conditioned cat transfer;
//! - [`oracle`]: a brute-force product-space simulator validating the Dicke
//!   engine on small systems.

pub mod decomposition;
pub mod echo;
pub mod error;
pub mod husimi;
pub mod oracle;
pub mod protocols;
pub mod spin;

mod phase;

pub use error::{Error, Result};
pub use num_complex::Complex64;
