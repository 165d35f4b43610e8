//! Numerical machinery for the corona problem on the unit ball of ℂⁿ.
//!
//! The crate is organised bottom-up:
//!
//! - [`ball`]: points, the pairing `⟨w, z⟩`, the quasi-distance `Δ`, Möbius
//!   magnitudes, Carleson tents and the invariant measure weight.
//! - [`quadrature`]: product rules over the ball, target-centred rules for
//!   kernels with a diagonal singularity, and graded 1-D integration with
//!   divergence detection.
//! - [`holo`]: exact holomorphic polynomials, the radial derivative `R`, the
//!   almost-invariant derivative `D`, the `𝒴^m` operator words and a
//!   finite-difference `∂̄` probe.
//! - [`tensor`]: alternating tensors over `ℂᴺ` with `(0,q)`-form values.
//! - [`koszul`]: the Koszul forms `Ω_q^{q+1}` built from corona data.
//! - [`kernels`]: Charpentier solution kernels and the pointwise estimates
//!   used to control them.
//! - [`solver`]: the `∂̄` solution operator, its constant calibration and the
//!   full corona pipeline.
//! - [`norms`]: Carleson, BMO and weak-Carleson norms, the `T_{a,b,c}`
//!   operator family and the multilinear estimate harness.
//! - [`cli`]: the batch experiment runner behind the `bmo-corona` binary.

pub mod ball;
pub mod cli;
pub mod holo;
pub mod kernels;
pub mod koszul;
pub mod norms;
pub mod quadrature;
pub mod solver;
pub mod tensor;

mod error;

pub use ball::{CVector, Tent};
pub use error::{Error, Result};

pub use holo::{HoloPoly, MultiIndex, VecHoloPoly};
pub use num_complex::Complex64;
pub use quadrature::QuadratureRule;
pub use tensor::{AltTensor, IncIndex};
