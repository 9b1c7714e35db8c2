//! Two-time-scale analysis toolkit for coupled fast/slow linear systems.
//!
//! The library works on finite-dimensional coupled systems
//!
//! ```text
//!   eps * dz/dt = A1 z + B1 C1 w
//!         dw/dt = A2 w + B2 C2 z
//! ```
//!
//! and provides:
//!
//! * [`model`] — system construction (explicit matrices, a spectral 1-D heat
//!   exemplar, a scalar exemplar) and the full closed-loop generator.
//! * [`numerics`] — Lyapunov-equation solves, eigen/norm utilities and an
//!   A-stable implicit trapezoidal integrator for stiff LTI dynamics.
//! * [`decomposition`] — quasi-steady state, reduced-order generator and the
//!   boundary-layer system.
//! * [`certificate`] — composite (forwarding) Lyapunov certificate synthesis
//!   and the explicit stability threshold `eps_star`.
//! * [`tikhonov`] — error variables, epsilon sweeps checking the O(eps)
//!   state-scaling and approximation-error laws, and the perturbed-generator
//!   growth bound.
//! * [`cli`] — JSON-config command front end with CSV/JSON outputs.
//!
//! All numerical kernels are generic over the scalar type through
//! [`scalar::RealScalar`] (any `nalgebra::RealField` that converts from
//! `f64`, in practice `f32` or `f64`). The aliases below fix `f64`, which is
//! what the CLI uses.

pub mod certificate;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod model;
pub mod numerics;
pub mod scalar;
pub mod tikhonov;

pub use error::{Error, Result};
pub use scalar::RealScalar;

/// Dynamically sized `f64` matrix.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Dynamically sized `f64` vector.
pub type Vector = nalgebra::DVector<f64>;

pub type CoupledSystem64 = model::CoupledSystem<f64>;
pub type Trajectory64 = model::Trajectory<f64>;
pub type Decomposition64 = decomposition::Decomposition<f64>;
pub type Certificate64 = certificate::Certificate<f64>;
pub type SweepResult64 = tikhonov::SweepResult<f64>;
