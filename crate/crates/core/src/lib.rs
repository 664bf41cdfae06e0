//! Analytic content of finitely-connected planar domains.
//!
//! The analytic content of a compact set is the uniform distance from `z̄` to
//! the functions analytic on it. It is squeezed between `2·Area/Perimeter` and
//! `√(Area/π)`, and the lower bound is attained exactly by disks and annuli.
//! This crate computes the quantity numerically and evaluates every equivalent
//! form of extremality on concrete domains:
//!
//! * [`approx`]: minimax approximation of `z̄` (Lawson iteration) and the
//!   boundary certificate `z̄ − iλ dz̄/ds = φ(z)`;
//! * [`quadrature`]: area mean versus arc-length mean of analytic functions,
//!   plus the vortex-flow identities built from `φ`;
//! * [`serrin`]: the overdetermined problem `Δu = 1`, `∂u/∂n = A/P`,
//!   `u|Γ_k = c_k`, posed as a Neumann solve with a Dirichlet defect;
//! * [`quaddiff`]: the quadratic differential `φ′ dz²`, its zeros, Stokes
//!   graphs, the linear ODE `v″ = −φ′v/λ²` and its Liouville–Green asymptotics;
//! * [`schwarz`]: Schwarz functions, Riccati identities and Schwarzian calculus
//!   over truncated power series ([`series`]);
//! * [`conformal`]: conformal maps of doubly-connected domains onto annuli;
//! * [`perturb`] and [`svg`]: seeded test domains and Stokes-graph rendering.
//!
//! Curves are truncated Fourier series ([`geometry::AnalyticCurve`]); analytic
//! functions on domains are finite Laurent sums ([`laurent::LaurentSum`]).

pub mod approx;
pub mod conformal;
pub mod error;
pub mod geometry;
pub mod laurent;
mod linalg;
pub mod perturb;
pub mod quaddiff;
pub mod quadrature;
pub mod schwarz;
pub mod serrin;
pub mod series;
pub mod svg;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for the imaginary unit.
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);
