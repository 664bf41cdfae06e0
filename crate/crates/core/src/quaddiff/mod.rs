//! The quadratic differential `φ′(z) dz²` attached to an extremal certificate.
//!
//! On the boundary of an extremal domain `φ′ (dz/ds)² = 1 + λκ` is real, so
//! each boundary component is a trajectory. The submodules locate zeros,
//! trace horizontal (`Σ+`, `φ′dz² > 0`) and vertical (`Σ−`, `φ′dz² < 0`)
//! trajectories, assemble Stokes graphs, and integrate the linear ODE
//! `v″ = −φ′v/λ²` together with its Liouville–Green approximation.

mod lg;
mod ode;
mod stokes;
mod trajectory;
mod zeros;

pub use lg::{lg_compare, LgOracle, LgRow, LgTable};
pub use ode::{ode_solve, wronskian_drift, OdeNode, OdeSolution};
pub use stokes::{build_stokes_graph, BoundaryTrajectory, Endpoint, StokesArc, StokesGraph};
pub use trajectory::{launch_directions, trace_trajectory, Arc, Direction, Family, Termination, TraceOptions};
pub use zeros::{find_zeros, find_zeros_in_domain, leading_coefficient, Rect, Zero};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::PlanarDomain;
use crate::laurent::{LaurentFile, LaurentSum};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticDifferential {
    phi_prime: LaurentSum,
    derivative: LaurentSum,
}

impl QuadraticDifferential {
    pub fn new(phi_prime: LaurentSum) -> Self {
        let derivative = phi_prime.derivative();
        QuadraticDifferential { phi_prime, derivative }
    }

    /// The differential `φ′ dz²` of a certificate `φ`.
    pub fn from_phi(phi: &LaurentSum) -> Self {
        QuadraticDifferential::new(phi.derivative())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: LaurentFile = serde_json::from_str(text)?;
        Ok(QuadraticDifferential::new(file.into_sum()?))
    }

    pub fn phi_prime(&self) -> &LaurentSum {
        &self.phi_prime
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.phi_prime.eval(z)
    }

    /// `φ″(z)`.
    pub fn eval_derivative(&self, z: Complex64) -> Complex64 {
        self.derivative.eval(z)
    }

    pub fn poles(&self) -> Vec<(Complex64, u32)> {
        self.phi_prime.poles()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.phi_prime.terms().iter().all(|(c, _)| c.norm() == 0.0)
    }

    /// Rejects poles in the closure of `domain`.
    pub fn check_domain(&self, domain: &PlanarDomain) -> Result<()> {
        let tol = 1e-9 * domain.radius();
        for (p, _) in self.poles() {
            if domain.contains(p) || domain.distance_to_boundary(p) < tol {
                return Err(Error::PoleInDomain { re: p.re, im: p.im });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentIdentity {
    /// `max |φ′(dz/ds)² − (1 + λκ)|`.
    pub residual: f64,
    /// `max |Im φ′(dz/ds)²|`.
    pub imaginary_part: f64,
    /// `∮ (1 + λκ) ds`.
    pub integral: f64,
    /// `∮ φ′ (dz/ds)² ds`.
    pub qd_integral: Complex64,
    /// `L_1 − 2πλ` on the outer curve, `L_k + 2πλ` on the inner ones.
    pub expected: f64,
    pub length: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryIdentity {
    pub components: Vec<ComponentIdentity>,
    pub residual: f64,
}

/// Compares `φ′ (dz/ds)²` with `1 + λκ` along each boundary component.
pub fn boundary_identity(
    domain: &PlanarDomain,
    lambda: f64,
    qd: &QuadraticDifferential,
) -> BoundaryIdentity {
    let components: Vec<ComponentIdentity> = domain
        .components()
        .enumerate()
        .map(|(k, curve)| {
            let h = std::f64::consts::TAU / curve.samples().len() as f64;
            let mut residual: f64 = 0.0;
            let mut imaginary_part: f64 = 0.0;
            let mut integral = 0.0;
            let mut qd_integral = Complex64::new(0.0, 0.0);
            let mut length = 0.0;
            for p in curve.samples() {
                let tau = p.tangent();
                let q = qd.eval(p.z) * tau * tau;
                let rhs = 1.0 + lambda * p.curvature();
                residual = residual.max((q - rhs).norm());
                imaginary_part = imaginary_part.max(q.im.abs());
                let ds = p.speed() * h;
                integral += rhs * ds;
                qd_integral += q * ds;
                length += ds;
            }
            let turn = std::f64::consts::TAU * lambda;
            let expected = if k == 0 { length - turn } else { length + turn };
            ComponentIdentity {
                residual,
                imaginary_part,
                integral,
                qd_integral,
                expected,
                length,
            }
        })
        .collect();
    let residual = components.iter().map(|c| c.residual).fold(0.0, f64::max);
    BoundaryIdentity { components, residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn disk_identity_is_trivial() {
        let d = PlanarDomain::disk(c(0.0), 1.0).unwrap();
        let qd = QuadraticDifferential::new(LaurentSum::zero());
        let b = boundary_identity(&d, 1.0, &qd);
        assert!(b.residual < 1e-12);
        assert!(b.components[0].integral.abs() < 1e-10);
        assert!(qd.is_identically_zero());
    }

    #[test]
    fn annulus_profile() {
        let d = PlanarDomain::annulus(c(0.0), 1.0, 0.5).unwrap();
        let qd = QuadraticDifferential::new(LaurentSum::single(c(-0.5), c(0.0), -2));
        let b = boundary_identity(&d, 0.5, &qd);
        assert!(b.residual < 1e-12);
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(b.components[0].integral, pi, epsilon = 1e-10);
        assert_abs_diff_eq!(b.components[1].integral, 2.0 * pi, epsilon = 1e-10);
        assert_abs_diff_eq!(b.components[0].expected, pi, epsilon = 1e-10);
        assert_abs_diff_eq!(b.components[1].expected, 2.0 * pi, epsilon = 1e-10);
        assert!(qd.check_domain(&d).is_ok());
        let disk = PlanarDomain::disk(c(0.0), 1.0).unwrap();
        assert!(qd.check_domain(&disk).is_err());
    }
}
