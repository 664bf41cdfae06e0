//! `v″ = −(φ′/λ²) v` integrated along a polyline with classical RK4.

use num_complex::Complex64;
use serde::Serialize;

use super::QuadraticDifferential;
use crate::error::{Error, Result};

/// Steps satisfy `h · √|φ′|/λ ≤ PHASE_STEP`.
pub const PHASE_STEP: f64 = 1e-3;
const MAX_STEPS: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OdeNode {
    pub z: Complex64,
    pub v: Complex64,
    /// `dv/dz`.
    pub dv: Complex64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OdeSolution {
    /// Solution at every vertex of the path.
    pub nodes: Vec<OdeNode>,
    pub steps: usize,
}

impl OdeSolution {
    pub fn last(&self) -> &OdeNode {
        self.nodes.last().expect("path has at least one vertex")
    }
}

/// Integrates from `path[0]` with `v = v0`, `dv/dz = dv0` along each straight
/// segment, parametrized by arc length.
pub fn ode_solve(
    qd: &QuadraticDifferential,
    lambda: f64,
    path: &[Complex64],
    v0: Complex64,
    dv0: Complex64,
) -> Result<OdeSolution> {
    if path.is_empty() {
        return Err(Error::InvalidInput("empty path".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidInput(format!("λ must be positive, got {lambda}")));
    }
    let inv = 1.0 / (lambda * lambda);
    let rhs = |z: Complex64, v: Complex64| -> Result<Complex64> {
        let q = qd.eval(z);
        if !q.re.is_finite() || !q.im.is_finite() {
            return Err(Error::Numerical(format!("path meets a singularity of φ′ near {z}")));
        }
        Ok(-q * inv * v)
    };

    let mut nodes = vec![OdeNode { z: path[0], v: v0, dv: dv0 }];
    let mut steps = 0;
    let (mut v, mut dv) = (v0, dv0);
    for w in path.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        let u = (b - a) / len;
        let omega = (0..=16)
            .map(|k| qd.eval(a + (b - a) * (k as f64 / 16.0)).norm().sqrt())
            .fold(0.0, f64::max)
            / lambda;
        let n = ((len * omega / PHASE_STEP).ceil() as usize).max(16);
        if n > MAX_STEPS {
            return Err(Error::Numerical(format!(
                "step underflow: {n} steps needed on a segment of length {len:.3e}"
            )));
        }
        let h = len / n as f64;
        for i in 0..n {
            let z = a + u * (h * i as f64);
            let zm = z + u * (0.5 * h);
            let ze = z + u * h;
            // d/dσ (v, v′) = (v′ u, −(φ′/λ²) v u)
            let k1v = dv * u;
            let k1d = rhs(z, v)? * u;
            let k2v = (dv + 0.5 * h * k1d) * u;
            let k2d = rhs(zm, v + 0.5 * h * k1v)? * u;
            let k3v = (dv + 0.5 * h * k2d) * u;
            let k3d = rhs(zm, v + 0.5 * h * k2v)? * u;
            let k4v = (dv + h * k3d) * u;
            let k4d = rhs(ze, v + h * k3v)? * u;
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            dv += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        }
        steps += n;
        nodes.push(OdeNode { z: b, v, dv });
    }
    Ok(OdeSolution { nodes, steps })
}

/// Largest relative change of the Wronskian `v₁v₂′ − v₂v₁′` of the solutions
/// started from `(1, 0)` and `(0, 1)`; exactly zero for the true flow.
pub fn wronskian_drift(qd: &QuadraticDifferential, lambda: f64, path: &[Complex64]) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let s1 = ode_solve(qd, lambda, path, one, zero)?;
    let s2 = ode_solve(qd, lambda, path, zero, one)?;
    Ok(s1
        .nodes
        .iter()
        .zip(&s2.nodes)
        .map(|(a, b)| (a.v * b.dv - b.v * a.dv - one).norm())
        .fold(0.0, f64::max))
}
