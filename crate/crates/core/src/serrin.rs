//! `Δu = 1` with the constant Neumann datum `∂u/∂n = A/P`, and the Dirichlet
//! defect of its solution.
//!
//! `u = |z|²/4 + h` with `h` harmonic: real and imaginary parts of centred
//! powers, of negative powers about each hole anchor, and `log|z − a_k|`. The
//! Neumann condition is fitted by least squares at boundary samples; the
//! traces of `u` on each component are then compared against constants.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{area_perimeter, CurvePoint, PlanarDomain};
use crate::linalg::real_lstsq;
use crate::I;

pub const DEFAULT_DEGREE: usize = 16;
/// Boundary samples per unknown.
pub const OVERSAMPLING: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Harmonic {
    /// `Re` (`imag = false`) or `Im` of `((z − c)/s)^p`.
    Power { center: Complex64, scale: f64, power: i32, imag: bool },
    Log { center: Complex64 },
}

impl Harmonic {
    /// Value and complex derivative of the analytic function whose real part
    /// is this basis element.
    fn analytic(&self, z: Complex64) -> (Complex64, Complex64) {
        match *self {
            Harmonic::Power { center, scale, power, imag } => {
                let w = (z - center) / scale;
                let rot = if imag { -I } else { Complex64::new(1.0, 0.0) };
                let f = w.powi(power);
                let df = w.powi(power - 1) * power as f64 / scale;
                (rot * f, rot * df)
            }
            Harmonic::Log { center } => ((z - center).ln(), 1.0 / (z - center)),
        }
    }

    fn value(&self, z: Complex64) -> f64 {
        self.analytic(z).0.re
    }

    /// `∇(Re F)` as a complex number is `conj(F′)`, so `∂_n = Re(F′ n)`.
    fn normal_derivative(&self, z: Complex64, n: Complex64) -> f64 {
        (self.analytic(z).1 * n).re
    }
}

#[derive(Clone, Debug)]
pub struct PoissonSolution {
    basis: Vec<Harmonic>,
    coeffs: Vec<f64>,
    /// Coefficients of `log|z − a_k|`, one per hole.
    pub beta: Vec<f64>,
    /// `max |∂u/∂n − A/P|` over the fit samples.
    pub neumann_residual: f64,
    pub flux_target: f64,
    pub condition: f64,
}

impl PoissonSolution {
    pub fn eval(&self, z: Complex64) -> f64 {
        z.norm_sqr() / 4.0
            + self
                .basis
                .iter()
                .zip(&self.coeffs)
                .map(|(b, c)| c * b.value(z))
                .sum::<f64>()
    }

    pub fn normal_derivative(&self, p: &CurvePoint) -> f64 {
        let n = p.normal();
        (p.z.conj() / 2.0 * n).re
            + self
                .basis
                .iter()
                .zip(&self.coeffs)
                .map(|(b, c)| c * b.normal_derivative(p.z, n))
                .sum::<f64>()
    }

    /// `Σ_k ∮_{Γ_k} ∂u/∂n ds`; equals the area by the divergence theorem.
    pub fn total_flux(&self, domain: &PlanarDomain) -> f64 {
        domain
            .components()
            .map(|c| {
                let h = std::f64::consts::TAU / c.samples().len() as f64;
                c.samples()
                    .iter()
                    .map(|p| self.normal_derivative(p) * p.speed())
                    .sum::<f64>()
                    * h
            })
            .sum()
    }
}

/// Least-squares fit of `∂u/∂n = A/P` with harmonic degree `degree`.
pub fn solve_neumann(domain: &PlanarDomain, degree: usize) -> Result<PoissonSolution> {
    let center = domain.centroid();
    let rho = domain.radius();
    let mut basis = Vec::new();
    for power in 1..=degree as i32 {
        for imag in [false, true] {
            basis.push(Harmonic::Power { center, scale: rho, power, imag });
        }
    }
    for (inner, &a) in domain.inners().iter().zip(domain.hole_points()) {
        let r = inner.samples().iter().map(|p| (p.z - a).norm()).fold(0.0, f64::max);
        basis.push(Harmonic::Log { center: a });
        for power in 1..=degree as i32 {
            for imag in [false, true] {
                basis.push(Harmonic::Power { center: a, scale: r, power: -power, imag });
            }
        }
    }

    let (area, perimeter) = area_perimeter(domain);
    let target = area / perimeter;
    let per_component = (OVERSAMPLING * basis.len()).div_ceil(domain.connectivity()).max(64);
    let points: Vec<CurvePoint> = domain
        .components()
        .flat_map(|c| {
            (0..per_component).map(move |i| c.point(std::f64::consts::TAU * i as f64 / per_component as f64))
        })
        .collect();
    // Rows weighted by √|z′| so the fit approximates the arc-length L² norm.
    let weights: Vec<f64> = points.iter().map(|p| p.speed().sqrt()).collect();
    let a = DMatrix::from_fn(points.len(), basis.len(), |i, k| {
        weights[i] * basis[k].normal_derivative(points[i].z, points[i].normal())
    });
    let b = DVector::from_fn(points.len(), |i, _| {
        let p = &points[i];
        weights[i] * (target - (p.z.conj() / 2.0 * p.normal()).re)
    });
    let solve = real_lstsq(&a, &b)?;
    let coeffs: Vec<f64> = solve.x.iter().cloned().collect();
    let beta = basis
        .iter()
        .zip(&coeffs)
        .filter(|(b, _)| matches!(b, Harmonic::Log { .. }))
        .map(|(_, c)| *c)
        .collect();
    let mut solution = PoissonSolution {
        basis,
        coeffs,
        beta,
        neumann_residual: 0.0,
        flux_target: area,
        condition: solve.condition(),
    };
    solution.neumann_residual = points
        .iter()
        .map(|p| (solution.normal_derivative(p) - target).abs())
        .fold(0.0, f64::max);
    Ok(solution)
}

#[derive(Clone, Debug, Serialize)]
pub struct Oscillation {
    /// `max u − min u` on each component.
    pub osc: Vec<f64>,
    /// Arc-length mean of `u` on each component, gauged so the outer mean is 0.
    pub c: Vec<f64>,
}

impl Oscillation {
    pub fn max(&self) -> f64 {
        self.osc.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn boundary_oscillation(solution: &PoissonSolution, domain: &PlanarDomain) -> Oscillation {
    let mut osc = Vec::new();
    let mut means = Vec::new();
    for curve in domain.components() {
        let values: Vec<f64> = curve.samples().iter().map(|p| solution.eval(p.z)).collect();
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let len: f64 = curve.samples().iter().map(CurvePoint::speed).sum();
        let mean = curve
            .samples()
            .iter()
            .zip(&values)
            .map(|(p, v)| v * p.speed())
            .sum::<f64>()
            / len;
        osc.push(max - min);
        means.push(mean);
    }
    let gauge = means[0];
    Oscillation {
        osc,
        c: means.into_iter().map(|m| m - gauge).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SerrinReport {
    pub neumann_residual: f64,
    pub osc: Vec<f64>,
    pub c: Vec<f64>,
    pub beta: Vec<f64>,
    pub flux_gap: f64,
}

impl SerrinReport {
    pub fn new(domain: &PlanarDomain, solution: &PoissonSolution) -> Self {
        let o = boundary_oscillation(solution, domain);
        SerrinReport {
            neumann_residual: solution.neumann_residual,
            osc: o.osc,
            c: o.c,
            beta: solution.beta.clone(),
            flux_gap: (solution.total_flux(domain) - solution.flux_target).abs(),
        }
    }
}
