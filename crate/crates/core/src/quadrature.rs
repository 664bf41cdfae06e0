//! Area means against boundary means, and the vortex-flow identities.
//!
//! Area integrals of analytic `f` are reduced to the boundary through
//! `∫_Ω f dA = (1/2i) ∮_{∂Ω} z̄ f(z) dz`, so both means are trapezoid sums over
//! the boundary samples and converge spectrally on analytic data.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::{AnalyticBasis, ApproximationResult};
use crate::error::{Error, Result};
use crate::geometry::{area_perimeter, PlanarDomain};
use crate::laurent::LaurentSum;
use crate::I;

fn contour_integral(domain: &PlanarDomain, g: impl Fn(Complex64) -> Complex64) -> Complex64 {
    domain
        .components()
        .map(|c| {
            let h = std::f64::consts::TAU / c.samples().len() as f64;
            c.samples().iter().map(|p| g(p.z) * p.dz).sum::<Complex64>() * h
        })
        .sum()
}

fn arc_integral(domain: &PlanarDomain, g: impl Fn(Complex64) -> Complex64) -> Complex64 {
    domain
        .components()
        .map(|c| {
            let h = std::f64::consts::TAU / c.samples().len() as f64;
            c.samples().iter().map(|p| g(p.z) * p.speed()).sum::<Complex64>() * h
        })
        .sum()
}

fn check_poles(domain: &PlanarDomain, f: &LaurentSum) -> Result<()> {
    let tol = 1e-9 * domain.radius();
    for (p, _) in f.poles() {
        if domain.contains(p) || domain.distance_to_boundary(p) < tol {
            return Err(Error::PoleInDomain { re: p.re, im: p.im });
        }
    }
    Ok(())
}

/// `(1/A) ∫_Ω f dA` for `f` analytic on `Ω̄`; no pole check.
pub fn area_mean_fn(domain: &PlanarDomain, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let (area, _) = area_perimeter(domain);
    contour_integral(domain, |z| z.conj() * f(z)) / (2.0 * I) / area
}

/// `(1/A) ∫_Ω f dA`; rejects `f` with a pole in `Ω̄`.
pub fn area_mean(domain: &PlanarDomain, f: &LaurentSum) -> Result<Complex64> {
    check_poles(domain, f)?;
    Ok(area_mean_fn(domain, |z| f.eval(z)))
}

/// `(1/P) ∫_{∂Ω} f ds` over all components.
pub fn boundary_mean(domain: &PlanarDomain, f: impl Fn(Complex64) -> Complex64) -> Complex64 {
    let (_, perimeter) = area_perimeter(domain);
    arc_integral(domain, f) / perimeter
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureRow {
    pub basis_label: String,
    pub area_mean: Complex64,
    pub boundary_mean: Complex64,
    pub abs_difference: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureReport {
    pub rows: Vec<QuadratureRow>,
    pub residual: f64,
}

impl QuadratureReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("basis_label,area_mean,boundary_mean,abs_difference\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6e}",
                r.basis_label,
                fmt_complex(r.area_mean),
                fmt_complex(r.boundary_mean),
                r.abs_difference
            );
        }
        out
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:.12e}{:+.12e}i", z.re, z.im)
}

/// Compares the two means over the approximation basis of the given degree:
/// centred powers `((z − c)/ρ)^j` and hole powers `(r_k/(z − a_k))^j`.
pub fn quadrature_residual(domain: &PlanarDomain, max_degree: usize) -> QuadratureReport {
    let basis = AnalyticBasis::for_domain(domain, max_degree);
    let rows: Vec<QuadratureRow> = basis
        .terms()
        .par_iter()
        .map(|t| {
            let a = area_mean_fn(domain, |z| t.eval(z));
            let b = boundary_mean(domain, |z| t.eval(z));
            QuadratureRow {
                basis_label: t.label(),
                area_mean: a,
                boundary_mean: b,
                abs_difference: (a - b).norm(),
            }
        })
        .collect();
    let residual = rows.iter().map(|r| r.abs_difference).fold(0.0, f64::max);
    QuadratureReport { rows, residual }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    /// `max ||v| − 2λ|` over the boundary samples.
    pub boundary_speed_dev: f64,
    /// `|4A − 2λP|`.
    pub vorticity_flux_gap: f64,
    /// `|∮ v·τ ds − 4A|`; vanishes for every domain since `curl v = 4`.
    pub circulation_gap: f64,
    pub circulation: f64,
    pub area: f64,
}

/// Velocity `v = 2i(z − conj φ(z))` of the flow with stream function
/// `|z|² − 2 Re ∫φ`.
pub fn velocity(phi: &LaurentSum, z: Complex64) -> Complex64 {
    2.0 * I * (z - phi.eval(z).conj())
}

pub fn flow_identities_with(domain: &PlanarDomain, lambda: f64, phi: &LaurentSum) -> FlowReport {
    let (area, perimeter) = area_perimeter(domain);
    let boundary_speed_dev = domain
        .components()
        .flat_map(|c| c.samples().iter())
        .map(|p| (velocity(phi, p.z).norm() - 2.0 * lambda).abs())
        .fold(0.0, f64::max);
    let circulation = contour_integral(domain, |z| velocity(phi, z).conj()).re;
    FlowReport {
        boundary_speed_dev,
        vorticity_flux_gap: (4.0 * area - 2.0 * lambda * perimeter).abs(),
        circulation_gap: (circulation - 4.0 * area).abs(),
        circulation,
        area,
    }
}

pub fn flow_identities(domain: &PlanarDomain, result: &ApproximationResult) -> FlowReport {
    flow_identities_with(domain, result.lambda_hat, &result.phi())
}
