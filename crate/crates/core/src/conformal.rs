//! Conformal maps of doubly-connected domains onto concentric annuli.
//!
//! `h(z) = (z − a) e^{H(z)}` with `a` the hole anchor and `H` analytic and
//! single-valued on `Ω̄`. Requiring `log|h| = log|z − a| + Re H` to equal a
//! constant `C_k` on each boundary curve is a linear least-squares problem in
//! the coefficients of `H` and the two constants; the unit coefficient of the
//! logarithm fixes the conjugate period at `2π`, so `h` is single-valued and
//! `R_k = e^{C_k}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::approx::ApproximationResult;
use crate::error::{Error, Result};
use crate::geometry::PlanarDomain;
use crate::laurent::{LaurentSum, PowerTerm};
use crate::linalg::{real_lstsq, weighted_complex_lstsq};
use crate::quaddiff::QuadraticDifferential;

pub const DEFAULT_DEGREE: usize = 24;

#[derive(Clone, Debug)]
pub struct AnnulusMap {
    pub r1: f64,
    pub r2: f64,
    pub modulus: f64,
    pub hole: Complex64,
    /// `H` as a Laurent sum.
    pub exponent: LaurentSum,
    exponent_prime: LaurentSum,
    /// `max ||h| − R_k|` over boundary samples.
    pub boundary_defect: f64,
    pub condition: f64,
    /// Boundary samples with their images, for seeding inversions.
    seeds: Vec<(Complex64, Complex64)>,
}

impl AnnulusMap {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (z - self.hole) * self.exponent.eval(z).exp()
    }

    /// `(log h)′ = 1/(z − a) + H′`.
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        1.0 / (z - self.hole) + self.exponent_prime.eval(z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.eval(z) * self.log_derivative(z)
    }

    /// `h⁻¹(w)` by Newton from the boundary sample whose image is nearest.
    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        let mut z = self
            .seeds
            .iter()
            .min_by(|a, b| (a.1 - w).norm().total_cmp(&(b.1 - w).norm()))
            .map(|s| s.0)
            .ok_or_else(|| Error::Numerical("no seeds".into()))?;
        let scale = self.r1;
        for _ in 0..60 {
            let f = self.eval(z) - w;
            if f.norm() < 1e-14 * scale {
                return Ok(z);
            }
            let step = f / self.derivative(z);
            // Damp steps that would leave the seed's neighbourhood.
            let step = if step.norm() > 0.1 * scale { step * (0.1 * scale / step.norm()) } else { step };
            z -= step;
        }
        if (self.eval(z) - w).norm() < 1e-10 * scale {
            Ok(z)
        } else {
            Err(Error::Numerical(format!("inversion of h did not converge at w = {w}")))
        }
    }
}

/// Fits `h` with `H` spanned by `((z − c)/ρ)^j` and `(r/(z − a))^j`,
/// `j = 1..=degree`.
pub fn map_to_annulus(domain: &PlanarDomain, degree: usize) -> Result<AnnulusMap> {
    if domain.connectivity() != 2 {
        return Err(Error::InvalidDomain(format!(
            "annulus maps need a doubly-connected domain, got connectivity {}",
            domain.connectivity()
        )));
    }
    let a = domain.hole_points()[0];
    let center = domain.centroid();
    let rho = domain.radius();
    let r_hole = domain.inners()[0]
        .samples()
        .iter()
        .map(|p| (p.z - a).norm())
        .fold(0.0, f64::max);
    let mut terms: Vec<PowerTerm> = (1..=degree as i32).map(|j| PowerTerm::new(center, rho, j)).collect();
    terms.extend((1..=degree as i32).map(|j| PowerTerm::new(a, r_hole, -j)));

    // Unknowns: (Re, Im) parts of each complex coefficient, then C1, C2.
    let n = 2 * terms.len() + 2;
    let per_component = (8 * n).max(256);
    let mut rows: Vec<(Complex64, usize)> = Vec::new();
    for (k, curve) in domain.components().enumerate() {
        for i in 0..per_component {
            rows.push((curve.eval(std::f64::consts::TAU * i as f64 / per_component as f64), k));
        }
    }
    let mat = DMatrix::from_fn(rows.len(), n, |i, col| {
        let (z, k) = rows[i];
        if col < 2 * terms.len() {
            let v = terms[col / 2].eval(z);
            // Re((α − iβ) v) = α Re v + β Im v
            if col % 2 == 0 {
                v.re
            } else {
                v.im
            }
        } else if col - 2 * terms.len() == k {
            -1.0
        } else {
            0.0
        }
    });
    let rhs = DVector::from_fn(rows.len(), |i, _| -(rows[i].0 - a).norm().ln());
    let solve = real_lstsq(&mat, &rhs)?;
    let coeffs: Vec<Complex64> = (0..terms.len())
        .map(|j| Complex64::new(solve.x[2 * j], -solve.x[2 * j + 1]))
        .collect();
    let c1 = solve.x[n - 2];
    let c2 = solve.x[n - 1];
    if !(c1 > c2) {
        return Err(Error::Numerical(format!(
            "degenerate modulus: log R1 = {c1:.6e}, log R2 = {c2:.6e}"
        )));
    }
    let exponent = LaurentSum::new(coeffs.into_iter().zip(terms).collect());
    let exponent_prime = exponent.derivative();
    let mut map = AnnulusMap {
        r1: c1.exp(),
        r2: c2.exp(),
        modulus: c1 - c2,
        hole: a,
        exponent,
        exponent_prime,
        boundary_defect: 0.0,
        condition: solve.condition(),
        seeds: Vec::new(),
    };
    let mut defect: f64 = 0.0;
    let mut seeds = Vec::new();
    for (k, curve) in domain.components().enumerate() {
        let target = if k == 0 { map.r1 } else { map.r2 };
        for p in curve.samples() {
            let w = map.eval(p.z);
            defect = defect.max((w.norm() - target).abs());
            seeds.push((p.z, w));
        }
    }
    map.boundary_defect = defect;
    map.seeds = seeds;
    Ok(map)
}

#[derive(Clone, Debug, Serialize)]
pub struct LogDerivativeFit {
    /// Least-squares `C` in `φ′ ≈ C [(log h)′]²`.
    pub c_fit: Complex64,
    /// `max |φ′ − C[(log h)′]²| / max |φ′|` over interior samples.
    pub deviation: f64,
}

/// Fits `φ̂′ = C [(log h)′]²` on an interior grid.
pub fn lemma_l1_check(domain: &PlanarDomain, result: &ApproximationResult, map: &AnnulusMap) -> LogDerivativeFit {
    l1_fit(domain, &QuadraticDifferential::from_phi(&result.phi()), map)
}

pub fn l1_fit(domain: &PlanarDomain, qd: &QuadraticDifferential, map: &AnnulusMap) -> LogDerivativeFit {
    let margin = 0.02 * domain.radius();
    let pts = domain.interior_grid(600, margin);
    let values: Vec<(Complex64, Complex64)> = pts
        .iter()
        .map(|&z| {
            let g = map.log_derivative(z);
            (qd.eval(z), g * g)
        })
        .collect();
    let num: Complex64 = values.iter().map(|(f, g)| f * g.conj()).sum();
    let den: f64 = values.iter().map(|(_, g)| g.norm_sqr()).sum();
    let c_fit = num / den;
    let scale = values.iter().map(|(f, _)| f.norm()).fold(0.0, f64::max);
    let deviation = values
        .iter()
        .map(|(f, g)| (f - c_fit * g).norm())
        .fold(0.0, f64::max)
        / scale.max(1e-300);
    LogDerivativeFit { c_fit, deviation }
}

#[derive(Clone, Debug, Serialize)]
pub struct MobiusReport {
    /// Largest cross-ratio change over the test quadruples.
    pub defect: f64,
    pub samples: usize,
    /// Samples where `h⁻¹` did not converge.
    pub failures: usize,
}

/// Cross-ratio `(a, b; c, d)`.
fn cross_ratio(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    (a - c) * (b - d) / ((a - d) * (b - c))
}

fn boundary_correspondence(domain: &PlanarDomain, map: &AnnulusMap, n: usize) -> (Vec<(Complex64, Complex64)>, usize) {
    let inner = &domain.inners()[0];
    let k = map.r1 / map.r2;
    let mut pairs = Vec::new();
    let mut failures = 0;
    for i in 0..n {
        let z = inner.eval(std::f64::consts::TAU * i as f64 / n as f64);
        match map.inverse(k * map.eval(z)) {
            Ok(w) => pairs.push((z, w)),
            Err(_) => failures += 1,
        }
    }
    (pairs, failures)
}

/// Tests whether `μ = h⁻¹((R1/R2)·h)` restricted to the inner curve is
/// Möbius, by comparing cross-ratios of well-spread quadruples and of their
/// images.
pub fn mobius_check(domain: &PlanarDomain, map: &AnnulusMap) -> MobiusReport {
    let n = 64;
    let (pairs, failures) = boundary_correspondence(domain, map, n);
    let m = pairs.len();
    let mut defect: f64 = 0.0;
    if m >= 8 {
        for i in 0..m {
            let q = [i, (i + m / 4) % m, (i + m / 2) % m, (i + 3 * m / 4) % m];
            let pre = cross_ratio(pairs[q[0]].0, pairs[q[1]].0, pairs[q[2]].0, pairs[q[3]].0);
            let img = cross_ratio(pairs[q[0]].1, pairs[q[1]].1, pairs[q[2]].1, pairs[q[3]].1);
            defect = defect.max((pre - img).norm());
        }
    } else {
        defect = f64::INFINITY;
    }
    MobiusReport {
        defect,
        samples: m,
        failures,
    }
}

/// `max |φ′(μ(z)) μ′(z)² − φ′(z)| / max |φ′(z)|` over inner-curve samples.
pub fn qd_invariance(domain: &PlanarDomain, map: &AnnulusMap, qd: &QuadraticDifferential) -> f64 {
    let (pairs, _) = boundary_correspondence(domain, map, 64);
    let k = map.r1 / map.r2;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (z, w) in pairs {
        let mu_prime = k * map.derivative(z) / map.derivative(w);
        let lhs = qd.eval(w) * mu_prime * mu_prime;
        let rhs = qd.eval(z);
        worst = worst.max((lhs - rhs).norm());
        scale = scale.max(rhs.norm());
    }
    worst / scale.max(1e-300)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum InverseForm {
    #[serde(rename = "linear")]
    Linear,
    #[serde(rename = "reciprocal")]
    Reciprocal,
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseFit {
    pub form: InverseForm,
    pub a: Complex64,
    pub b: Complex64,
    /// Max boundary residual of the better form.
    pub residual: f64,
    pub linear_residual: f64,
    pub reciprocal_residual: f64,
}

/// Fits `h⁻¹(w) ≈ a w + b` and `≈ a/w + b` on boundary samples.
pub fn inverse_map_fit(domain: &PlanarDomain, map: &AnnulusMap) -> Result<InverseFit> {
    let pts: Vec<(Complex64, Complex64)> = domain
        .components()
        .flat_map(|c| c.samples().iter().map(|p| (p.z, map.eval(p.z))))
        .collect();
    let rhs: Vec<Complex64> = pts.iter().map(|p| p.0).collect();
    let weights = vec![1.0 / pts.len() as f64; pts.len()];
    let fit = |f: &dyn Fn(Complex64) -> Complex64| -> Result<(Complex64, Complex64, f64)> {
        let basis = DMatrix::from_fn(pts.len(), 2, |i, k| if k == 0 { f(pts[i].1) } else { Complex64::new(1.0, 0.0) });
        let s = weighted_complex_lstsq(&basis, &rhs, &weights)?;
        let res = pts
            .iter()
            .map(|(z, w)| (s.coeffs[0] * f(*w) + s.coeffs[1] - z).norm())
            .fold(0.0, f64::max);
        Ok((s.coeffs[0], s.coeffs[1], res))
    };
    let lin = fit(&|w| w)?;
    let rec = fit(&|w| 1.0 / w)?;
    let (form, best) = if lin.2 <= rec.2 {
        (InverseForm::Linear, lin)
    } else {
        (InverseForm::Reciprocal, rec)
    };
    Ok(InverseFit {
        form,
        a: best.0,
        b: best.1,
        residual: best.2,
        linear_residual: lin.2,
        reciprocal_residual: rec.2,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConformalReport {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    pub modulus: f64,
    #[serde(rename = "C_fit")]
    pub c_fit: Option<Complex64>,
    pub mobius_defect: f64,
    pub boundary_defect: f64,
}
