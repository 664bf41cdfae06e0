//! Analytic content as a discrete complex Chebyshev problem.
//!
//! `λ(Ω) = inf_φ ‖z̄ − φ‖` over `φ` analytic on `Ω̄`. Candidates are spanned by
//! scaled powers `((z − c)/ρ)^j` about the area centroid and, for each hole
//! anchor `a_k`, by `(r_k/(z − a_k))^j`. The sup is taken over boundary samples:
//! `Δ|z̄ − φ|² = 4(1 + |φ′|²) > 0`, so the error modulus is subharmonic and its
//! maximum over `Ω̄` sits on `∂Ω`. An interior grid is still evaluated and
//! reported as a cross-check.
//!
//! The minimax problem is solved with Lawson's iteration: repeated weighted
//! least squares with the weight update `w ← w·|e|` (normalized). With the
//! final weights, `√(Σ w|e|²)` is a certified lower bound on the discrete
//! minimax value and the best maximum error an upper bound.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{area_perimeter, PlanarDomain};
use crate::laurent::{LaurentFile, LaurentSum, PowerTerm, TermFile};
use crate::linalg::weighted_complex_lstsq;
use crate::I;

pub const DEFAULT_DEGREE: usize = 12;
pub const DEFAULT_MAX_ITERATIONS: usize = 500;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_INTERIOR_POINTS: usize = 2000;

/// Rational basis analytic on the closure of a domain.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticBasis {
    degree: usize,
    terms: Vec<PowerTerm>,
}

impl AnalyticBasis {
    /// Powers `0..=degree` about the centroid plus `1..=degree` negative powers
    /// about each hole anchor; `N + 1 + (n − 1)N` functions in total.
    pub fn for_domain(domain: &PlanarDomain, degree: usize) -> Self {
        let center = domain.centroid();
        let radius = domain.radius();
        let mut terms: Vec<PowerTerm> = (0..=degree as i32)
            .map(|j| PowerTerm::new(center, radius, j))
            .collect();
        for (inner, &a) in domain.inners().iter().zip(domain.hole_points()) {
            let r = inner
                .samples()
                .iter()
                .map(|p| (p.z - a).norm())
                .fold(0.0, f64::max);
            terms.extend((1..=degree as i32).map(|j| PowerTerm::new(a, r, -j)));
        }
        AnalyticBasis { degree, terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn expand(&self, coeffs: &[Complex64]) -> LaurentSum {
        LaurentSum::new(coeffs.iter().cloned().zip(self.terms.iter().cloned()).collect())
    }

    /// Coefficients of `(z − a)^p` (unscaled) for every basis function.
    pub fn unscaled(&self, coeffs: &[Complex64]) -> Vec<(PowerTerm, Complex64)> {
        self.terms
            .iter()
            .zip(coeffs)
            .map(|(t, c)| {
                (
                    PowerTerm::new(t.center, 1.0, t.power),
                    c / t.scale.powi(t.power),
                )
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

/// `2A/P ≤ λ ≤ √(A/π)`.
pub fn bounds(domain: &PlanarDomain) -> Bounds {
    let (a, p) = area_perimeter(domain);
    Bounds {
        lower: 2.0 * a / p,
        upper: (a / std::f64::consts::PI).sqrt(),
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Boundary samples per component; defaults to `max(256, 4·basis)`.
    pub samples: Option<usize>,
    pub max_iterations: usize,
    /// Stop once `max|e| − Σ w|e| < tolerance · max|e|`.
    pub tolerance: f64,
    pub interior_points: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            samples: None,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
            interior_points: DEFAULT_INTERIOR_POINTS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ApproximationResult {
    pub lambda_hat: f64,
    /// `√(Σ w|e|²)` at the final weights; never exceeds the discrete minimax.
    pub lambda_lower: f64,
    pub basis: AnalyticBasis,
    pub coeffs: Vec<Complex64>,
    /// `|z̄ − φ̂|` at the boundary samples, one vector per component.
    pub error_profile: Vec<Vec<f64>>,
    pub interior_max: f64,
    pub bounds: Bounds,
    pub gap_lower: f64,
    pub gap_upper: f64,
    pub iterations: usize,
    pub certified: bool,
    pub rank_warning: bool,
}

impl ApproximationResult {
    pub fn phi(&self) -> LaurentSum {
        self.basis.expand(&self.coeffs)
    }

    pub fn phi_prime(&self) -> LaurentSum {
        self.phi().derivative()
    }

    /// Largest minus smallest boundary error; zero for an equioscillating fit.
    pub fn error_spread(&self) -> f64 {
        let all = self.error_profile.iter().flatten();
        let max = all.clone().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = all.cloned().fold(f64::INFINITY, f64::min);
        max - min
    }
}

fn boundary_points(domain: &PlanarDomain, m: usize) -> Vec<Vec<Complex64>> {
    domain
        .components()
        .map(|c| {
            (0..m)
                .map(|i| c.eval(std::f64::consts::TAU * i as f64 / m as f64))
                .collect()
        })
        .collect()
}

/// Lawson iteration for `min ‖z̄ − φ‖` over the span of `basis`.
pub fn solve_minimax(
    domain: &PlanarDomain,
    basis: &AnalyticBasis,
    options: &SolverOptions,
) -> Result<ApproximationResult> {
    if basis.is_empty() {
        return Err(Error::InvalidInput("empty basis".into()));
    }
    let m = options.samples.unwrap_or_else(|| 256.max(4 * basis.len()));
    let n_comp = domain.connectivity();
    if m * n_comp < 4 * basis.len() {
        return Err(Error::InvalidInput(format!(
            "{} boundary samples is below 4·(basis size) = {}",
            m * n_comp,
            4 * basis.len()
        )));
    }
    let points: Vec<Complex64> = boundary_points(domain, m).into_iter().flatten().collect();
    let total = points.len();
    let design = nalgebra::DMatrix::from_fn(total, basis.len(), |i, k| basis.terms[k].eval(points[i]));
    let target: Vec<Complex64> = points.iter().map(|z| z.conj()).collect();

    let mut weights = vec![1.0 / total as f64; total];
    let mut best: Option<(f64, Vec<Complex64>, Vec<f64>)> = None;
    let mut lambda_lower: f64 = 0.0;
    let mut certified = false;
    let mut rank_warning = false;
    let mut iterations = 0;

    for it in 1..=options.max_iterations {
        iterations = it;
        let solve = weighted_complex_lstsq(&design, &target, &weights)?;
        rank_warning |= solve.ridged;
        let errors: Vec<f64> = (0..total)
            .map(|i| {
                let fit: Complex64 = (0..basis.len()).map(|k| design[(i, k)] * solve.coeffs[k]).sum();
                (target[i] - fit).norm()
            })
            .collect();
        let emax = errors.iter().cloned().fold(0.0, f64::max);
        let mean: f64 = weights.iter().zip(&errors).map(|(w, e)| w * e).sum();
        let rms = weights
            .iter()
            .zip(&errors)
            .map(|(w, e)| w * e * e)
            .sum::<f64>()
            .sqrt();
        lambda_lower = lambda_lower.max(rms);
        if best.as_ref().is_none_or(|(b, _, _)| emax < *b) {
            best = Some((emax, solve.coeffs.clone(), errors.clone()));
        }
        if emax - mean < options.tolerance * emax || emax == 0.0 {
            certified = true;
            break;
        }
        let norm = mean;
        for (w, e) in weights.iter_mut().zip(&errors) {
            *w *= e / norm;
        }
    }

    let (lambda_hat, coeffs, errors) = best.expect("at least one iteration");
    let error_profile = errors.chunks(m).map(<[f64]>::to_vec).collect();
    let phi = basis.expand(&coeffs);
    let margin = 1e-3 * domain.radius();
    let interior_max = domain
        .interior_grid(options.interior_points, margin)
        .iter()
        .map(|z| (z.conj() - phi.eval(*z)).norm())
        .fold(0.0, f64::max);
    let b = bounds(domain);
    Ok(ApproximationResult {
        lambda_hat,
        lambda_lower,
        basis: basis.clone(),
        coeffs,
        error_profile,
        interior_max,
        bounds: b,
        gap_lower: lambda_hat - b.lower,
        gap_upper: b.upper - lambda_hat,
        iterations,
        certified,
        rank_warning,
    })
}

/// Convenience wrapper using [`AnalyticBasis::for_domain`].
pub fn analytic_content(
    domain: &PlanarDomain,
    degree: usize,
    options: &SolverOptions,
) -> Result<ApproximationResult> {
    solve_minimax(domain, &AnalyticBasis::for_domain(domain, degree), options)
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub per_component: Vec<f64>,
    pub max: f64,
}

/// `max |z̄ − iλ dz̄/ds − φ(z)|` on each boundary component.
pub fn extremality_residual_with(
    domain: &PlanarDomain,
    lambda: f64,
    phi: &LaurentSum,
) -> ResidualReport {
    let per_component: Vec<f64> = domain
        .components()
        .map(|c| {
            c.samples()
                .iter()
                .map(|p| (p.z.conj() - I * lambda * p.dzbar_ds() - phi.eval(p.z)).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let max = per_component.iter().cloned().fold(0.0, f64::max);
    ResidualReport { per_component, max }
}

pub fn extremality_residual(domain: &PlanarDomain, result: &ApproximationResult) -> ResidualReport {
    extremality_residual_with(domain, result.lambda_hat, &result.phi())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "disk-like")]
    DiskLike,
    #[serde(rename = "annulus-like")]
    AnnulusLike,
    #[serde(rename = "non-extremal")]
    NonExtremal,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::DiskLike => "disk-like",
            Verdict::AnnulusLike => "annulus-like",
            Verdict::NonExtremal => "non-extremal",
        })
    }
}

/// Extremal when both the bound gap and the boundary residual are within
/// `tol`; extremal domains are labelled by connectivity.
pub fn classify(
    domain: &PlanarDomain,
    result: &ApproximationResult,
    residual: &ResidualReport,
    tol: f64,
) -> Verdict {
    if result.gap_lower <= tol && residual.max <= tol {
        if domain.connectivity() == 1 {
            Verdict::DiskLike
        } else {
            Verdict::AnnulusLike
        }
    } else {
        Verdict::NonExtremal
    }
}

/// JSON form of an approximation run.
#[derive(Clone, Debug, Serialize)]
pub struct ApproximationReport {
    pub lambda_hat: f64,
    pub bounds: Bounds,
    pub gap_lower: f64,
    pub gap_upper: f64,
    pub coeffs: Vec<TermFile>,
    pub residuals_per_component: Vec<f64>,
    pub lambda_lower: f64,
    pub interior_max: f64,
    pub iterations: usize,
    pub certified: bool,
    pub rank_warning: bool,
}

impl ApproximationReport {
    pub fn new(result: &ApproximationResult, residual: &ResidualReport) -> Self {
        let LaurentFile { terms } = result.phi().to_file();
        ApproximationReport {
            lambda_hat: result.lambda_hat,
            bounds: result.bounds,
            gap_lower: result.gap_lower,
            gap_upper: result.gap_upper,
            coeffs: terms,
            residuals_per_component: residual.per_component.clone(),
            lambda_lower: result.lambda_lower,
            interior_max: result.interior_max,
            iterations: result.iterations,
            certified: result.certified,
            rank_warning: result.rank_warning,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn origin() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn basis_size() {
        let d = PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap();
        assert_eq!(AnalyticBasis::for_domain(&d, 8).len(), 9 + 8);
        let d = PlanarDomain::disk(origin(), 1.0).unwrap();
        assert_eq!(AnalyticBasis::for_domain(&d, 12).len(), 13);
    }

    #[test]
    fn bounds_on_reference_domains() {
        let b = bounds(&PlanarDomain::disk(origin(), 1.0).unwrap());
        assert_abs_diff_eq!(b.lower, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper, 1.0, epsilon = 1e-12);
        let b = bounds(&PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap());
        assert_abs_diff_eq!(b.lower, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b.upper, 0.75f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn disk_content_is_radius() {
        let d = PlanarDomain::disk(origin(), 1.0).unwrap();
        let r = analytic_content(&d, 8, &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda_hat, 1.0, epsilon = 1e-3);
        assert!(r.coeffs.iter().all(|c| c.norm() < 1e-4));
        assert!(r.certified);
        assert!(r.interior_max <= r.lambda_hat + 1e-9);
    }

    #[test]
    fn annulus_content_and_certificate() {
        let d = PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap();
        let r = analytic_content(&d, 8, &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(r.lambda_hat, 0.5, epsilon = 1e-3);
        let inv = r
            .basis
            .unscaled(&r.coeffs)
            .into_iter()
            .find(|(t, _)| t.power == -1)
            .unwrap()
            .1;
        assert_abs_diff_eq!(inv.re, 0.5, epsilon = 1e-3);
        assert!(extremality_residual(&d, &r).max < 1e-4);
        assert!(r.error_spread() < 1e-4);
    }

    #[test]
    fn closed_form_certificates_have_zero_residual() {
        let disk = PlanarDomain::disk(origin(), 1.0).unwrap();
        assert!(extremality_residual_with(&disk, 1.0, &LaurentSum::zero()).max < 1e-8);
        let ann = PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap();
        let phi = LaurentSum::single(Complex64::new(0.5, 0.0), origin(), -1);
        let rep = extremality_residual_with(&ann, 0.5, &phi);
        assert_eq!(rep.per_component.len(), 2);
        assert!(rep.max < 1e-8);
    }

    #[test]
    fn too_few_samples_rejected() {
        let d = PlanarDomain::disk(origin(), 1.0).unwrap();
        let basis = AnalyticBasis::for_domain(&d, 12);
        let opts = SolverOptions {
            samples: Some(20),
            ..SolverOptions::default()
        };
        assert!(solve_minimax(&d, &basis, &opts).is_err());
    }

    #[test]
    fn iteration_cap_reports_uncertified() {
        let d = PlanarDomain::ellipse(1.0, 0.6).unwrap();
        let opts = SolverOptions {
            max_iterations: 2,
            ..SolverOptions::default()
        };
        let r = analytic_content(&d, 8, &opts).unwrap();
        assert!(!r.certified);
        assert!(r.lambda_lower <= r.lambda_hat);
    }
}
