//! Seeded radial Fourier perturbations of circle-bounded domains.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{AnalyticCurve, Orientation, PlanarDomain};

/// Amplitudes must stay below this fraction of the smallest radius.
pub const MAX_RELATIVE_AMPLITUDE: f64 = 0.2;

/// `(center, radius, unit phase of the ±1 coefficient)` for a circle.
fn as_circle(curve: &AnalyticCurve) -> Option<(Complex64, f64, Complex64)> {
    let s = curve.orientation().sign() as i32;
    let mut center = Complex64::new(0.0, 0.0);
    let mut radial = Complex64::new(0.0, 0.0);
    let mut rest: f64 = 0.0;
    for (idx, &c) in curve.coeffs().iter().enumerate() {
        match curve.j_min() + idx as i32 {
            0 => center = c,
            j if j == s => radial = c,
            _ => rest = rest.max(c.norm()),
        }
    }
    let r = radial.norm();
    (r > 0.0 && rest <= 1e-12 * r).then(|| (center, r, radial / r))
}

/// Replaces every boundary circle `c + R u e^{±it}` by
/// `c + (R + ε cos(m t + θ_k)) u e^{±it}`, with phases `θ_k` drawn from a
/// ChaCha stream seeded by `seed`.
pub fn perturb_domain(base: &PlanarDomain, amplitude: f64, mode: u32, seed: u64) -> Result<PlanarDomain> {
    let circles: Vec<(Complex64, f64, Complex64)> = base
        .components()
        .enumerate()
        .map(|(k, c)| {
            as_circle(c).ok_or_else(|| Error::InvalidInput(format!("boundary component {k} is not a circle")))
        })
        .collect::<Result<_>>()?;
    if !(amplitude >= 0.0) {
        return Err(Error::InvalidInput(format!("amplitude {amplitude} must be non-negative")));
    }
    if mode == 0 {
        return Err(Error::InvalidInput("perturbation mode must be at least 1".into()));
    }
    let min_r = circles.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let limit = MAX_RELATIVE_AMPLITUDE * min_r;
    if amplitude >= limit {
        return Err(Error::InvalidInput(format!(
            "amplitude {amplitude} is not below 0.2·(smallest radius) = {limit}; use a smaller amplitude"
        )));
    }
    if amplitude == 0.0 {
        return Ok(base.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = mode as i32;
    let mut curves = Vec::new();
    for (k, (center, r, u)) in circles.into_iter().enumerate() {
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        let s = if k == 0 { 1 } else { -1 };
        // ε cos(mt + θ) u e^{ist} = (ε/2) u [e^{iθ} e^{i(s+m)t} + e^{−iθ} e^{i(s−m)t}]
        let half = 0.5 * amplitude * u;
        let mut terms = vec![(0, center), (s, r * u), (s + m, half * Complex64::cis(theta)), (s - m, half * Complex64::cis(-theta))];
        terms.sort_by_key(|t| t.0);
        let j_min = terms[0].0;
        let j_max = terms[terms.len() - 1].0;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (j_max - j_min + 1) as usize];
        for (j, c) in terms {
            coeffs[(j - j_min) as usize] += c;
        }
        let curve = AnalyticCurve::new(j_min, coeffs).map_err(|e| {
            Error::InvalidInput(format!("perturbed curve {k} is invalid ({e}); reduce the amplitude"))
        })?;
        let expected = if k == 0 { Orientation::CounterClockwise } else { Orientation::Clockwise };
        if curve.orientation() != expected {
            return Err(Error::InvalidInput(format!(
                "perturbed curve {k} flipped orientation; reduce the amplitude"
            )));
        }
        curves.push(curve);
    }
    let outer = curves.remove(0);
    PlanarDomain::new(outer, curves, Some(base.hole_points().to_vec())).map_err(|e| {
        Error::InvalidInput(format!("perturbed domain is invalid ({e}); reduce the amplitude"))
    })
}
