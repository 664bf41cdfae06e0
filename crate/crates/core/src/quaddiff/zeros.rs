//! Zeros of `φ′` by the argument principle on a quadtree, refined by Newton.

use num_complex::Complex64;
use serde::Serialize;

use super::QuadraticDifferential;
use crate::error::{Error, Result};
use crate::geometry::PlanarDomain;

/// Zeros closer than this to the boundary are flagged.
pub const BOUNDARY_ZERO_TOL: f64 = 1e-6;
const MAX_DEPTH: usize = 40;
const JITTER: [f64; 4] = [0.0, 0.0137, -0.0291, 0.0419];

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn around(center: Complex64, half: f64) -> Self {
        Rect::new(center.re - half, center.re + half, center.im - half, center.im + half)
    }

    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x0, self.y0),
            Complex64::new(self.x1, self.y0),
            Complex64::new(self.x1, self.y1),
            Complex64::new(self.x0, self.y1),
        ]
    }

    fn split(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.x0 + fx * (self.x1 - self.x0);
        let ym = self.y0 + fy * (self.y1 - self.y0);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(xm, self.x1, ym, self.y1),
            Rect::new(self.x0, xm, ym, self.y1),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Zero {
    pub z: Complex64,
    pub order: u32,
    /// Within [`BOUNDARY_ZERO_TOL`] of the domain boundary.
    pub on_boundary: bool,
}

/// Change of `arg f` along the segment `a → b`, in units of full turns.
/// `None` when `f` nearly vanishes or blows up on the segment.
fn arg_change(qd: &QuadraticDifferential, a: Complex64, b: Complex64, scale: f64) -> Option<f64> {
    fn rec(
        qd: &QuadraticDifferential,
        a: Complex64,
        fa: Complex64,
        b: Complex64,
        fb: Complex64,
        depth: usize,
        floor: f64,
    ) -> Option<f64> {
        let d = (fb / fa).arg();
        if d.abs() < 0.5 {
            return Some(d);
        }
        if depth > 30 {
            return None;
        }
        let m = 0.5 * (a + b);
        let fm = qd.eval(m);
        if !fm.re.is_finite() || !fm.im.is_finite() || fm.norm() < floor {
            return None;
        }
        Some(rec(qd, a, fa, m, fm, depth + 1, floor)? + rec(qd, m, fm, b, fb, depth + 1, floor)?)
    }
    let n = 16;
    let floor = 1e-13 * scale.max(1e-300);
    let mut total = 0.0;
    let mut za = a;
    let mut fa = qd.eval(a);
    if !fa.re.is_finite() || !fa.im.is_finite() || fa.norm() < floor {
        return None;
    }
    for i in 1..=n {
        let zb = a + (b - a) * (i as f64 / n as f64);
        let fb = qd.eval(zb);
        if !fb.re.is_finite() || !fb.im.is_finite() || fb.norm() < floor {
            return None;
        }
        total += rec(qd, za, fa, zb, fb, 0, floor)?;
        za = zb;
        fa = fb;
    }
    Some(total / std::f64::consts::TAU)
}

/// Number of zeros inside `rect` counted with multiplicity.
fn count(qd: &QuadraticDifferential, rect: &Rect, poles: &[(Complex64, u32)], scale: f64) -> Option<u32> {
    let mut pole_count = 0;
    for (p, m) in poles {
        let eps = 1e-12 * rect.size();
        let near_edge = (p.re - rect.x0).abs() < eps
            || (p.re - rect.x1).abs() < eps
            || (p.im - rect.y0).abs() < eps
            || (p.im - rect.y1).abs() < eps;
        if rect.contains(*p) {
            if near_edge {
                return None;
            }
            pole_count += m;
        }
    }
    let c = rect.corners();
    let mut winding = 0.0;
    for k in 0..4 {
        winding += arg_change(qd, c[k], c[(k + 1) % 4], scale)?;
    }
    let rounded = winding.round();
    if (winding - rounded).abs() > 1e-3 {
        return None;
    }
    let zeros = rounded as i64 + pole_count as i64;
    if zeros < 0 {
        return None;
    }
    Some(zeros as u32)
}

fn newton(qd: &QuadraticDifferential, mut z: Complex64, order: u32, tol: f64) -> Complex64 {
    for _ in 0..100 {
        let f = qd.eval(z);
        let df = qd.eval_derivative(z);
        if df.norm() == 0.0 || !f.re.is_finite() {
            break;
        }
        let step = f / df * order as f64;
        z -= step;
        if step.norm() < tol {
            break;
        }
    }
    z
}

/// Magnitude scale of `φ′` over the region, used for near-zero tests.
fn magnitude(qd: &QuadraticDifferential, region: &Rect) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..8 {
        for j in 0..8 {
            let z = Complex64::new(
                region.x0 + (i as f64 + 0.5) / 8.0 * (region.x1 - region.x0),
                region.y0 + (j as f64 + 0.5) / 8.0 * (region.y1 - region.y0),
            );
            let v = qd.eval(z).norm();
            if v.is_finite() {
                m = m.max(v);
            }
        }
    }
    m
}

/// All zeros of `φ′` in `region`, with multiplicities.
pub fn find_zeros(qd: &QuadraticDifferential, region: Rect) -> Result<Vec<Zero>> {
    if qd.is_identically_zero() {
        return Err(Error::InvalidInput("φ′ vanishes identically".into()));
    }
    let poles = qd.poles();
    let scale = magnitude(qd, &region);
    // Clusters tighter than this are treated as one multiple zero.
    let min_size = 1e-5 * region.size();
    let mut found: Vec<Zero> = Vec::new();
    let mut stack: Vec<(Rect, usize, u32)> = Vec::new();
    let top = (0..JITTER.len())
        .find_map(|k| {
            let r = Rect::new(
                region.x0 - JITTER[k].abs() * 1e-3 * region.size(),
                region.x1 + JITTER[k].abs() * 1e-3 * region.size(),
                region.y0 - JITTER[k].abs() * 1e-3 * region.size(),
                region.y1 + JITTER[k].abs() * 1e-3 * region.size(),
            );
            count(qd, &r, &poles, scale).map(|n| (r, n))
        })
        .ok_or_else(|| Error::Numerical("zero on the search-region boundary".into()))?;
    stack.push((top.0, 0, top.1));

    while let Some((rect, depth, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        let centre = rect.center();
        if n == 1 || rect.size() < min_size || depth >= MAX_DEPTH {
            let z = newton(qd, centre, n, 1e-15 * region.size());
            let converged = qd.eval(z).norm() <= 1e-8 * scale.max(1.0) && rect.contains(z);
            if converged || rect.size() < min_size || depth >= MAX_DEPTH {
                let z = if converged { z } else { centre };
                found.push(Zero { z, order: n, on_boundary: false });
                continue;
            }
        }
        let children = JITTER
            .iter()
            .find_map(|j| {
                let parts = rect.split(0.5 + j, 0.5 - j);
                let counts: Option<Vec<u32>> = parts.iter().map(|p| count(qd, p, &poles, scale)).collect();
                counts.filter(|c| c.iter().sum::<u32>() == n).map(|c| (parts, c))
            })
            .ok_or_else(|| Error::Numerical(format!("argument principle failed near {centre}")))?;
        for (part, c) in children.0.into_iter().zip(children.1) {
            stack.push((part, depth + 1, c));
        }
    }

    let mut merged: Vec<Zero> = Vec::new();
    for z in found {
        match merged.iter_mut().find(|m| (m.z - z.z).norm() < 1e-7 * region.size()) {
            Some(m) => m.order += z.order,
            None => merged.push(z),
        }
    }
    merged.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    Ok(merged)
}

/// Zeros in `Ω̄`; those within [`BOUNDARY_ZERO_TOL`] of `∂Ω` are flagged.
pub fn find_zeros_in_domain(qd: &QuadraticDifferential, domain: &PlanarDomain) -> Result<Vec<Zero>> {
    let (x0, x1, y0, y1) = domain.bounding_box();
    let pad = 0.0123 * (x1 - x0).max(y1 - y0);
    let zeros = find_zeros(qd, Rect::new(x0 - pad, x1 + pad, y0 - pad, y1 + pad))?;
    Ok(zeros
        .into_iter()
        .filter_map(|mut z| {
            let near = domain.distance_to_boundary(z.z) < BOUNDARY_ZERO_TOL;
            z.on_boundary = near;
            (near || domain.contains(z.z)).then_some(z)
        })
        .collect())
}

/// Leading Taylor coefficient `a` of `φ′(z) ≈ a (z − z0)^m`, from a discrete
/// Cauchy integral on a circle of radius `r`.
pub fn leading_coefficient(qd: &QuadraticDifferential, z0: Complex64, order: u32, r: f64) -> Complex64 {
    let n = 64;
    (0..n)
        .map(|k| {
            let w = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64);
            qd.eval(z0 + w) / w.powi(order as i32)
        })
        .sum::<Complex64>()
        / n as f64
}
