//! Trajectories of `φ′ dz²` as unit-speed integral curves of the half-angle
//! direction field `e^{iθ}`, `θ = −arg φ′/2` (plus `π/2` for vertical ones).
//! The field is only defined up to sign; every evaluation is aligned with the
//! current heading, which keeps the branch of `√φ′` continuous along the arc.

use num_complex::Complex64;
use serde::Serialize;

use super::zeros::{leading_coefficient, Zero};
use super::QuadraticDifferential;
use crate::error::{Error, Result};
use crate::geometry::PlanarDomain;
use crate::I;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    /// Horizontal: `φ′ dz² > 0`, `Im ∫√φ′ = 0`.
    #[serde(rename = "plus")]
    Plus,
    /// Vertical: `φ′ dz² < 0`, `Re ∫√φ′ = 0`.
    #[serde(rename = "minus")]
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Termination {
    Boundary,
    /// Reached the zero with this index in [`TraceOptions::zeros`].
    Zero(usize),
    /// Returned to the start with matching heading; carries the miss distance.
    Closed(f64),
    MaxLength,
    /// Branch tracking failed even at the minimum step.
    BranchFailure(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct Arc {
    pub family: Family,
    pub points: Vec<Complex64>,
    pub termination: Termination,
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct TraceOptions<'a> {
    /// Stop on leaving this domain.
    pub domain: Option<&'a PlanarDomain>,
    /// Stop on reaching any of these.
    pub zeros: Vec<Complex64>,
    /// Diameter units for step and tolerance scaling.
    pub scale: f64,
    /// Largest step as a fraction of `scale`.
    pub max_step: f64,
    /// Loop-closure tolerance, absolute.
    pub closure_tol: f64,
    pub max_length: f64,
    /// Local error tolerance of the embedded pair, relative to `scale`.
    pub rtol: f64,
}

impl<'a> TraceOptions<'a> {
    pub fn new(scale: f64) -> Self {
        TraceOptions {
            domain: None,
            zeros: Vec::new(),
            scale,
            max_step: 1e-2,
            closure_tol: 1e-4,
            max_length: 20.0 * scale,
            rtol: 1e-11,
        }
    }

    pub fn for_domain(domain: &'a PlanarDomain) -> Self {
        let scale = 2.0 * domain.radius();
        TraceOptions {
            domain: Some(domain),
            ..TraceOptions::new(scale)
        }
    }
}

/// Unit direction of `family` at `z`, aligned with `heading`.
fn field(qd: &QuadraticDifferential, family: Family, z: Complex64, heading: Complex64) -> Option<Complex64> {
    let q = qd.eval(z);
    if !(q.norm() > 0.0) || !q.re.is_finite() || !q.im.is_finite() {
        return None;
    }
    let mut d = Complex64::from_polar(1.0, -q.arg() / 2.0);
    if family == Family::Minus {
        d *= I;
    }
    if (d * heading.conj()).re < 0.0 {
        d = -d;
    }
    Some(d)
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One embedded step; `None` when a stage turns by more than a right angle
/// from the heading (branch ambiguity) or lands on a zero/pole.
fn dp_step(
    qd: &QuadraticDifferential,
    family: Family,
    z: Complex64,
    heading: Complex64,
    h: f64,
) -> Option<(Complex64, f64, Complex64)> {
    let mut k = [Complex64::new(0.0, 0.0); 7];
    for s in 0..7 {
        let zs = z + h * (0..s).map(|j| A[s][j] * k[j]).sum::<Complex64>();
        let d = field(qd, family, zs, heading)?;
        if (d * heading.conj()).re < 1e-3 {
            return None;
        }
        k[s] = d;
    }
    let z5 = z + h * (0..7).map(|j| B5[j] * k[j]).sum::<Complex64>();
    let z4 = z + h * (0..7).map(|j| B4[j] * k[j]).sum::<Complex64>();
    Some((z5, (z5 - z4).norm(), k[6]))
}

fn start_heading(qd: &QuadraticDifferential, family: Family, z: Complex64, direction: Direction) -> Result<Complex64> {
    let d = field(qd, family, z, Complex64::new(1.0, 0.0))
        .ok_or_else(|| Error::InvalidInput(format!("trajectory start {z} is a zero or pole of φ′")))?;
    Ok(match direction {
        Direction::Forward => d,
        Direction::Backward => -d,
    })
}

/// Traces from a regular point. The forward heading is the field direction
/// with non-negative real part (upward when vertical).
pub fn trace_trajectory(
    qd: &QuadraticDifferential,
    start: Complex64,
    family: Family,
    direction: Direction,
    options: &TraceOptions,
) -> Result<Arc> {
    let mut h0 = start_heading(qd, family, start, Direction::Forward)?;
    if h0.re.abs() < 1e-12 && h0.im < 0.0 {
        h0 = -h0;
    }
    let heading = match direction {
        Direction::Forward => h0,
        Direction::Backward => -h0,
    };
    trace_with_heading(qd, start, family, heading, options)
}

/// Traces from `start` with an explicit initial heading.
pub fn trace_with_heading(
    qd: &QuadraticDifferential,
    start: Complex64,
    family: Family,
    heading: Complex64,
    options: &TraceOptions,
) -> Result<Arc> {
    let scale = options.scale;
    let h_max = options.max_step * scale;
    let h_min = 1e-13 * scale;
    let tol = options.rtol * scale;
    let mut heading = field(qd, family, start, heading)
        .ok_or_else(|| Error::InvalidInput(format!("trajectory start {start} is a zero or pole of φ′")))?;
    let start_dir = heading;
    let mut z = start;
    let mut points = vec![start];
    let mut length = 0.0;
    let mut h = h_max * 0.1;
    let mut closing = false;

    let termination = loop {
        if length >= options.max_length {
            break Termination::MaxLength;
        }
        let step = h.min(options.max_length - length);
        let Some((z_new, err, d_new)) = dp_step(qd, family, z, heading, step) else {
            h *= 0.5;
            if h < h_min {
                break Termination::BranchFailure(format!("direction field turned past a right angle near {z}"));
            }
            continue;
        };
        if err > tol && step > h_min {
            h = (step * 0.9 * (tol / err).powf(0.2)).max(0.2 * step).max(h_min);
            continue;
        }

        if let Some(domain) = options.domain {
            if !domain.contains(z_new) {
                let (mut lo, mut hi) = (0.0, step);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    match dp_step(qd, family, z, heading, mid) {
                        Some((zm, _, _)) if domain.contains(zm) => lo = mid,
                        _ => hi = mid,
                    }
                }
                if let Some((zb, _, _)) = dp_step(qd, family, z, heading, hi) {
                    points.push(zb);
                    length += hi;
                }
                break Termination::Boundary;
            }
        }

        if let Some(k) = options
            .zeros
            .iter()
            .position(|&z0| segment_distance(z, z_new, z0) < (0.5 * step).max(1e-9 * scale))
        {
            points.push(options.zeros[k]);
            length += (options.zeros[k] - z).norm();
            break Termination::Zero(k);
        }

        // Closure: the step passes near the start with the initial heading.
        if length > 10.0 * options.closure_tol && (d_new * start_dir.conj()).re > 0.0 {
            let along = ((start - z) * heading.conj()).re;
            if along > 0.0 && along <= step && (start - z).norm() < 2.0 * step && !closing {
                closing = true;
                if let Some((zc, _, _)) = dp_step(qd, family, z, heading, along) {
                    let miss = (zc - start).norm();
                    if miss <= options.closure_tol {
                        points.push(zc);
                        length += along;
                        break Termination::Closed(miss);
                    }
                }
            }
        }
        if (start - z_new).norm() > 4.0 * h_max {
            closing = false;
        }

        z = z_new;
        heading = d_new;
        length += step;
        points.push(z);
        h = if err > 0.0 {
            (step * 0.9 * (tol / err).powf(0.2)).min(5.0 * step)
        } else {
            5.0 * step
        }
        .clamp(h_min, h_max);
    };

    Ok(Arc {
        family,
        points,
        termination,
        length,
    })
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

/// Launch headings of the `m + 2` arcs of `family` leaving a zero of order
/// `m`: `arg a + (m+2)ψ = 0` (horizontal) or `π` (vertical), where `a` is
/// the leading coefficient.
pub fn launch_directions(qd: &QuadraticDifferential, zero: &Zero, family: Family, radius: f64) -> Vec<Complex64> {
    let m = zero.order as f64;
    let a = leading_coefficient(qd, zero.z, zero.order, radius);
    let target = match family {
        Family::Plus => 0.0,
        Family::Minus => std::f64::consts::PI,
    };
    (0..zero.order + 2)
        .map(|k| {
            let psi = (target - a.arg() + std::f64::consts::TAU * k as f64) / (m + 2.0);
            Complex64::from_polar(1.0, psi)
        })
        .collect()
}
