//! Stokes (`Σ+`) and anti-Stokes (`Σ−`) graphs: all trajectories leaving the
//! zeros of `φ′` in `Ω̄`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::trajectory::{launch_directions, trace_with_heading, Arc, Family, Termination, TraceOptions};
use super::zeros::{find_zeros_in_domain, Zero};
use super::QuadraticDifferential;
use crate::error::Result;
use crate::geometry::{segment_distance, PlanarDomain};

/// Distance from a zero at which arcs are launched, in diameter units.
const LAUNCH_OFFSET: f64 = 2e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Endpoint {
    Zero(usize),
    Boundary,
    ClosedLoop,
    /// Hit the length cap or lost the branch.
    Open,
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesArc {
    pub family: Family,
    pub points: Vec<Complex64>,
    pub start: Endpoint,
    pub end: Endpoint,
    /// Heading at the launching zero.
    pub launch_angle: f64,
}

/// Whether a boundary component is itself a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryTrajectory {
    pub component: usize,
    pub family: Option<Family>,
    /// `max |Im φ′τ²| / max |φ′τ²|` along the component.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesGraph {
    pub zeros: Vec<Zero>,
    pub arcs: Vec<StokesArc>,
    pub boundary: Vec<BoundaryTrajectory>,
}

impl StokesGraph {
    pub fn arcs_of(&self, family: Family) -> impl Iterator<Item = &StokesArc> {
        self.arcs.iter().filter(move |a| a.family == family)
    }
}

fn boundary_trajectories(domain: &PlanarDomain, qd: &QuadraticDifferential) -> Vec<BoundaryTrajectory> {
    domain
        .components()
        .enumerate()
        .map(|(k, c)| {
            let values: Vec<Complex64> = c
                .samples()
                .iter()
                .map(|p| qd.eval(p.z) * p.tangent() * p.tangent())
                .collect();
            let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let deviation = if max > 0.0 {
                values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / max
            } else {
                f64::INFINITY
            };
            let family = if deviation < 1e-6 && values.iter().all(|v| v.re > 0.0) {
                Some(Family::Plus)
            } else if deviation < 1e-6 && values.iter().all(|v| v.re < 0.0) {
                Some(Family::Minus)
            } else {
                None
            };
            BoundaryTrajectory {
                component: k,
                family,
                deviation,
            }
        })
        .collect()
}

fn endpoint(t: &Termination) -> Endpoint {
    match t {
        Termination::Boundary => Endpoint::Boundary,
        Termination::Zero(k) => Endpoint::Zero(*k),
        Termination::Closed(_) => Endpoint::ClosedLoop,
        Termination::MaxLength | Termination::BranchFailure(_) => Endpoint::Open,
    }
}

/// Launches `m + 2` arcs of each family from every interior zero and traces
/// them to the boundary, another zero, or closure. Arcs joining two zeros are
/// kept once.
pub fn build_stokes_graph(domain: &PlanarDomain, qd: &QuadraticDifferential) -> Result<StokesGraph> {
    qd.check_domain(domain)?;
    let boundary = boundary_trajectories(domain, qd);
    if qd.is_identically_zero() {
        return Ok(StokesGraph {
            zeros: Vec::new(),
            arcs: Vec::new(),
            boundary,
        });
    }
    let zeros = find_zeros_in_domain(qd, domain)?;
    let mut options = TraceOptions::for_domain(domain);
    options.zeros = zeros.iter().map(|z| z.z).collect();
    let scale = options.scale;
    let offset = LAUNCH_OFFSET * scale;

    let mut jobs = Vec::new();
    for (i, zero) in zeros.iter().enumerate() {
        if zero.on_boundary {
            continue;
        }
        let nearest = zeros
            .iter()
            .filter(|o| o.z != zero.z)
            .map(|o| (o.z - zero.z).norm())
            .chain(qd.poles().iter().map(|(p, _)| (p - zero.z).norm()))
            .fold(0.25 * scale, f64::min);
        for family in [Family::Plus, Family::Minus] {
            for d in launch_directions(qd, zero, family, 0.25 * nearest) {
                jobs.push((i, family, d));
            }
        }
    }

    let traced: Vec<(usize, Family, Complex64, Arc)> = jobs
        .into_par_iter()
        .map(|(i, family, d)| {
            let start = zeros[i].z + d * offset;
            let arc = trace_with_heading(qd, start, family, d, &options)?;
            Ok((i, family, d, arc))
        })
        .collect::<Result<_>>()?;

    let mut arcs: Vec<StokesArc> = Vec::new();
    for (i, family, d, arc) in traced {
        let end = endpoint(&arc.termination);
        let mut points = vec![zeros[i].z];
        points.extend(arc.points);
        if let Endpoint::Zero(j) = end {
            let mid = points[points.len() / 2];
            let duplicate = arcs.iter().any(|a| {
                a.family == family
                    && a.start == Endpoint::Zero(j)
                    && a.end == Endpoint::Zero(i)
                    && a
                        .points
                        .windows(2)
                        .any(|w| segment_distance(mid, w[0], w[1]) < 1e-3 * scale)
            });
            if duplicate {
                continue;
            }
        }
        arcs.push(StokesArc {
            family,
            points,
            start: Endpoint::Zero(i),
            end,
            launch_angle: d.arg(),
        });
    }
    Ok(StokesGraph { zeros, arcs, boundary })
}
