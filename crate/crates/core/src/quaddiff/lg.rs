//! Liouville–Green approximation of `v″ = −φ′ v/(λε)²`:
//! `v ≈ q^{−1/4} [C₁ e^{iW/λε} + C₂ e^{−iW/λε}]`, `q = φ′`, `W = ∫√q`.
//!
//! For each `ε` the constants are collocated on value and derivative at the
//! first path vertex, where the reference solution starts from `v = 1`,
//! `v′ = 0`. The error is read at the last vertex in the energy norm
//! `√(|Δv|² + |λε Δv′/√q|²)`, which does not depend on the oscillation phase;
//! the plain `|Δv|` is reported alongside. Changing the base point of `W` only
//! rescales `C₁`, `C₂`, so `W` is accumulated from the first vertex.

use num_complex::Complex64;
use serde::Serialize;

use super::ode::ode_solve;
use super::QuadraticDifferential;
use crate::error::{Error, Result};
use crate::I;

/// Samples per path segment for the phase integral and branch tracking.
const PHASE_SAMPLES: usize = 4096;

/// Reference solution for the comparison.
pub enum LgOracle<'a> {
    /// RK4 along the path with `v = 1`, `v′ = 0` at the first vertex.
    RungeKutta,
    /// Exact `(v, v′)` at the last vertex for the same initial data, as a
    /// function of `ε`.
    Exact(Box<dyn Fn(f64) -> (Complex64, Complex64) + Sync + 'a>),
}

#[derive(Clone, Debug, Serialize)]
pub struct LgRow {
    pub epsilon: f64,
    pub v_reference: Complex64,
    pub v_lg: Complex64,
    /// Energy-norm error.
    pub error: f64,
    /// `|v_ref − v_LG|`.
    pub pointwise_error: f64,
    /// `error / ε`.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LgTable {
    pub rows: Vec<LgRow>,
    /// `max(e/ε) / min(e/ε)`.
    pub ratio_variation: f64,
}

struct Phase {
    /// `√q` at both ends, continued along the path.
    s_start: Complex64,
    s_end: Complex64,
    /// `q^{1/4}` at both ends, continued along the path.
    r_start: Complex64,
    r_end: Complex64,
    /// `q′/q` at both ends.
    log_derivative: (Complex64, Complex64),
    /// `∫ √q dz` from the first to the last vertex.
    w: Complex64,
}

fn continue_root(prev: Complex64, candidate: Complex64) -> Complex64 {
    if (candidate - prev).norm() <= (candidate + prev).norm() {
        candidate
    } else {
        -candidate
    }
}

fn phase(qd: &QuadraticDifferential, path: &[Complex64]) -> Phase {
    let q0 = qd.eval(path[0]);
    let mut s = q0.sqrt();
    let mut r = s.sqrt();
    let (s_start, r_start) = (s, r);
    let mut w = Complex64::new(0.0, 0.0);
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let h = (b - a) / PHASE_SAMPLES as f64;
        // Composite Simpson with branch continuation at every node.
        let mut nodes = Vec::with_capacity(PHASE_SAMPLES + 1);
        for k in 0..=PHASE_SAMPLES {
            let z = a + h * k as f64;
            let q = qd.eval(z);
            s = continue_root(s, q.sqrt());
            r = continue_root(r, s.sqrt());
            nodes.push(s);
        }
        let mut sum = nodes[0] + nodes[PHASE_SAMPLES];
        for (k, v) in nodes.iter().enumerate().take(PHASE_SAMPLES).skip(1) {
            sum += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        w += sum * h / 3.0;
    }
    let end = *path.last().expect("non-empty path");
    Phase {
        s_start,
        s_end: s,
        r_start,
        r_end: r,
        log_derivative: (
            qd.eval_derivative(path[0]) / q0,
            qd.eval_derivative(end) / qd.eval(end),
        ),
        w,
    }
}

/// Tabulates `e(ε) = |v_ref − v_LG|` at the path end for each `ε`.
///
/// `z0` is the turning point the expansion is built around; the path must
/// stay away from it (at least half the distance of its endpoints), and must
/// not cross a Stokes line, where `Im W` changes sign.
pub fn lg_compare(
    qd: &QuadraticDifferential,
    lambda: f64,
    z0: Complex64,
    path: &[Complex64],
    epsilons: &[f64],
    oracle: &LgOracle,
) -> Result<LgTable> {
    if path.len() < 2 {
        return Err(Error::InvalidInput("path needs at least two vertices".into()));
    }
    let end = *path.last().expect("checked length");
    let clearance = 0.5 * (path[0] - z0).norm().min((end - z0).norm());
    for seg in path.windows(2) {
        if crate::geometry::segment_distance(z0, seg[0], seg[1]) < clearance {
            return Err(Error::InvalidInput(format!(
                "path passes within {clearance:.3e} of the turning point"
            )));
        }
    }
    let ph = phase(qd, path);
    check_stokes_crossing(qd, path)?;

    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut rows = Vec::new();
    for &eps in epsilons {
        let k = I / (lambda * eps);
        // Basis u± = q^{−1/4} e^{±kW}; u±′ = u± (−q′/4q ± k√q).
        let d_start = (-ph.log_derivative.0 / 4.0 + k * ph.s_start, -ph.log_derivative.0 / 4.0 - k * ph.s_start);
        let u_start = (1.0 / ph.r_start, 1.0 / ph.r_start);
        // Solve c₊u₊ + c₋u₋ = 1, c₊u₊d₊ + c₋u₋d₋ = 0.
        let det = u_start.0 * u_start.1 * (d_start.1 - d_start.0);
        let c_plus = u_start.1 * d_start.1 / det;
        let c_minus = -u_start.0 * d_start.0 / det;
        let growth = (k * ph.w).exp();
        let plus_end = c_plus * growth / ph.r_end;
        let minus_end = c_minus / growth / ph.r_end;
        let v_lg = plus_end + minus_end;
        let shift = -ph.log_derivative.1 / 4.0;
        let dv_lg = plus_end * (shift + k * ph.s_end) + minus_end * (shift - k * ph.s_end);
        let (v_reference, dv_reference) = match oracle {
            LgOracle::RungeKutta => {
                let node = *ode_solve(qd, lambda * eps, path, one, zero)?.last();
                (node.v, node.dv)
            }
            LgOracle::Exact(f) => f(eps),
        };
        let pointwise_error = (v_reference - v_lg).norm();
        let derivative_error = ((dv_reference - dv_lg) * lambda * eps / ph.s_end).norm();
        let error = pointwise_error.hypot(derivative_error);
        rows.push(LgRow {
            epsilon: eps,
            v_reference,
            v_lg,
            error,
            pointwise_error,
            ratio: error / eps,
        });
    }
    let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(LgTable {
        rows,
        ratio_variation: max / min,
    })
}

/// Rejects paths along which `Im ∫√q` changes sign strictly.
fn check_stokes_crossing(qd: &QuadraticDifferential, path: &[Complex64]) -> Result<()> {
    let mut w = Complex64::new(0.0, 0.0);
    let mut s = qd.eval(path[0]).sqrt();
    let mut sign = 0.0;
    let total_scale: f64 = path.windows(2).map(|p| (p[1] - p[0]).norm()).sum::<f64>() * s.norm().max(1e-300);
    for seg in path.windows(2) {
        let n = 256;
        let h = (seg[1] - seg[0]) / n as f64;
        for k in 0..n {
            let zm = seg[0] + h * (k as f64 + 0.5);
            s = continue_root(s, qd.eval(zm).sqrt());
            w += s * h;
            if w.im.abs() > 1e-6 * total_scale {
                let sg = w.im.signum();
                if sign != 0.0 && sg != sign {
                    return Err(Error::InvalidInput(
                        "path crosses a Stokes line; keep both samples in one sector".into(),
                    ));
                }
                sign = sg;
            }
        }
    }
    Ok(())
}
