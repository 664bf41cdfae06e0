//! Schwarz functions of boundary curves, the Riccati identity for
//! `u = √S′`, Schwarzian derivatives, and the droplet/free-boundary residuals.
//!
//! Branch convention: `u` is taken equal to `dz̄/ds` for counterclockwise
//! traversal of the curve, whatever its orientation inside the domain. With
//! that branch the Riccati identity `u² + iαλu′ = φ′` holds with `α = −1` on
//! the outer curve and `α = +1` on inner curves.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{AnalyticCurve, Orientation};
use crate::quaddiff::QuadraticDifferential;
use crate::series::{Series, DEFAULT_ORDER};
use crate::I;

/// Local series `S(z0 + h)` with `S(z) = z̄` on the curve near `z0`.
#[derive(Clone, Debug)]
pub struct LocalSchwarzFunction {
    pub anchor_t: f64,
    pub center: Complex64,
    pub series: Series,
    /// Half the estimated convergence radius.
    pub radius: f64,
    /// `dz̄/ds` at the anchor for counterclockwise traversal.
    pub dzbar_ds: Complex64,
    curve: AnalyticCurve,
}

/// Taylor coefficients in `τ` of `Σ a_j e^{i s j (t0+τ)}` (conjugated
/// coefficients when `conj`), i.e. of `z(t0+τ)` or `z̄(t0+τ)` continued
/// analytically in `τ`.
fn taylor_in_t(curve: &AnalyticCurve, t0: f64, order: usize, conj: bool) -> Series {
    let mut out = vec![Complex64::new(0.0, 0.0); order];
    for (idx, &a) in curve.coeffs().iter().enumerate() {
        let j = (curve.j_min() + idx as i32) as f64;
        let (coef, freq) = if conj { (a.conj(), -j) } else { (a, j) };
        let mut term = coef * Complex64::from_polar(1.0, freq * t0);
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                term *= I * freq / k as f64;
            }
            *slot += term;
        }
    }
    Series { coeffs: out }
}

fn convergence_radius(s: &Series) -> f64 {
    let n = s.order();
    (n / 2..n)
        .filter_map(|k| {
            let m = s.coeffs[k].norm();
            (m > 1e-300).then(|| m.powf(-1.0 / k as f64))
        })
        .fold(f64::INFINITY, f64::min)
}

impl LocalSchwarzFunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.series.eval(z - self.center)
    }

    /// `u = √S′` as a series, on the counterclockwise branch (`flip` takes
    /// the other one).
    pub fn u_series(&self, flip: bool) -> Result<Series> {
        let u = self.series.derivative().sqrt()?;
        let u = if (u.coeff(0) - self.dzbar_ds).norm() > (u.coeff(0) + self.dzbar_ds).norm() {
            u.scale(Complex64::new(-1.0, 0.0))
        } else {
            u
        };
        Ok(if flip { u.scale(Complex64::new(-1.0, 0.0)) } else { u })
    }

    /// Curve parameters within the validity disk around the anchor.
    pub fn window(&self, n: usize) -> Vec<f64> {
        let speed = self.curve.point(self.anchor_t).speed();
        let half = 0.8 * self.radius / speed;
        let half = half.min(std::f64::consts::PI);
        (0..n)
            .map(|i| self.anchor_t - half + 2.0 * half * i as f64 / (n - 1).max(1) as f64)
            .filter(|&t| (self.curve.eval(t) - self.center).norm() < self.radius)
            .collect()
    }

    /// `max |S(z(t)) − z̄(t)|` over the window.
    pub fn curve_residual(&self) -> f64 {
        self.window(201)
            .into_iter()
            .map(|t| {
                let z = self.curve.eval(t);
                (self.eval(z) - z.conj()).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Composes `z̄(t)` with the local inverse of `z(t)` around `t0`.
pub fn schwarz_series(curve: &AnalyticCurve, t0: f64, order: usize) -> Result<LocalSchwarzFunction> {
    let z = taylor_in_t(curve, t0, order, false);
    let zbar = taylor_in_t(curve, t0, order, true);
    let speed = z.coeff(1).norm();
    let scale: f64 = curve.coeffs().iter().map(|c| c.norm()).sum();
    if speed < 1e-8 * scale {
        return Err(Error::InvalidCurve(format!("|z′(t0)| = {speed:.3e} too small for reversion")));
    }
    let center = z.coeff(0);
    let mut p = z.clone();
    p.coeffs[0] = Complex64::new(0.0, 0.0);
    let tau = p.reversion()?;
    let series = zbar.compose(&tau)?;
    let dz = z.coeff(1) / speed;
    let sign = match curve.orientation() {
        Orientation::CounterClockwise => 1.0,
        Orientation::Clockwise => -1.0,
    };
    let radius = 0.5 * convergence_radius(&series).min(2.0 * scale);
    Ok(LocalSchwarzFunction {
        anchor_t: t0,
        center,
        series,
        radius,
        dzbar_ds: dz.conj() * sign,
        curve: curve.clone(),
    })
}

/// `α` for a boundary component: `−1` outer, `+1` inner.
pub fn alpha_for(component: usize) -> f64 {
    if component == 0 {
        -1.0
    } else {
        1.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RiccatiReport {
    pub residual: f64,
    /// The counterclockwise branch failed and the opposite one was used.
    pub branch_flipped: bool,
}

/// `max |u² + iαλu′ − φ′|` over the validity window.
pub fn riccati_residual(
    schwarz: &LocalSchwarzFunction,
    lambda: f64,
    alpha: f64,
    qd: &QuadraticDifferential,
) -> Result<RiccatiReport> {
    let eval = |flip: bool| -> Result<f64> {
        let u = schwarz.u_series(flip)?;
        let du = u.derivative();
        Ok(schwarz
            .window(201)
            .into_iter()
            .map(|t| {
                let z = schwarz.curve.eval(t);
                let h = z - schwarz.center;
                let uv = u.eval(h);
                (uv * uv + I * alpha * lambda * du.eval(h) - qd.eval(z)).norm()
            })
            .fold(0.0, f64::max))
    };
    let residual = eval(false)?;
    if residual > 1e-6 {
        let other = eval(true)?;
        if other < residual {
            return Ok(RiccatiReport {
                residual: other,
                branch_flipped: true,
            });
        }
    }
    Ok(RiccatiReport {
        residual,
        branch_flipped: false,
    })
}

/// `S(f) = (f″/f′)′ − ½(f″/f′)²` about the series centre.
pub fn schwarzian(f: &Series) -> Result<Series> {
    let d1 = f.derivative();
    if d1.coeff(0).norm() < 1e-300 {
        return Err(Error::InvalidInput("f′ vanishes at the expansion point".into()));
    }
    let d2 = d1.derivative();
    let n = d2.order();
    let g = d2.div(&Series::new(d1.coeffs.clone(), n))?;
    let g_sq = Series::new(g.mul(&g).coeffs, n - 1);
    Ok(g.derivative().sub(&g_sq.scale(Complex64::new(0.5, 0.0))))
}

/// Cauchy-integral derivatives `f′, f″, f‴` at `z` from a circle of radius `r`.
fn cauchy_derivatives(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, r: f64) -> [Complex64; 3] {
    let n = 64;
    let mut d = [Complex64::new(0.0, 0.0); 3];
    for k in 0..n {
        let w = Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64);
        let v = f(z + w);
        for (m, slot) in d.iter_mut().enumerate() {
            *slot += v / w.powi(m as i32 + 1);
        }
    }
    [d[0] / n as f64, d[1] * 2.0 / n as f64, d[2] * 6.0 / n as f64]
}

/// `S(f)(z)` for a sampled analytic map, from Cauchy-integral derivatives.
pub fn schwarzian_numeric(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, r: f64) -> Result<Complex64> {
    let [d1, d2, d3] = cauchy_derivatives(f, z, r);
    if d1.norm() < 1e-300 {
        return Err(Error::InvalidInput(format!("f′ vanishes at {z}")));
    }
    let g = d2 / d1;
    Ok(d3 / d1 - 1.5 * g * g)
}

#[derive(Clone, Debug, Serialize)]
pub struct HomogeneityReport {
    /// `max |λ² S(f)(λz) − S(f)(z)|` over the test points.
    pub deviation: f64,
    /// Least-squares `c` in `S(f) ≈ c/z²`.
    pub c_fit: Complex64,
    pub fit_residual: f64,
}

/// Tests `S(f)(z) = λ² S(f)(λz)` at `points`, and fits `S(f) = c/z²`.
pub fn homogeneity_check(
    f: &dyn Fn(Complex64) -> Complex64,
    lam: Complex64,
    points: &[Complex64],
    r: f64,
) -> Result<HomogeneityReport> {
    let mut deviation: f64 = 0.0;
    let mut values = Vec::with_capacity(points.len());
    for &z in points {
        let s = schwarzian_numeric(f, z, r)?;
        let s_lam = schwarzian_numeric(f, lam * z, r * lam.norm())?;
        deviation = deviation.max((lam * lam * s_lam - s).norm());
        values.push((z, s));
    }
    let num: Complex64 = values.iter().map(|(z, s)| s * (1.0 / (z * z)).conj()).sum();
    let den: f64 = values.iter().map(|(z, _)| (1.0 / (z * z)).norm_sqr()).sum();
    let c_fit = num / den;
    let fit_residual = values
        .iter()
        .map(|(z, s)| (s - c_fit / (z * z)).norm())
        .fold(0.0, f64::max);
    Ok(HomogeneityReport {
        deviation,
        c_fit,
        fit_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RiccatiSolutionCheck {
    pub c: Complex64,
    /// Roots of `c0² + 2c0 + 2c = 0`.
    pub roots: [Complex64; 2],
    pub double_root: bool,
    /// `max |u′ − u²/2 − c/z²|` for `u = c0/z` at test points, per root.
    pub residuals: [f64; 2],
}

/// Checks that `u = c0/z` solves `u′ − u²/2 = c/z²` for both admissible `c0`.
pub fn riccati_general_solution_check(c: Complex64) -> RiccatiSolutionCheck {
    let disc = (1.0 - 2.0 * c).sqrt();
    let roots = [-1.0 + disc, -1.0 - disc];
    let points: Vec<Complex64> = (0..12)
        .map(|k| Complex64::from_polar(0.5 + 0.1 * k as f64, 0.7 * k as f64))
        .collect();
    let residual = |c0: Complex64| {
        points
            .iter()
            .map(|&z| {
                let u = c0 / z;
                let du = -c0 / (z * z);
                (du - 0.5 * u * u - c / (z * z)).norm()
            })
            .fold(0.0, f64::max)
    };
    RiccatiSolutionCheck {
        c,
        roots,
        double_root: disc.norm() < 1e-12,
        residuals: [residual(roots[0]), residual(roots[1])],
    }
}

/// `dz̄/ds` for counterclockwise traversal at a sample.
fn dzbar_ds_ccw(curve: &AnalyticCurve, p: &crate::geometry::CurvePoint) -> Complex64 {
    match curve.orientation() {
        Orientation::CounterClockwise => p.dzbar_ds(),
        Orientation::Clockwise => -p.dzbar_ds(),
    }
}

/// `max |S(z) − iλ√S′(z) − c/z|` on the curve. On the curve `S = z̄` and
/// `√S′ = dz̄/ds` (counterclockwise branch).
pub fn droplet_residual(curve: &AnalyticCurve, lambda: f64, c: f64) -> Result<f64> {
    if !curve.encloses(Complex64::new(0.0, 0.0)) {
        return Err(Error::InvalidInput("the origin must lie inside the curve".into()));
    }
    Ok(curve
        .samples()
        .iter()
        .map(|p| (p.z.conj() - I * lambda * dzbar_ds_ccw(curve, p) - c / p.z).norm())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct DropletSearch {
    pub best_lambda: f64,
    pub best_c: f64,
    pub min_residual: f64,
}

/// Smallest droplet residual over a 50×50 grid: `λ` log-spaced on
/// `[1e−3, 10]·R` and `c` log-spaced in modulus on `[1e−3, 10]·R²` with
/// both signs, `R` the mean distance of the curve from the origin.
pub fn droplet_grid_search(curve: &AnalyticCurve) -> Result<DropletSearch> {
    let r = curve.samples().iter().map(|p| p.z.norm()).sum::<f64>() / curve.samples().len() as f64;
    let logspace = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    };
    let lambdas: Vec<f64> = logspace(1e-3 * r, 10.0 * r, 50);
    let mut cs: Vec<f64> = logspace(1e-3 * r * r, 10.0 * r * r, 25);
    cs.extend(cs.clone().into_iter().map(|c| -c));
    let mut best = DropletSearch {
        best_lambda: f64::NAN,
        best_c: f64::NAN,
        min_residual: f64::INFINITY,
    };
    for &l in &lambdas {
        for &c in &cs {
            let res = droplet_residual(curve, l, c)?;
            if res < best.min_residual {
                best = DropletSearch {
                    best_lambda: l,
                    best_c: c,
                    min_residual: res,
                };
            }
        }
    }
    Ok(best)
}

/// `max |p z̄ − i t dz̄/ds − F(z)|` on the curve, with `dz̄/ds` in the curve's
/// own orientation.
pub fn fbp_residual(curve: &AnalyticCurve, p: f64, t: f64, f: &dyn Fn(Complex64) -> Complex64) -> f64 {
    curve
        .samples()
        .iter()
        .map(|s| (p * s.z.conj() - I * t * s.dzbar_ds() - f(s.z)).norm())
        .fold(0.0, f64::max)
}

/// Default order for Schwarz-function series.
pub const SCHWARZ_ORDER: usize = DEFAULT_ORDER;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::LaurentSum;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(r: f64, o: Orientation) -> AnalyticCurve {
        AnalyticCurve::circle(c(0.0, 0.0), r, o).unwrap()
    }

    #[test]
    fn circle_schwarz_function() {
        for r in [1.0, 10.0] {
            let s = schwarz_series(&circle(r, Orientation::CounterClockwise), 0.3, SCHWARZ_ORDER).unwrap();
            for z in [c(r * 0.9, r * 0.2), Complex64::from_polar(r, 0.5)] {
                assert!((s.eval(z) - r * r / z).norm() < 1e-8 * r);
            }
            assert!(s.curve_residual() < 1e-8 * r);
        }
    }

    #[test]
    fn ellipse_schwarz_function() {
        let e = AnalyticCurve::ellipse(c(0.0, 0.0), 1.0, 0.6, Orientation::CounterClockwise).unwrap();
        let s = schwarz_series(&e, std::f64::consts::FRAC_PI_2, SCHWARZ_ORDER).unwrap();
        assert!(s.curve_residual() < 1e-6);
        assert!(s.radius > 0.1);
    }

    #[test]
    fn riccati_on_annulus_circles() {
        let qd = QuadraticDifferential::new(LaurentSum::single(c(-0.5, 0.0), c(0.0, 0.0), -2));
        let outer = schwarz_series(&circle(1.0, Orientation::CounterClockwise), 0.0, 32).unwrap();
        let rep = riccati_residual(&outer, 0.5, alpha_for(0), &qd).unwrap();
        assert!(rep.residual < 1e-10 && !rep.branch_flipped);
        let inner = schwarz_series(&circle(0.5, Orientation::Clockwise), 1.0, 32).unwrap();
        assert!((inner.dzbar_ds - (-I * 0.5 / inner.center)).norm() < 1e-12);
        let rep = riccati_residual(&inner, 0.5, alpha_for(1), &qd).unwrap();
        assert!(rep.residual < 1e-10 && !rep.branch_flipped);
    }

    #[test]
    fn riccati_flags_branch_flip() {
        let qd = QuadraticDifferential::new(LaurentSum::single(c(-0.5, 0.0), c(0.0, 0.0), -2));
        let outer = schwarz_series(&circle(1.0, Orientation::CounterClockwise), 0.0, 32).unwrap();
        // With the wrong α only the opposite branch satisfies the identity.
        let rep = riccati_residual(&outer, 0.5, 1.0, &qd).unwrap();
        assert!(rep.branch_flipped && rep.residual < 1e-10);
    }

    #[test]
    fn schwarzian_examples() {
        // z² about 1: −3/(2z²)
        let f = Series::from_real(&[1.0, 2.0, 1.0], 24);
        let s = schwarzian(&f).unwrap();
        for h in [c(0.1, 0.0), c(0.0, -0.2)] {
            let z = 1.0 + h;
            assert!((s.eval(h) + 1.5 / (z * z)).norm() < 1e-10);
        }
        // log z about 1: 1/(2z²)
        let mut coeffs = vec![0.0];
        coeffs.extend((1..30).map(|k| if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64));
        let s = schwarzian(&Series::from_real(&coeffs, 30)).unwrap();
        let h = c(0.05, 0.05);
        assert!((s.eval(h) - 0.5 / ((1.0 + h) * (1.0 + h))).norm() < 1e-10);
        assert!(schwarzian(&Series::from_real(&[0.0, 0.0, 1.0], 8)).is_err());
    }

    #[test]
    fn numeric_schwarzian_of_power() {
        for m in [2, 3, -1] {
            let f = move |z: Complex64| z.powi(m);
            let z = c(0.8, 0.3);
            let s = schwarzian_numeric(&f, z, 0.1).unwrap();
            let expect = (1.0 - (m * m) as f64) / (2.0 * z * z);
            assert!((s - expect).norm() < 1e-9, "m = {m}");
        }
    }

    #[test]
    fn homogeneity() {
        let pts = [c(1.0, 0.2), c(0.7, -0.5), c(-0.9, 0.4)];
        let f = |z: Complex64| z.powi(3);
        let r = homogeneity_check(&f, c(0.6, 0.3), &pts, 0.05).unwrap();
        assert!(r.deviation < 1e-8);
        assert_abs_diff_eq!(r.c_fit.re, -4.0, epsilon = 1e-8);
        let mob = |z: Complex64| 1.0 / z + 0.3;
        let r = homogeneity_check(&mob, c(1.5, 0.0), &pts, 0.05).unwrap();
        assert!(r.c_fit.norm() < 1e-8);
    }

    #[test]
    fn riccati_general_solution() {
        let chk = riccati_general_solution_check(c(0.0, 0.0));
        assert!(chk.roots.contains(&c(0.0, 0.0)) && chk.roots.contains(&c(-2.0, 0.0)));
        let chk = riccati_general_solution_check(c(0.5, 0.0));
        assert!(chk.double_root);
        assert!((chk.roots[0] + 1.0).norm() < 1e-12);
        let chk = riccati_general_solution_check(c(1.5, 0.0));
        assert!((chk.roots[0] - c(-1.0, 2f64.sqrt())).norm() < 1e-12);
        assert!(chk.residuals.iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn droplet_on_circles() {
        let unit = circle(1.0, Orientation::CounterClockwise);
        assert!(droplet_residual(&unit, 1.0, 0.0).unwrap() < 1e-10);
        assert!(droplet_residual(&unit, 0.5, 0.5).unwrap() < 1e-10);
        let off = AnalyticCurve::circle(c(3.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap();
        assert!(droplet_residual(&off, 1.0, 0.0).is_err());
    }

    #[test]
    fn fbp_specializations() {
        let r = 1.5;
        let circ = circle(r, Orientation::CounterClockwise);
        assert!(fbp_residual(&circ, 1.0, 0.0, &|z| r * r / z) < 1e-10);
        assert!(fbp_residual(&circ, 0.0, 1.0, &|z| -r / z) < 1e-10);
        assert!(fbp_residual(&circ, 1.0, r, &|_| c(0.0, 0.0)) < 1e-10);
    }
}
