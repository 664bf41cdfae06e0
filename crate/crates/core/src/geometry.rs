//! Boundary curves and finitely-connected domains.
//!
//! A boundary component is a closed curve `z(t) = Σ_{j=j_min}^{j_max} a_j e^{ijt}`,
//! `t ∈ [0, 2π)`. Components are oriented with the domain on their left:
//! the outer curve runs counterclockwise and every inner curve clockwise.
//!
//! **Curvature sign.** [`CurvePoint::curvature`] returns
//! `κ = −i (d²z̄/ds²)/(dz̄/ds)`, which is the *negative* of the usual signed
//! curvature. A counterclockwise circle of radius `R` has `κ = −1/R`, a
//! clockwise one `κ = +1/R`; hence `∮κ ds = −2π` on the outer component and
//! `+2π` on every inner one.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::I;

/// Degree the curve representation is padded to when choosing sample counts.
pub const DEFAULT_DEGREE: usize = 32;

const IMMERSION_TOL: f64 = 1e-10;
const SIMPLICITY_TOL: f64 = 1e-9;
const WINDING_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }
}

/// Position and first two `t`-derivatives of a curve at one parameter value.
#[derive(Clone, Copy, Debug)]
pub struct CurvePoint {
    pub t: f64,
    pub z: Complex64,
    pub dz: Complex64,
    pub d2z: Complex64,
}

impl CurvePoint {
    /// `|z′(t)| = ds/dt`.
    pub fn speed(&self) -> f64 {
        self.dz.norm()
    }

    /// Unit tangent `τ = dz/ds`.
    pub fn tangent(&self) -> Complex64 {
        self.dz / self.dz.norm()
    }

    /// Exterior unit normal `−iτ` (points out of the domain for both
    /// orientations).
    pub fn normal(&self) -> Complex64 {
        -I * self.tangent()
    }

    pub fn dzbar_ds(&self) -> Complex64 {
        self.dz.conj() / self.dz.norm()
    }

    /// `d²z̄/ds²` by the chain rule from the `t` derivatives.
    pub fn d2zbar_ds2(&self) -> Complex64 {
        let speed = self.dz.norm();
        let dspeed = (self.dz.conj() * self.d2z).re / speed;
        (self.d2z.conj() / speed - self.dz.conj() * dspeed / (speed * speed)) / speed
    }

    /// `κ = −i (d²z̄/ds²)/(dz̄/ds)` as a complex number; the imaginary part is
    /// zero up to rounding.
    pub fn curvature_complex(&self) -> Complex64 {
        -I * self.d2zbar_ds2() / self.dzbar_ds()
    }

    /// Signed curvature in the convention described in the module docs.
    pub fn curvature(&self) -> f64 {
        self.curvature_complex().re
    }
}

/// A closed analytic curve given by a truncated Fourier series.
#[derive(Clone, Debug)]
pub struct AnalyticCurve {
    j_min: i32,
    coeffs: Vec<Complex64>,
    orientation: Orientation,
    samples: Vec<CurvePoint>,
}

impl PartialEq for AnalyticCurve {
    fn eq(&self, other: &Self) -> bool {
        self.j_min == other.j_min && self.coeffs == other.coeffs
    }
}

impl AnalyticCurve {
    /// Builds a curve from Fourier coefficients; `coeffs[0]` multiplies
    /// `e^{i j_min t}`. The orientation is read off the signed area.
    pub fn new(j_min: i32, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_samples(j_min, coeffs, None)
    }

    /// As [`AnalyticCurve::new`] with an explicit sample-grid size.
    pub fn with_samples(j_min: i32, coeffs: Vec<Complex64>, m: Option<usize>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidCurve("no Fourier coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidCurve("non-finite Fourier coefficient".into()));
        }
        let mut curve = AnalyticCurve {
            j_min,
            coeffs,
            orientation: Orientation::CounterClockwise,
            samples: Vec::new(),
        };
        let degree = curve.degree();
        let m = m.unwrap_or(16 * degree.max(DEFAULT_DEGREE));
        if m < 8 * degree.max(1) {
            return Err(Error::InvalidCurve(format!(
                "{m} samples is below 8·J = {}",
                8 * degree
            )));
        }
        let signed_area = curve.signed_area();
        if signed_area.abs() < 1e-14 {
            return Err(Error::InvalidCurve("curve encloses no area".into()));
        }
        curve.orientation = if signed_area > 0.0 {
            Orientation::CounterClockwise
        } else {
            Orientation::Clockwise
        };
        curve.samples = (0..m).map(|i| curve.point(TAU * i as f64 / m as f64)).collect();
        curve.validate()?;
        Ok(curve)
    }

    /// Circle `center + radius·e^{±it}`.
    pub fn circle(center: Complex64, radius: f64, orientation: Orientation) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidCurve(format!("circle radius {radius} must be positive")));
        }
        let r = Complex64::new(radius, 0.0);
        match orientation {
            Orientation::CounterClockwise => Self::new(0, vec![center, r]),
            Orientation::Clockwise => Self::new(-1, vec![r, center]),
        }
    }

    /// Axis-aligned ellipse `center + a cos t ± i b sin t`.
    pub fn ellipse(center: Complex64, a: f64, b: f64, orientation: Orientation) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidCurve("ellipse semi-axes must be positive".into()));
        }
        let sign = orientation.sign();
        // a cos t + i s b sin t = ((a - s b)/2) e^{-it} + ((a + s b)/2) e^{it}
        let minus = Complex64::new((a - sign * b) / 2.0, 0.0);
        let plus = Complex64::new((a + sign * b) / 2.0, 0.0);
        Self::new(-1, vec![minus, center, plus])
    }

    /// Fourier-fits a smooth closed parametrization with `|j| ≤ degree`.
    pub fn from_parametrization(f: impl Fn(f64) -> Complex64, degree: usize) -> Result<Self> {
        let n = 4 * degree.max(DEFAULT_DEGREE);
        let values: Vec<Complex64> = (0..n).map(|i| f(TAU * i as f64 / n as f64)).collect();
        let dj = degree as i32;
        let coeffs = (-dj..=dj)
            .map(|j| {
                values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| v * Complex64::cis(-(j as f64) * TAU * i as f64 / n as f64))
                    .sum::<Complex64>()
                    / n as f64
            })
            .collect();
        Self::new(-dj, coeffs)
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_min + self.coeffs.len() as i32 - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `J = max |j|` over the stored coefficient range.
    pub fn degree(&self) -> usize {
        self.j_min.unsigned_abs().max(self.j_max().unsigned_abs()) as usize
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Cached equispaced-in-`t` sample grid.
    pub fn samples(&self) -> &[CurvePoint] {
        &self.samples
    }

    fn terms(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, a)| ((self.j_min + k as i32) as f64, *a))
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.derivative(t, 0)
    }

    /// `d^k z / dt^k` at `t`.
    pub fn derivative(&self, t: f64, k: u32) -> Complex64 {
        self.terms()
            .map(|(j, a)| a * (I * j).powu(k) * Complex64::cis(j * t))
            .sum()
    }

    pub fn point(&self, t: f64) -> CurvePoint {
        let mut p = CurvePoint {
            t,
            z: Complex64::new(0.0, 0.0),
            dz: Complex64::new(0.0, 0.0),
            d2z: Complex64::new(0.0, 0.0),
        };
        for (j, a) in self.terms() {
            let e = a * Complex64::cis(j * t);
            p.z += e;
            p.dz += e * I * j;
            p.d2z -= e * j * j;
        }
        p
    }

    /// `(1/2i)∮ z̄ dz = π Σ j |a_j|²`: positive for counterclockwise curves.
    pub fn signed_area(&self) -> f64 {
        PI * self.terms().map(|(j, a)| j * a.norm_sqr()).sum::<f64>()
    }

    /// Perimeter by the spectrally accurate periodic trapezoid rule.
    pub fn length(&self) -> f64 {
        let m = self.samples.len() as f64;
        self.samples.iter().map(CurvePoint::speed).sum::<f64>() * TAU / m
    }

    /// Tangent and curvature at a parameter value.
    pub fn tangent_and_curvature(&self, t: f64) -> (Complex64, f64) {
        let p = self.point(t);
        (p.tangent(), p.curvature())
    }

    /// `∮ κ ds` on the cached grid.
    pub fn total_curvature(&self) -> f64 {
        let m = self.samples.len() as f64;
        self.samples
            .iter()
            .map(|p| p.curvature() * p.speed())
            .sum::<f64>()
            * TAU
            / m
    }

    /// Curve shifted by `dt` in parameter: `z(t + dt)`.
    pub fn reparametrized(&self, dt: f64) -> Result<Self> {
        let coeffs = self.terms().map(|(j, a)| a * Complex64::cis(j * dt)).collect();
        Self::with_samples(self.j_min, coeffs, Some(self.samples.len()))
    }

    /// Same curve with the coefficient range padded by `extra` zeros per side.
    pub fn zero_padded(&self, extra: usize) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        let mut coeffs = vec![zero; extra];
        coeffs.extend_from_slice(&self.coeffs);
        coeffs.extend(std::iter::repeat_n(zero, extra));
        Self::with_samples(self.j_min - extra as i32, coeffs, Some(self.samples.len()))
    }

    /// Image under an affine map `z ↦ a z + b` (`a ≠ 0`).
    pub fn affine(&self, a: Complex64, b: Complex64) -> Result<Self> {
        let coeffs = self
            .terms()
            .map(|(j, c)| if j == 0.0 { a * c + b } else { a * c })
            .collect();
        Self::with_samples(self.j_min, coeffs, Some(self.samples.len()))
    }

    /// Area centroid of the region the curve encloses (sampled polygon).
    pub fn enclosed_centroid(&self) -> Complex64 {
        polygon_centroid(&self.polygon())
    }

    pub fn polygon(&self) -> Vec<Complex64> {
        self.samples.iter().map(|p| p.z).collect()
    }

    /// Winding number of the sampled polygon around `w`.
    pub fn winding_number(&self, w: Complex64) -> i32 {
        winding_number(&self.polygon(), w)
    }

    /// Encloses `w` (independent of orientation).
    pub fn encloses(&self, w: Complex64) -> bool {
        self.winding_number(w) != 0
    }

    pub fn distance_to(&self, w: Complex64) -> f64 {
        let poly = self.polygon();
        let n = poly.len();
        (0..n)
            .map(|i| segment_distance(w, poly[i], poly[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    fn diameter_scale(&self) -> f64 {
        let c = self.coeffs[(-self.j_min).clamp(0, self.coeffs.len() as i32 - 1) as usize];
        2.0 * self
            .samples
            .iter()
            .map(|p| (p.z - c).norm())
            .fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        let scale = self.diameter_scale();
        if let Some(p) = self.samples.iter().find(|p| p.speed() < IMMERSION_TOL * scale.max(1.0)) {
            return Err(Error::InvalidCurve(format!(
                "curve is not immersed: |z'(t)| = {:.3e} at t = {:.6}",
                p.speed(),
                p.t
            )));
        }
        // Winding of z'(t) over one period.
        let mut turn = 0.0;
        let n = self.samples.len();
        for i in 0..n {
            let a = self.samples[i].dz;
            let b = self.samples[(i + 1) % n].dz;
            turn += (b / a).arg();
        }
        let winding = (turn / TAU).round() as i32;
        let expected = self.orientation.sign() as i32;
        if winding != expected {
            return Err(Error::InvalidCurve(format!(
                "tangent winding number {winding} does not match the {:?} orientation",
                self.orientation
            )));
        }
        if let Some((i, j)) = self_intersection(&self.polygon(), SIMPLICITY_TOL * scale) {
            return Err(Error::InvalidCurve(format!(
                "curve is not simple: segments {i} and {j} intersect"
            )));
        }
        Ok(())
    }
}

/// Monotone map from parameter `t` to arc length `s`.
#[derive(Clone, Debug)]
pub struct ArcLengthTable {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub length: f64,
    /// Fourier coefficients of the speed `|z′(t)|`, indices `−K..=K`.
    speed_coeffs: Vec<Complex64>,
}

impl ArcLengthTable {
    /// Arc length at an arbitrary parameter value in `[0, 2π]`.
    pub fn s_at(&self, t: f64) -> f64 {
        let k_max = (self.speed_coeffs.len() / 2) as i32;
        let mut s = self.speed_coeffs[k_max as usize].re * t;
        for (idx, c) in self.speed_coeffs.iter().enumerate() {
            let k = idx as i32 - k_max;
            if k == 0 {
                continue;
            }
            let k = k as f64;
            s += (c * (Complex64::cis(k * t) - 1.0) / (I * k)).re;
        }
        s
    }

    /// Parameter value at arc length `s` (Newton on `s_at`).
    pub fn t_at(&self, s: f64) -> f64 {
        let mut t = TAU * s / self.length;
        let k_max = (self.speed_coeffs.len() / 2) as i32;
        for _ in 0..50 {
            let speed: f64 = self
                .speed_coeffs
                .iter()
                .enumerate()
                .map(|(idx, c)| (c * Complex64::cis((idx as i32 - k_max) as f64 * t)).re)
                .sum();
            let step = (self.s_at(t) - s) / speed;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        t
    }
}

/// Arc-length table of a curve on an `m`-point grid; `m ≥ 8J`.
pub fn arc_length_table(curve: &AnalyticCurve, m: usize) -> Result<ArcLengthTable> {
    let degree = curve.degree().max(1);
    if m < 8 * degree {
        return Err(Error::InvalidInput(format!(
            "arc-length table needs at least 8J = {} samples, got {m}",
            8 * degree
        )));
    }
    let t: Vec<f64> = (0..m).map(|i| TAU * i as f64 / m as f64).collect();
    let speed: Vec<f64> = t.iter().map(|&ti| curve.derivative(ti, 1).norm()).collect();
    let scale = speed.iter().cloned().fold(0.0, f64::max);
    if let Some(i) = speed.iter().position(|&v| v < IMMERSION_TOL * scale.max(1.0)) {
        return Err(Error::InvalidCurve(format!(
            "curve is not immersed near t = {:.6}",
            t[i]
        )));
    }
    let k_max = (m / 2 - 1) as i32;
    let speed_coeffs: Vec<Complex64> = (-k_max..=k_max)
        .map(|k| {
            t.iter()
                .zip(&speed)
                .map(|(&ti, &v)| v * Complex64::cis(-(k as f64) * ti))
                .sum::<Complex64>()
                / m as f64
        })
        .collect();
    let length = speed_coeffs[k_max as usize].re * TAU;
    let mut table = ArcLengthTable {
        t: Vec::with_capacity(m + 1),
        s: Vec::with_capacity(m + 1),
        length,
        speed_coeffs,
    };
    for &ti in t.iter().chain(std::iter::once(&TAU)) {
        let s = table.s_at(ti);
        table.t.push(ti);
        table.s.push(s);
    }
    Ok(table)
}

/// A bounded domain with one outer and `n − 1` inner analytic boundary curves.
///
/// `hole_points[k]` lies inside the `k`-th hole. The unbounded complementary
/// component is represented by the point at infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarDomain {
    outer: AnalyticCurve,
    inners: Vec<AnalyticCurve>,
    hole_points: Vec<Complex64>,
}

impl PlanarDomain {
    /// Validates and assembles a domain. Missing hole points default to the
    /// area centroid of each hole.
    pub fn new(
        outer: AnalyticCurve,
        inners: Vec<AnalyticCurve>,
        hole_points: Option<Vec<Complex64>>,
    ) -> Result<Self> {
        if outer.orientation() != Orientation::CounterClockwise {
            return Err(Error::InvalidDomain(
                "outer curve must be counterclockwise (orientation misconfiguration)".into(),
            ));
        }
        for (k, c) in inners.iter().enumerate() {
            if c.orientation() != Orientation::Clockwise {
                return Err(Error::InvalidDomain(format!(
                    "inner curve {k} must be clockwise (orientation misconfiguration)"
                )));
            }
        }
        let hole_points = match hole_points {
            Some(p) => p,
            None => inners.iter().map(AnalyticCurve::enclosed_centroid).collect(),
        };
        if hole_points.len() != inners.len() {
            return Err(Error::InvalidDomain(format!(
                "{} hole points for {} inner curves",
                hole_points.len(),
                inners.len()
            )));
        }
        let domain = PlanarDomain {
            outer,
            inners,
            hole_points,
        };
        domain.validate()?;
        Ok(domain)
    }

    pub fn disk(center: Complex64, radius: f64) -> Result<Self> {
        Self::new(
            AnalyticCurve::circle(center, radius, Orientation::CounterClockwise)?,
            vec![],
            None,
        )
    }

    /// Concentric annulus `r_inner < |z − center| < r_outer`.
    pub fn annulus(center: Complex64, r_outer: f64, r_inner: f64) -> Result<Self> {
        Self::new(
            AnalyticCurve::circle(center, r_outer, Orientation::CounterClockwise)?,
            vec![AnalyticCurve::circle(center, r_inner, Orientation::Clockwise)?],
            Some(vec![center]),
        )
    }

    /// Interior of the ellipse with semi-axes `a` (real) and `b` (imaginary).
    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        Self::new(
            AnalyticCurve::ellipse(Complex64::new(0.0, 0.0), a, b, Orientation::CounterClockwise)?,
            vec![],
            None,
        )
    }

    pub fn outer(&self) -> &AnalyticCurve {
        &self.outer
    }

    pub fn inners(&self) -> &[AnalyticCurve] {
        &self.inners
    }

    pub fn hole_points(&self) -> &[Complex64] {
        &self.hole_points
    }

    /// Connectivity `n = 1 + #inners`.
    pub fn connectivity(&self) -> usize {
        1 + self.inners.len()
    }

    /// Boundary components in order `Γ_1` (outer), `Γ_2, …`.
    pub fn components(&self) -> impl Iterator<Item = &AnalyticCurve> + '_ {
        std::iter::once(&self.outer).chain(self.inners.iter())
    }

    /// `z ∈ Ω` for the sampled polygons.
    pub fn contains(&self, z: Complex64) -> bool {
        self.outer.encloses(z) && !self.inners.iter().any(|c| c.encloses(z))
    }

    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        self.components()
            .map(|c| c.distance_to(z))
            .fold(f64::INFINITY, f64::min)
    }

    /// Area centroid `(1/A)∫_Ω z dA = (1/2iA)∮ z̄ z dz`.
    pub fn centroid(&self) -> Complex64 {
        let mut moment = Complex64::new(0.0, 0.0);
        for c in self.components() {
            let m = c.samples().len() as f64;
            moment += c
                .samples()
                .iter()
                .map(|p| p.z.conj() * p.z * p.dz)
                .sum::<Complex64>()
                * (TAU / m)
                / (2.0 * I);
        }
        let (area, _) = area_perimeter(self);
        moment / area
    }

    /// Largest distance from the centroid to the outer boundary.
    pub fn radius(&self) -> f64 {
        let c = self.centroid();
        self.outer
            .samples()
            .iter()
            .map(|p| (p.z - c).norm())
            .fold(0.0, f64::max)
    }

    /// `(x_min, x_max, y_min, y_max)` of the outer curve samples.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.outer.samples().iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(x0, x1, y0, y1), p| (x0.min(p.z.re), x1.max(p.z.re), y0.min(p.z.im), y1.max(p.z.im)),
        )
    }

    /// Points of a uniform grid over the bounding box that lie in `Ω` at
    /// distance at least `margin` from the boundary; about `target` of them.
    pub fn interior_grid(&self, target: usize, margin: f64) -> Vec<Complex64> {
        let (x0, x1, y0, y1) = self.bounding_box();
        let (area, _) = area_perimeter(self);
        let h = (area / target.max(1) as f64).sqrt().min((x1 - x0).min(y1 - y0) / 4.0);
        let nx = ((x1 - x0) / h).ceil() as usize;
        let ny = ((y1 - y0) / h).ceil() as usize;
        let mut points = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let z = Complex64::new(
                    x0 + (ix as f64 + 0.5) * (x1 - x0) / nx as f64,
                    y0 + (iy as f64 + 0.5) * (y1 - y0) / ny as f64,
                );
                if self.contains(z) && self.distance_to_boundary(z) >= margin {
                    points.push(z);
                }
            }
        }
        points
    }

    /// Image under `z ↦ a z + b`.
    pub fn affine(&self, a: Complex64, b: Complex64) -> Result<Self> {
        let outer = self.outer.affine(a, b)?;
        let inners = self
            .inners
            .iter()
            .map(|c| c.affine(a, b))
            .collect::<Result<Vec<_>>>()?;
        let holes = self.hole_points.iter().map(|p| a * p + b).collect();
        Self::new(outer, inners, Some(holes))
    }

    fn validate(&self) -> Result<()> {
        let curves: Vec<&AnalyticCurve> = self.components().collect();
        let polys: Vec<Vec<Complex64>> = curves.iter().map(|c| c.polygon()).collect();
        let scale = self.outer.diameter_scale();
        for i in 0..polys.len() {
            for j in i + 1..polys.len() {
                if polygons_intersect(&polys[i], &polys[j], SIMPLICITY_TOL * scale) {
                    return Err(Error::InvalidDomain(format!(
                        "boundary components {} and {} intersect",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (k, inner) in self.inners.iter().enumerate() {
            if !self.outer.encloses(inner.samples()[0].z) {
                return Err(Error::InvalidDomain(format!(
                    "inner curve {} is not inside the outer curve",
                    k + 2
                )));
            }
            for (l, other) in self.inners.iter().enumerate() {
                if l != k && other.encloses(inner.samples()[0].z) {
                    return Err(Error::InvalidDomain(format!(
                        "inner curve {} is nested inside inner curve {}",
                        k + 2,
                        l + 2
                    )));
                }
            }
            let a = self.hole_points[k];
            if !inner.encloses(a) {
                return Err(Error::InvalidDomain(format!(
                    "hole point {a} is not inside hole {}",
                    k + 2
                )));
            }
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: DomainFile = serde_json::from_str(text)?;
        file.into_domain()
    }

    pub fn to_file(&self) -> DomainFile {
        DomainFile {
            outer: CurveFile::from(&self.outer),
            inners: self.inners.iter().map(CurveFile::from).collect(),
            hole_points: Some(self.hole_points.iter().map(|p| [p.re, p.im]).collect()),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("domain serializes") + "\n"
    }
}

/// `(Area(Ω), Perimeter(∂Ω))`.
pub fn area_perimeter(domain: &PlanarDomain) -> (f64, f64) {
    let area = domain.components().map(AnalyticCurve::signed_area).sum();
    let perimeter = domain.components().map(AnalyticCurve::length).sum();
    (area, perimeter)
}

/// Checked variant of [`area_perimeter`] that rejects non-positive area.
pub fn checked_area_perimeter(domain: &PlanarDomain) -> Result<(f64, f64)> {
    let (a, p) = area_perimeter(domain);
    if !(a > 0.0) {
        return Err(Error::InvalidDomain(format!(
            "non-positive area {a}: orientation misconfiguration"
        )));
    }
    Ok((a, p))
}

pub fn tangent_and_curvature(curve: &AnalyticCurve, t: f64) -> (Complex64, f64) {
    curve.tangent_and_curvature(t)
}

/// `∮_{Γ_k} κ ds` for every component; `−2π` on the outer curve and `+2π` on
/// the inner ones, checked to `1e−8`.
pub fn winding_check(domain: &PlanarDomain) -> Result<Vec<f64>> {
    let totals: Vec<f64> = domain.components().map(AnalyticCurve::total_curvature).collect();
    for (k, &total) in totals.iter().enumerate() {
        let expected = if k == 0 { -TAU } else { TAU };
        if (total - expected).abs() > WINDING_TOL {
            return Err(Error::CheckFailed(format!(
                "component {} has total curvature {total:.12}, expected {expected:.12}",
                k + 1
            )));
        }
    }
    Ok(totals)
}

/// Serialized curve: `coeffs[0]` multiplies `e^{i j_min t}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CurveFile {
    pub coeffs: Vec<[f64; 2]>,
    pub j_min: i32,
}

impl From<&AnalyticCurve> for CurveFile {
    fn from(c: &AnalyticCurve) -> Self {
        CurveFile {
            coeffs: c.coeffs().iter().map(|a| [a.re, a.im]).collect(),
            j_min: c.j_min(),
        }
    }
}

impl CurveFile {
    pub fn into_curve(&self) -> Result<AnalyticCurve> {
        AnalyticCurve::new(
            self.j_min,
            self.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
        )
    }
}

/// Domain description file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DomainFile {
    pub outer: CurveFile,
    #[serde(default)]
    pub inners: Vec<CurveFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_points: Option<Vec<[f64; 2]>>,
}

impl DomainFile {
    pub fn into_domain(&self) -> Result<PlanarDomain> {
        let outer = self.outer.into_curve()?;
        let inners = self
            .inners
            .iter()
            .map(CurveFile::into_curve)
            .collect::<Result<Vec<_>>>()?;
        let holes = self
            .hole_points
            .as_ref()
            .map(|v| v.iter().map(|&[re, im]| Complex64::new(re, im)).collect());
        PlanarDomain::new(outer, inners, holes)
    }
}

pub(crate) fn winding_number(poly: &[Complex64], w: Complex64) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i] - w;
        let b = poly[(i + 1) % n] - w;
        if a.im <= 0.0 {
            if b.im > 0.0 && cross(a, b) > 0.0 {
                wn += 1;
            }
        } else if b.im <= 0.0 && cross(a, b) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

pub(crate) fn segment_distance(w: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (w - a).norm();
    }
    let s = (((w - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (w - (a + ab * s)).norm()
}

fn segments_touch(a: Complex64, b: Complex64, c: Complex64, d: Complex64, tol: f64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    segment_distance(c, a, b) < tol
        || segment_distance(d, a, b) < tol
        || segment_distance(a, c, d) < tol
        || segment_distance(b, c, d) < tol
}

fn self_intersection(poly: &[Complex64], tol: f64) -> Option<(usize, usize)> {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_touch(a, b, poly[j], poly[(j + 1) % n], tol) {
                return Some((i, j));
            }
        }
    }
    None
}

fn polygons_intersect(p: &[Complex64], q: &[Complex64], tol: f64) -> bool {
    let (n, m) = (p.len(), q.len());
    (0..n).any(|i| {
        (0..m).any(|j| segments_touch(p[i], p[(i + 1) % n], q[j], q[(j + 1) % m], tol))
    })
}

fn polygon_centroid(poly: &[Complex64]) -> Complex64 {
    let n = poly.len();
    let mut area = 0.0;
    let mut c = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let w = cross(a, b);
        area += w;
        c += (a + b) * w;
    }
    c / (3.0 * area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_lengths() {
        let unit = AnalyticCurve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap();
        assert_abs_diff_eq!(arc_length_table(&unit, 64).unwrap().length, TAU, epsilon = 1e-13);
        let half = AnalyticCurve::circle(c(0.3, 0.1), 0.5, Orientation::Clockwise).unwrap();
        assert_abs_diff_eq!(arc_length_table(&half, 64).unwrap().length, PI, epsilon = 1e-13);
    }

    #[test]
    fn arc_length_is_monotone_and_inverts() {
        let e = AnalyticCurve::ellipse(c(0.0, 0.0), 1.0, 0.6, Orientation::CounterClockwise).unwrap();
        let table = arc_length_table(&e, 256).unwrap();
        assert!(table.s.windows(2).all(|w| w[1] > w[0]));
        assert_abs_diff_eq!(table.s[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(*table.s.last().unwrap(), table.length, epsilon = 1e-12);
        let t = table.t_at(1.234);
        assert_abs_diff_eq!(table.s_at(t), 1.234, epsilon = 1e-12);
    }

    #[test]
    fn too_few_samples_rejected() {
        let e = AnalyticCurve::ellipse(c(0.0, 0.0), 1.0, 0.6, Orientation::CounterClockwise).unwrap();
        let padded = e.zero_padded(3).unwrap();
        assert!(arc_length_table(&padded, 16).is_err());
    }

    #[test]
    fn non_immersed_curve_rejected() {
        // z = e^{it} + e^{2it}/2 has a cusp where z' = 0 (t = π).
        let err = AnalyticCurve::new(1, vec![c(1.0, 0.0), c(0.5, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidCurve(_)), "{err}");
    }

    #[test]
    fn self_intersecting_curve_rejected() {
        // Limaçon-type loop with an inner loop.
        let err = AnalyticCurve::new(1, vec![c(1.0, 0.0), c(1.2, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidCurve(_)), "{err}");
    }

    #[test]
    fn domain_areas() {
        let (a, p) = area_perimeter(&PlanarDomain::disk(c(0.0, 0.0), 1.0).unwrap());
        assert_abs_diff_eq!(a, PI, epsilon = 1e-13);
        assert_abs_diff_eq!(p, TAU, epsilon = 1e-13);
        let (a, p) = area_perimeter(&PlanarDomain::annulus(c(0.0, 0.0), 1.0, 0.5).unwrap());
        assert_abs_diff_eq!(a, 0.75 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(p, 3.0 * PI, epsilon = 1e-13);
        let (a, _) = area_perimeter(&PlanarDomain::ellipse(1.0, 0.6).unwrap());
        assert_abs_diff_eq!(a, 0.6 * PI, epsilon = 1e-10);
    }

    #[test]
    fn curvature_convention_on_circles() {
        for r in [0.25, 1.0, 3.0] {
            let ccw = AnalyticCurve::circle(c(0.2, -0.1), r, Orientation::CounterClockwise).unwrap();
            let cw = AnalyticCurve::circle(c(0.2, -0.1), r, Orientation::Clockwise).unwrap();
            for t in [0.0, 0.7, 2.9, 5.1] {
                let p = ccw.point(t);
                let standard = (p.dz.conj() * p.d2z).im / p.speed().powi(3);
                assert_abs_diff_eq!(p.curvature(), -standard, epsilon = 1e-12);
                assert_abs_diff_eq!(p.curvature(), -1.0 / r, epsilon = 1e-12);
                assert_abs_diff_eq!(cw.point(t).curvature(), 1.0 / r, epsilon = 1e-12);
                assert!(p.curvature_complex().im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn total_curvature_per_component() {
        let d = PlanarDomain::annulus(c(0.0, 0.0), 1.0, 0.5).unwrap();
        let totals = winding_check(&d).unwrap();
        assert_abs_diff_eq!(totals[0], -TAU, epsilon = 1e-10);
        assert_abs_diff_eq!(totals[1], TAU, epsilon = 1e-10);
        let e = PlanarDomain::ellipse(1.0, 0.6).unwrap();
        assert_abs_diff_eq!(winding_check(&e).unwrap()[0], -TAU, epsilon = 1e-10);
    }

    #[test]
    fn orientation_misconfiguration_rejected() {
        let outer = AnalyticCurve::circle(c(0.0, 0.0), 1.0, Orientation::Clockwise).unwrap();
        assert!(PlanarDomain::new(outer, vec![], None).is_err());
        let outer = AnalyticCurve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap();
        let inner = AnalyticCurve::circle(c(0.0, 0.0), 0.5, Orientation::CounterClockwise).unwrap();
        assert!(PlanarDomain::new(outer, vec![inner], None).is_err());
    }

    #[test]
    fn overlapping_and_misplaced_components_rejected() {
        let outer = AnalyticCurve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap();
        let crossing = AnalyticCurve::circle(c(0.9, 0.0), 0.3, Orientation::Clockwise).unwrap();
        assert!(PlanarDomain::new(outer.clone(), vec![crossing], None).is_err());
        let outside = AnalyticCurve::circle(c(3.0, 0.0), 0.3, Orientation::Clockwise).unwrap();
        assert!(PlanarDomain::new(outer.clone(), vec![outside], None).is_err());
        let inner = AnalyticCurve::circle(c(0.0, 0.0), 0.3, Orientation::Clockwise).unwrap();
        assert!(PlanarDomain::new(outer, vec![inner], Some(vec![c(0.6, 0.0)])).is_err());
    }

    #[test]
    fn hole_point_defaults_to_centroid() {
        let outer = AnalyticCurve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap();
        let inner = AnalyticCurve::circle(c(0.2, 0.1), 0.3, Orientation::Clockwise).unwrap();
        let d = PlanarDomain::new(outer, vec![inner], None).unwrap();
        assert!((d.hole_points()[0] - c(0.2, 0.1)).norm() < 1e-10);
        assert!(d.contains(c(0.0, 0.7)));
        assert!(!d.contains(c(0.2, 0.1)));
        assert!(!d.contains(c(1.5, 0.0)));
    }

    #[test]
    fn json_round_trip() {
        let d = PlanarDomain::annulus(c(0.1, 0.0), 1.0, 0.5).unwrap();
        let text = d.to_json_string();
        let back = PlanarDomain::from_json_str(&text).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn json_layout_matches_documented_schema() {
        let text = r#"{ "outer": {"coeffs": [[0,0],[2,0]], "j_min": 0},
                        "inners": [{"coeffs": [[0.5,0],[0,0]], "j_min": -1}],
                        "hole_points": [[0,0]] }"#;
        let d = PlanarDomain::from_json_str(text).unwrap();
        assert_eq!(d.connectivity(), 2);
        let (a, _) = area_perimeter(&d);
        assert_abs_diff_eq!(a, PI * (4.0 - 0.25), epsilon = 1e-12);
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = PlanarDomain::from_json_str("{\n \"outer\": {\"coeffs\": [[0,0],,]}\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }
}
