//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use extremal_domains::approx::{
    analytic_content, classify, extremality_residual, ApproximationResult, SolverOptions, Verdict, DEFAULT_DEGREE,
};
use extremal_domains::conformal::{map_to_annulus, mobius_check, DEFAULT_DEGREE as MAP_DEGREE};
use extremal_domains::geometry::{area_perimeter, AnalyticCurve, Orientation, PlanarDomain};
use extremal_domains::laurent::LaurentSum;
use extremal_domains::perturb::perturb_domain;
use extremal_domains::quaddiff::{
    boundary_identity, build_stokes_graph, lg_compare, trace_trajectory, Direction, Family, LgOracle,
    QuadraticDifferential, Termination, TraceOptions,
};
use extremal_domains::quadrature::{flow_identities, quadrature_residual};
use extremal_domains::schwarz::{riccati_general_solution_check, schwarzian};
use extremal_domains::serrin::{boundary_oscillation, solve_neumann, DEFAULT_DEGREE as SERRIN_DEGREE};
use extremal_domains::series::Series;
use extremal_domains::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn origin() -> Complex64 {
    c(0.0, 0.0)
}

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome { pass, detail }
    }
}

fn timed_solve(domain: &PlanarDomain) -> (ApproximationResult, Duration) {
    let start = Instant::now();
    let result = analytic_content(domain, DEFAULT_DEGREE, &SolverOptions::default()).expect("minimax solve");
    (result, start.elapsed())
}

/// Laurent coefficients `a_n`, `|n| ≤ n_max`, of `f` on the circle `|z| = r`.
fn laurent_coefficients(f: &LaurentSum, r: f64, n_max: i32) -> Vec<(i32, Complex64)> {
    let m = 512;
    (-n_max..=n_max)
        .map(|n| {
            let sum: Complex64 = (0..m)
                .map(|k| {
                    let z = Complex64::from_polar(r, TAU * k as f64 / m as f64);
                    f.eval(z) * z.powi(-n)
                })
                .sum();
            (n, sum / m as f64)
        })
        .collect()
}

fn disk_extremality() -> Outcome {
    let d = PlanarDomain::disk(origin(), 1.0).unwrap();
    let (r, elapsed) = timed_solve(&d);
    let residual = extremality_residual(&d, &r).max;
    let coeff_max = r.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let pass = (r.lambda_hat - 1.0).abs() <= 1e-3
        && r.gap_lower <= 1e-3
        && r.gap_upper <= 1e-3
        && residual <= 1e-4
        && coeff_max <= 1e-4
        && elapsed < Duration::from_secs(5);
    Outcome::new(
        pass,
        format!(
            "lambda_hat = {:.9}, gaps = ({:.1e}, {:.1e}), residual = {residual:.1e}, max |coeff| = {coeff_max:.1e}, {elapsed:.2?}",
            r.lambda_hat, r.gap_lower, r.gap_upper
        ),
    )
}

fn annulus_extremality() -> Outcome {
    let d = PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap();
    let (r, elapsed) = timed_solve(&d);
    let coeff_err = laurent_coefficients(&r.phi(), 0.75, 16)
        .into_iter()
        .map(|(n, a)| (a - if n == -1 { c(0.5, 0.0) } else { origin() }).norm())
        .fold(0.0, f64::max);
    let pass = (r.lambda_hat - 0.5).abs() <= 1e-3 && coeff_err <= 1e-3 && elapsed < Duration::from_secs(10);
    Outcome::new(
        pass,
        format!(
            "lambda_hat = {:.9}, coefficient error vs 0.5/z = {coeff_err:.1e}, {elapsed:.2?}",
            r.lambda_hat
        ),
    )
}

fn ellipse_strictness() -> Outcome {
    let d = PlanarDomain::ellipse(1.0, 0.6).unwrap();
    let (r, _) = timed_solve(&d);
    let residual = extremality_residual(&d, &r);
    let verdict = classify(&d, &r, &residual, 1e-3);
    let q = quadrature_residual(&d, 8).residual;
    let sol = solve_neumann(&d, SERRIN_DEGREE).unwrap();
    let osc = boundary_oscillation(&sol, &d).max();
    let indicators = [r.gap_lower > 1e-2, q > 1e-3, osc > 1e-3];
    let pass = indicators.iter().all(|&b| b) && verdict == Verdict::NonExtremal;
    Outcome::new(
        pass,
        format!(
            "gap_lower = {:.3e}, quadrature residual = {q:.3e}, osc = {osc:.3e}, verdict {verdict}",
            r.gap_lower
        ),
    )
}

fn quadrature_identity() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, d) in [
        ("disk", PlanarDomain::disk(origin(), 1.0).unwrap()),
        ("annulus", PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap()),
    ] {
        let q = quadrature_residual(&d, 8).residual;
        let (r, _) = timed_solve(&d);
        let flow = flow_identities(&d, &r);
        let (area, _) = area_perimeter(&d);
        pass &= q <= 1e-6 && flow.boundary_speed_dev <= 1e-6 && flow.vorticity_flux_gap <= 1e-6 * area;
        parts.push(format!(
            "{name}: residual {q:.1e}, speed dev {:.1e}, |4A-2λP|/A {:.1e}",
            flow.boundary_speed_dev,
            flow.vorticity_flux_gap / area
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn serrin_closed_form() -> Outcome {
    let d = PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap();
    let sol = solve_neumann(&d, SERRIN_DEGREE).unwrap();
    let osc = boundary_oscillation(&sol, &d);
    let log_coeff = sol.beta[0];
    let jump = osc.c[0] - osc.c[1];
    let expect = 0.1875 - 0.25 * 2f64.ln();
    let pass = (log_coeff + 0.25).abs() <= 1e-5 && (jump - expect).abs() <= 1e-5;
    Outcome::new(
        pass,
        format!("log coefficient = {log_coeff:.9}, c_outer - c_inner = {jump:.9} (expected {expect:.9})"),
    )
}

fn boundary_differential() -> Outcome {
    let d = PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap();
    let (r, _) = timed_solve(&d);
    let qd = QuadraticDifferential::from_phi(&r.phi());
    let mut profile_err: f64 = 0.0;
    for (curve, target) in d.components().zip([0.5, 2.0]) {
        for p in curve.samples() {
            let tau = p.tangent();
            profile_err = profile_err.max((qd.eval(p.z) * tau * tau - target).norm());
        }
    }
    let id = boundary_identity(&d, r.lambda_hat, &qd);
    let targets = [TAU - PI, PI + PI];
    let integral_err = id
        .components
        .iter()
        .zip(targets)
        .map(|(comp, t)| (comp.qd_integral - t).norm().max((comp.expected - t).abs()))
        .fold(0.0, f64::max);
    let positive = id.components.iter().all(|comp| comp.expected > 0.0);
    let pass = profile_err <= 1e-6 && integral_err <= 1e-6 && positive;
    Outcome::new(
        pass,
        format!("profile error = {profile_err:.1e}, integral error = {integral_err:.1e}, both integrals positive: {positive}"),
    )
}

fn stokes_structure() -> Outcome {
    let d = PlanarDomain::disk(origin(), 1.0).unwrap();
    let qd = QuadraticDifferential::new(LaurentSum::polynomial(&[origin(), c(1.0, 0.0)]));
    let graph = build_stokes_graph(&d, &qd).unwrap();
    // Direction of each arc where it first leaves the disk of radius 0.5.
    let mut angles: Vec<f64> = graph
        .arcs_of(Family::Plus)
        .filter_map(|a| a.points.iter().find(|z| z.norm() >= 0.5).map(|z| z.arg().rem_euclid(TAU)))
        .collect();
    angles.sort_by(f64::total_cmp);
    let n = angles.len();
    let spacing_err = (0..n)
        .map(|k| {
            let gap = (angles[(k + 1) % n] - angles[k]).rem_euclid(TAU);
            (gap - TAU / 3.0).abs().to_degrees()
        })
        .fold(0.0, f64::max);

    let ring = QuadraticDifferential::new(LaurentSum::single(c(-1.0, 0.0), origin(), -2));
    let arc = trace_trajectory(&ring, c(1.0, 0.0), Family::Plus, Direction::Forward, &TraceOptions::new(2.0)).unwrap();
    let (closed, miss) = match arc.termination {
        Termination::Closed(miss) => (true, miss),
        _ => (false, f64::NAN),
    };
    let on_circle = arc.points.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max);
    let pass = n == 3 && spacing_err <= 2.0 && closed && miss <= 1e-4 && on_circle <= 1e-4;
    Outcome::new(
        pass,
        format!(
            "{n} Σ+ arcs, spacing error {spacing_err:.3}°, closure miss {miss:.1e}, max ||z|-1| {on_circle:.1e}"
        ),
    )
}

fn lg_rate() -> Outcome {
    let qd = QuadraticDifferential::new(LaurentSum::polynomial(&[origin(), c(1.0, 0.0)]));
    let path = [c(0.5, 0.0), c(1.5, 0.0)];
    let table = lg_compare(&qd, 1.0, origin(), &path, &[0.2, 0.1, 0.05, 0.025], &LgOracle::RungeKutta).unwrap();
    let ratios: Vec<String> = table.rows.iter().map(|r| format!("{:.3}", r.ratio)).collect();
    Outcome::new(
        table.ratio_variation <= 3.0,
        format!("e/ε = [{}], variation {:.3}", ratios.join(", "), table.ratio_variation),
    )
}

/// Random series with geometrically decaying coefficients and `f′(0) ≠ 0`;
/// `anchored` forces `f(0) = 0` so it can be composed into.
fn random_series(rng: &mut ChaCha8Rng, order: usize, anchored: bool) -> Series {
    let mut coeffs: Vec<Complex64> = (0..=order)
        .map(|k| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.5f64.powi(k as i32))
        .collect();
    coeffs[1] = c(1.0, 0.0) + 0.5 * coeffs[1];
    if anchored {
        coeffs[0] = origin();
    }
    Series::new(coeffs, order)
}

fn max_coeff_diff(a: &Series, b: &Series, upto: usize) -> f64 {
    (0..=upto).map(|k| (a.coeff(k) - b.coeff(k)).norm()).fold(0.0, f64::max)
}

fn schwarzian_suite() -> Outcome {
    let order = 32;
    // Möbius (2z + 1)/(z + 3) about 0.
    let num = Series::new(vec![c(1.0, 0.0), c(2.0, 0.0)], order);
    let den = Series::new(vec![c(3.0, 0.0), c(1.0, 0.0)], order);
    let mobius = num.div(&den).unwrap();
    let s_mob = schwarzian(&mobius).unwrap();
    let mobius_err = (0..=s_mob.order()).map(|k| s_mob.coeff(k).norm()).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut cocycle_err: f64 = 0.0;
    let check_upto = 12;
    for _ in 0..20 {
        let f = random_series(&mut rng, order, false);
        let g = random_series(&mut rng, order, true);
        let lhs = schwarzian(&f.compose(&g).unwrap()).unwrap();
        let dg = g.derivative();
        let rhs = schwarzian(&f).unwrap().compose(&g).unwrap().mul(&dg).mul(&dg).add(&schwarzian(&g).unwrap());
        cocycle_err = cocycle_err.max(max_coeff_diff(&lhs, &rhs, check_upto));
    }

    let mut power_err: f64 = 0.0;
    for m in [2i32, 3, -1] {
        // (1 + w)^m about w = 0 by the binomial series.
        let mut coeffs = vec![c(1.0, 0.0)];
        for k in 1..=order {
            let prev = coeffs[k - 1];
            coeffs.push(prev * ((m - k as i32 + 1) as f64 / k as f64));
        }
        let s = schwarzian(&Series::new(coeffs, order)).unwrap();
        // (1 − m²)/(2(1 + w)²) = (1 − m²)/2 · Σ (−1)^k (k + 1) w^k
        let scale = (1.0 - (m * m) as f64) / 2.0;
        for k in 0..=check_upto {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let expect = scale * sign * (k + 1) as f64;
            power_err = power_err.max((s.coeff(k) - expect).norm() / expect.abs().max(1.0));
        }
    }

    let riccati: Vec<f64> = [c(0.0, 0.0), c(0.5, 0.0), c(1.5, 0.0)]
        .into_iter()
        .map(|k| riccati_general_solution_check(k).residuals.into_iter().fold(0.0, f64::max))
        .collect();
    let riccati_max = riccati.iter().cloned().fold(0.0, f64::max);

    let pass = mobius_err <= 1e-10 && cocycle_err <= 1e-8 && power_err <= 1e-10 && riccati_max <= 1e-12;
    Outcome::new(
        pass,
        format!(
            "S(Möbius) {mobius_err:.1e}, cocycle {cocycle_err:.1e}, S(z^m) {power_err:.1e}, Riccati {riccati_max:.1e}"
        ),
    )
}

fn two_circles(center: Complex64, r: f64) -> PlanarDomain {
    PlanarDomain::new(
        AnalyticCurve::circle(origin(), 1.0, Orientation::CounterClockwise).unwrap(),
        vec![AnalyticCurve::circle(center, r, Orientation::Clockwise).unwrap()],
        None,
    )
    .unwrap()
}

/// Modulus of the unit disk minus the disk `|z − d| ≤ r`, `d` real, from the
/// disk automorphism that makes both circles concentric.
fn eccentric_modulus(d: f64, r: f64) -> f64 {
    let b = 1.0 + d * d - r * r;
    let p = (b - (b * b - 4.0 * d * d).sqrt()) / (2.0 * d);
    let t = |z: f64| (z - p) / (1.0 - p * z);
    -t(d + r).abs().ln()
}

fn conformal_suite() -> Outcome {
    let mut modulus_err: f64 = 0.0;
    let mut mobius_max: f64 = 0.0;
    for (d, r) in [(0.2, 0.3), (0.4, 0.25)] {
        let dom = two_circles(c(d, 0.0), r);
        let map = map_to_annulus(&dom, MAP_DEGREE).unwrap();
        modulus_err = modulus_err.max((map.modulus - eccentric_modulus(d, r)).abs());
        mobius_max = mobius_max.max(mobius_check(&dom, &map).defect);
    }
    let ring = PlanarDomain::new(
        AnalyticCurve::ellipse(origin(), 1.0, 0.6, Orientation::CounterClockwise).unwrap(),
        vec![AnalyticCurve::circle(origin(), 0.2, Orientation::Clockwise).unwrap()],
        None,
    )
    .unwrap();
    let ring_map = map_to_annulus(&ring, MAP_DEGREE).unwrap();
    let ring_defect = mobius_check(&ring, &ring_map).defect;
    let ring_fit = ring_map.boundary_defect;
    let pass = modulus_err <= 1e-5 && mobius_max <= 1e-5 && ring_defect > 1e-2 && ring_fit < 1e-6;
    Outcome::new(
        pass,
        format!(
            "modulus error {modulus_err:.1e}, Möbius-image defect {mobius_max:.1e}, ellipse-ring defect {ring_defect:.3e} (map boundary defect {ring_fit:.1e})"
        ),
    )
}

fn continuity() -> Outcome {
    let base = PlanarDomain::annulus(origin(), 1.0, 0.5).unwrap();
    let options = SolverOptions::default();
    let mut rows = Vec::new();
    for amplitude in [0.05, 0.02, 0.01, 0.0] {
        let d = perturb_domain(&base, amplitude, 3, 0).unwrap();
        let r = analytic_content(&d, 20, &options).unwrap();
        let sol = solve_neumann(&d, SERRIN_DEGREE).unwrap();
        let osc = boundary_oscillation(&sol, &d).max();
        let q = quadrature_residual(&d, 8).residual;
        rows.push((amplitude, r.gap_lower, osc, q));
    }
    let decreasing = |pick: fn(&(f64, f64, f64, f64)) -> f64| rows.windows(2).all(|w| pick(&w[1]) < pick(&w[0]));
    let limit = rows.last().unwrap();
    let vanish = limit.1.abs() <= 1e-6 && limit.2 <= 1e-6 && limit.3 <= 1e-6;
    let pass = decreasing(|r| r.1) && decreasing(|r| r.2) && decreasing(|r| r.3) && vanish;
    let table: Vec<String> = rows
        .iter()
        .map(|(a, g, o, q)| format!("ε={a}: gap {g:.2e}, osc {o:.2e}, q {q:.2e}"))
        .collect();
    Outcome::new(pass, table.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("disk extremality", disk_extremality),
        ("annulus extremality", annulus_extremality),
        ("strictness on the ellipse", ellipse_strictness),
        ("quadrature and flow identities", quadrature_identity),
        ("Serrin closed form on the annulus", serrin_closed_form),
        ("boundary quadratic differential", boundary_differential),
        ("Stokes structure", stokes_structure),
        ("Liouville-Green rate", lg_rate),
        ("Schwarzian suite", schwarzian_suite),
        ("conformal suite", conformal_suite),
        ("continuity under perturbation", continuity),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failures += 1;
        }
        println!("criterion {:>2} {tag}  {name}: {}", k + 1, outcome.detail);
    }
    if failures == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
