use extremal_domains::approx::{analytic_content, SolverOptions, DEFAULT_DEGREE};
use extremal_domains::conformal::{
    inverse_map_fit, lemma_l1_check, map_to_annulus, mobius_check, qd_invariance, InverseForm,
    DEFAULT_DEGREE as MAP_DEGREE,
};
use extremal_domains::geometry::{AnalyticCurve, Orientation, PlanarDomain};
use extremal_domains::quaddiff::QuadraticDifferential;
use extremal_domains::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn eccentric(d: f64, r: f64) -> PlanarDomain {
    PlanarDomain::new(
        AnalyticCurve::circle(c(0.0, 0.0), 1.0, Orientation::CounterClockwise).unwrap(),
        vec![AnalyticCurve::circle(c(d, 0.0), r, Orientation::Clockwise).unwrap()],
        None,
    )
    .unwrap()
}

#[test]
fn inverse_round_trip() {
    let d = eccentric(0.25, 0.3);
    let map = map_to_annulus(&d, MAP_DEGREE).unwrap();
    for z in [c(0.0, 0.7), c(-0.6, 0.1), c(0.5, -0.6)] {
        assert!(d.contains(z));
        let back = map.inverse(map.eval(z)).unwrap();
        assert!((back - z).norm() < 1e-9, "{z} -> {back}");
    }
}

#[test]
fn annulus_certificate_matches_log_derivative() {
    let d = PlanarDomain::annulus(c(0.0, 0.0), 1.0, 0.4).unwrap();
    let map = map_to_annulus(&d, 8).unwrap();
    let r = analytic_content(&d, DEFAULT_DEGREE, &SolverOptions::default()).unwrap();
    let l1 = lemma_l1_check(&d, &r, &map);
    // φ = R1R2/z so φ′ = −R1R2 (1/z)².
    assert!((l1.c_fit - c(-0.4, 0.0)).norm() < 1e-8);
    assert!(l1.deviation < 1e-8);
    let qd = QuadraticDifferential::from_phi(&r.phi());
    assert!(qd_invariance(&d, &map, &qd) < 1e-6);
    let fit = inverse_map_fit(&d, &map).unwrap();
    assert_eq!(fit.form, InverseForm::Linear);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// The modulus is a similarity invariant.
    #[test]
    fn modulus_is_invariant(
        d in 0.05f64..0.35,
        r in 0.15f64..0.4,
        s in 0.5f64..3.0,
        rot in 0.0f64..std::f64::consts::TAU,
        tx in -2.0f64..2.0,
    ) {
        prop_assume!(d + r < 0.9);
        let dom = eccentric(d, r);
        let img = dom.affine(Complex64::from_polar(s, rot), c(tx, -tx)).unwrap();
        let m0 = map_to_annulus(&dom, MAP_DEGREE).unwrap();
        let m1 = map_to_annulus(&img, MAP_DEGREE).unwrap();
        prop_assert!((m0.modulus - m1.modulus).abs() < 1e-7);
        prop_assert!(mobius_check(&img, &m1).defect < 1e-5);
    }
}

#[test]
fn reciprocal_image_of_annulus() {
    // w = 1/z + 0.1 maps 0.5 < |z| < 1 onto 1 < |w − 0.1| < 2.
    let d = PlanarDomain::annulus(c(0.1, 0.0), 2.0, 1.0).unwrap();
    let map = map_to_annulus(&d, MAP_DEGREE).unwrap();
    assert!((map.modulus - 2f64.ln()).abs() < 1e-8);
    assert!(mobius_check(&d, &map).defect < 1e-5);
}

#[test]
fn ellipse_ring_breaks_the_log_derivative_form() {
    let ring = PlanarDomain::new(
        AnalyticCurve::ellipse(c(0.0, 0.0), 1.0, 0.6, Orientation::CounterClockwise).unwrap(),
        vec![AnalyticCurve::circle(c(0.0, 0.0), 0.2, Orientation::Clockwise).unwrap()],
        None,
    )
    .unwrap();
    let map = map_to_annulus(&ring, MAP_DEGREE).unwrap();
    let r = analytic_content(&ring, DEFAULT_DEGREE, &SolverOptions::default()).unwrap();
    assert!(lemma_l1_check(&ring, &r, &map).deviation > 1e-2);
    assert!(mobius_check(&ring, &map).defect > 1e-2);
}
