use proptest::prelude::*;
use univalent::extremal::{
    coefficient_extremal, coefficient_extremal_constrained, distortion_bound, kappa_n_bounds, l1_distance_to_span,
    FunctionalSpec, L1Options, SpanBasis,
};
use univalent::qcmap::FixedPoint;
use univalent::quaddiff::QuadDifferential;
use univalent::quadrature::DiskQuadrature;
use univalent::C64;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn distortion_bound_is_homogeneous(
        r in 0.05f64..0.9, th in 0.0f64..6.28, kappa in 0.01f64..0.45, lambda in 0.1f64..3.0, phase in 0.0f64..6.28,
    ) {
        let quad = DiskQuadrature::new(24, 64);
        let a = C64::from_polar(r, th);
        let base = FunctionalSpec::point_evaluation(a, FixedPoint::Zero);
        let scaled = FunctionalSpec { grad_a: C64::from_polar(lambda, phase), ..base.clone() };
        let b0 = distortion_bound(&base, kappa, &quad).unwrap().bound;
        let b1 = distortion_bound(&scaled, kappa, &quad).unwrap().bound;
        let b2 = distortion_bound(&base, 2.0 * kappa, &quad).unwrap().bound;
        prop_assert!((b1 - lambda * b0).abs() <= 1e-12 * b1.abs().max(1.0));
        prop_assert!((b2 - 2.0 * b0).abs() <= 1e-12 * b2.abs().max(1.0));
    }

    #[test]
    fn coefficient_bound_is_attained(n in 2usize..14, kappa in 0.001f64..0.999) {
        let e = coefficient_extremal(n, kappa).unwrap();
        let a = e.extremal.taylor_coefficient(n as i32).unwrap();
        prop_assert!((a.norm() - e.bound).abs() < 1e-12);
    }
}

#[test]
fn brackets_are_ordered() {
    for n in 3..=50 {
        let b = kappa_n_bounds(n).unwrap();
        assert!(b.lower < b.upper, "n = {n}");
    }
}

#[test]
fn distance_is_rotation_invariant_and_certified() {
    let quad = DiskQuadrature::new(24, 64);
    let opts = L1Options::default();
    let basis = SpanBasis::new(vec![C64::new(0.5, 0.0)]).unwrap();
    let psi0 = QuadDifferential::constant(C64::new(1.0, 0.0));
    let base = l1_distance_to_span(&psi0, &basis, &quad, &opts).unwrap();
    assert!(base.certified);
    assert!(base.max_residual() <= 10.0 * base.error, "{} vs {}", base.max_residual(), base.error);
    for theta in [0.4, 2.0, -2.9] {
        let r = l1_distance_to_span(&psi0.scale(C64::from_polar(1.0, theta)), &basis, &quad, &opts).unwrap();
        assert!((r.d - base.d).abs() < 1e-6, "θ = {theta}: {} vs {}", r.d, base.d);
    }
}

#[test]
fn distance_below_norm() {
    let quad = DiskQuadrature::new(24, 64);
    let psi0 = QuadDifferential::pole_power(C64::new(0.2, -0.3), 0, C64::new(1.0, 0.0));
    let basis = SpanBasis::new(vec![C64::new(-0.4, 0.1)]).unwrap();
    let r = l1_distance_to_span(&psi0, &basis, &quad, &L1Options::default()).unwrap();
    let norm = psi0.l1_norm(&quad).unwrap().value;
    assert!(r.d <= norm + 1e-12);
    assert!(r.certified);
}

#[test]
fn constrained_coefficient_is_certified() {
    let quad = DiskQuadrature::new(24, 64);
    let basis = SpanBasis::new(vec![C64::new(0.5, 0.0)]).unwrap();
    let c = coefficient_extremal_constrained(3, &basis, 0.1, &quad, &L1Options::default()).unwrap();
    assert!(c.regularized);
    assert!(c.solution.certified);
    assert!((c.bound - 0.1 * c.d / std::f64::consts::PI).abs() < 1e-15);
}
