use std::f64::consts::PI;

use proptest::prelude::*;
use univalent::beltrami::{alpha_d, chain_rule, pairing, BeltramiCoeff, MapData};
use univalent::quaddiff::QuadDifferential;
use univalent::quadrature::{DiskQuadrature, Refinement};
use univalent::C64;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn disk_point() -> impl Strategy<Value = C64> {
    (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn weights_sum_to_pi(n_r in 2usize..40, n_theta in 4usize..80, poles in prop::collection::vec(disk_point(), 0..3)) {
        let q = DiskQuadrature::with_poles(n_r, n_theta, &poles, Refinement::default());
        let total: f64 = q.weights().iter().sum();
        prop_assert!((total - PI).abs() < 1e-10);
    }

    #[test]
    fn composition_stays_in_the_ball(a in disk_point(), b in disk_point(), n in 0i32..4) {
        let (ka, kb) = (a.norm(), b.norm());
        let bound = (ka + kb) / (1.0 + ka * kb);
        let c = chain_rule(
            &BeltramiCoeff::Constant { c: a },
            &BeltramiCoeff::Constant { c: b },
            &MapData::Affine { nu: a },
        ).unwrap();
        prop_assert!(c.norm_inf() <= bound + 1e-10);
        let m = chain_rule(
            &BeltramiCoeff::Constant { c: a },
            &BeltramiCoeff::Monomial { n, t: b },
            &MapData::Affine { nu: a },
        ).unwrap();
        prop_assert!(m.norm_inf() <= bound + 1e-10);
    }

    #[test]
    fn pairing_is_bounded_by_norms(t in disk_point(), n in 0i32..5, pole in disk_point(), c in disk_point()) {
        let mu = BeltramiCoeff::Monomial { n, t };
        let psi = QuadDifferential::pole_power(pole, 0, C64::new(1.0, 0.0)).add(&QuadDifferential::constant(c));
        let quad = DiskQuadrature::new(24, 64);
        let p = pairing(&mu, &psi, &quad).unwrap();
        let l1 = psi.l1_norm(&quad).unwrap();
        prop_assert!(p.value.norm() <= mu.norm_inf() * l1.value + p.error + l1.error + 1e-12);
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn alpha_d_at_most_one(t in disk_point(), n in -1i32..3, pole in disk_point()) {
        prop_assume!(t.norm() > 0.05);
        let quad = DiskQuadrature::new(24, 64);
        let mono = alpha_d(&BeltramiCoeff::Monomial { n, t }, 4, 4, &quad, 7).unwrap();
        prop_assert!(mono.value <= 1.0 + 1e-3);
        let psi = QuadDifferential::pole_power(pole * 0.5, 0, C64::new(1.0, 0.0));
        let teich = alpha_d(&BeltramiCoeff::Teichmueller { psi, k: t.norm() }, 4, 4, &quad, 7).unwrap();
        prop_assert!(teich.value <= 1.0 + 1e-3);
    }
}

#[test]
fn teichmueller_square_attains_one() {
    // μ = |ω²|/ω² with ω = 1 + z/2 is attained by ω itself.
    let psi = QuadDifferential::rational(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.25, 0.0)], vec![C64::new(1.0, 0.0)]).unwrap();
    let mu = BeltramiCoeff::Teichmueller { psi, k: 0.5 };
    let a = alpha_d(&mu, 3, 6, &DiskQuadrature::new(48, 128), 3).unwrap();
    assert!((a.value - 1.0).abs() < 1e-3, "{}", a.value);
}
