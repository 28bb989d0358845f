use proptest::prelude::*;
use univalent::metrics::{golusin_bound, growth_bound, teich_distance};
use univalent::qcmap::{family_map_with_order, Family};
use univalent::C64;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn blaschke(t: C64, m: u32, lambda: C64, zeros: &[C64]) -> C64 {
    let one = C64::new(1.0, 0.0);
    zeros
        .iter()
        .fold(lambda * t.powu(m), |acc, a| acc * (t - a) / (one - a.conj() * t))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn golusin_below_modulus(m in 1u32..5, c in 0.01f64..1.0, phase in 0.0f64..6.28, r in 0.0f64..0.999) {
        let t = C64::from_polar(r, 1.3);
        let b = golusin_bound(m, C64::from_polar(c, phase), t).unwrap();
        prop_assert!(b.value <= r + 1e-15);
    }

    #[test]
    fn growth_increasing(m in 1u32..5, c in 0.01f64..1.0, r in 0.0f64..0.99, dr in 0.001f64..0.009) {
        let c = C64::new(c, 0.0);
        let lo = growth_bound(m, c, C64::new(r, 0.0)).unwrap();
        let hi = growth_bound(m, c, C64::new(r + dr, 0.0)).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn blaschke_maps_obey_the_bound(
        m in 1u32..4,
        zeros in prop::collection::vec((0.01f64..0.95, 0.0f64..6.28), 1..4),
        lambda in 0.0f64..6.28,
        dir in 0.0f64..6.28,
    ) {
        let zeros: Vec<C64> = zeros.iter().map(|&(r, t)| C64::from_polar(r, t)).collect();
        let lambda = C64::from_polar(1.0, lambda);
        let c = zeros.iter().fold(lambda, |acc, a| acc * (-a));
        for j in 1..=50 {
            let t = C64::from_polar(0.99 * j as f64 / 50.0, dir);
            let b = golusin_bound(m, c, t).unwrap();
            prop_assert!(blaschke(t, m, lambda, &zeros).norm() <= b.value + 1e-10);
        }
    }

    #[test]
    fn grunsky_distance_below_teichmueller(t in 0.01f64..0.95, n in 2usize..6) {
        let t = C64::new(t, 0.0);
        for kind in [Family::Affine { b1: t }, Family::Koebe { t }, Family::PoweredKoebe { n, t }] {
            let f = family_map_with_order(&kind, 44).unwrap();
            let k = f.dilatation().unwrap();
            let g = f.grunsky_norm(20).unwrap().value;
            prop_assert!(g.atanh() <= teich_distance(k).unwrap() + 1e-8);
        }
    }
}
