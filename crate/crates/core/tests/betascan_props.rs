use gma::betascan::{beta_map, brute_force_width_refined, jones_functional, strip_width, PointCloud};
use proptest::prelude::*;

fn pts(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 3..max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn width_is_rigid_motion_invariant(p in pts(40), theta in 0.0..6.3f64, dx in -5.0..5.0f64, dy in -5.0..5.0f64) {
        let (c, s) = (theta.cos(), theta.sin());
        let q: Vec<_> = p.iter().map(|&(x, y)| (c * x - s * y + dx, s * x + c * y + dy)).collect();
        prop_assert!((strip_width(&p) - strip_width(&q)).abs() <= 1e-12);
    }

    #[test]
    fn width_shrinks_under_deletion(p in pts(40), drop in 0usize..40) {
        let mut q = p.clone();
        q.remove(drop % p.len());
        prop_assert!(strip_width(&q) <= strip_width(&p) + 1e-12);
    }

    #[test]
    fn width_matches_oracle(p in pts(25)) {
        prop_assert!((strip_width(&p) - brute_force_width_refined(&p, 4000)).abs() <= 1e-6);
    }

    #[test]
    fn map_ignores_point_order(p in pts(60), rot in 0usize..60) {
        let mut q = p.clone();
        q.rotate_left(rot % p.len());
        q.reverse();
        let a = beta_map(&PointCloud::new(p).unwrap(), 4).unwrap();
        let b = beta_map(&PointCloud::new(q).unwrap(), 4).unwrap();
        prop_assert_eq!(jones_functional(&a), jones_functional(&b));
        prop_assert_eq!(a.entries.len(), b.entries.len());
    }

    #[test]
    fn betas_are_bounded(p in pts(80)) {
        let m = beta_map(&PointCloud::new(p).unwrap(), 5).unwrap();
        for e in &m.entries {
            prop_assert!(e.beta >= 0.0 && e.beta <= gma::betascan::BETA_BOUND + 1e-12);
        }
    }
}
