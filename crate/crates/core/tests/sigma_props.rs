mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transvecta::sigma::{flow_scale, Point2, SigmaMap};

fn close(a: Point2, b: Point2, rel: f64, scale: f64) -> bool {
    a.dist(b) <= rel * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sigma_is_odd(s in common::any_sigma(), x in -1e3f64..1e3) {
        prop_assert!((s.eval(-x) + s.eval(x)).abs() <= 1e-10);
        prop_assert!((s.inv(-x) + s.inv(x)).abs() <= 1e-10);
    }

    #[test]
    fn transvections_round_trip(s in common::any_sigma(), x in -10f64..10.0, y in -10f64..10.0) {
        let p = Point2::new(x, y);
        let hp = s.h(p);
        prop_assert!(close(s.h_inv(hp), p, 1e-12, p.norm() + hp.norm()));
        let vp = s.v(p);
        prop_assert!(close(s.v_inv(vp), p, 1e-12, p.norm() + vp.norm()));
    }

    #[test]
    fn flow_commutes_with_transvections(
        ai in 0..4usize, t in 0.1f64..10.0, x in -10f64..10.0, y in -10f64..10.0,
    ) {
        let alpha = [0.5, 1.0, 2.0, 3.0][ai];
        let s = SigmaMap::power(alpha).unwrap();
        let p = Point2::new(x, y);
        let a = flow_scale(alpha, t, s.h(p)).unwrap();
        let b = s.h(flow_scale(alpha, t, p).unwrap());
        prop_assert!(close(a, b, 1e-10, a.norm()));
        let a = flow_scale(alpha, t, s.v(p)).unwrap();
        let b = s.v(flow_scale(alpha, t, p).unwrap());
        prop_assert!(close(a, b, 1e-10, a.norm()));
    }

    #[test]
    fn central_symmetry_commutes(s in common::any_sigma(), x in -10f64..10.0, y in -10f64..10.0) {
        let p = Point2::new(x, y);
        for (img, img_neg) in [(s.h(p), s.h(-p)), (s.v(p), s.v(-p)), (s.h_inv(p), s.h_inv(-p)), (s.v_inv(p), s.v_inv(-p))] {
            prop_assert!(close(img_neg, -img, 1e-12, img.norm()));
        }
    }
}

/// `#{p : h(p) ∈ B}` for uniform samples of a window containing `h⁻¹(B)` must
/// match `N·|B|/|W|`, since `h` preserves area.
#[test]
fn transvections_preserve_area() {
    const N: usize = 1_000_000;
    let target = (0.3, 0.4);
    let window: f64 = 4.0;
    let area_ratio = 0.01 / (2.0 * window).powi(2);
    for s in common::families() {
        for (name, map) in [("h", 0), ("v", 1)] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let hits = (0..N)
                .filter(|_| {
                    let p = Point2::new(rng.gen_range(-window..window), rng.gen_range(-window..window));
                    let q = if map == 0 { s.h(p) } else { s.v(p) };
                    (target.0..target.1).contains(&q.x) && (target.0..target.1).contains(&q.y)
                })
                .count() as f64;
            let expected = N as f64 * area_ratio;
            let sd = (expected * (1.0 - area_ratio)).sqrt();
            assert!((hits - expected).abs() <= 4.0 * sd, "{s} {name}: {hits} vs {expected}");
        }
    }
}
