use proptest::prelude::*;
use transvecta::lines::{
    a_of_word, chart_consistency, curve_point, kernel_invariance_check, prefix_interval, push_h, push_v, CurveParam,
    WordSpec,
};
use transvecta::sigma::SigmaMap;
use transvecta::words::Letter;

fn letters(min: usize, max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop_oneof![Just(Letter::H), Just(Letter::V)], min..=max)
}

/// Periodic words whose period uses both letters.
fn mixed_word() -> impl Strategy<Value = WordSpec> {
    (letters(0, 5), letters(2, 6))
        .prop_filter("period needs both letters", |(_, per)| per.contains(&Letter::H) && per.contains(&Letter::V))
        .prop_map(|(pre, per)| WordSpec::new(pre, per).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn push_maps_are_monotone(ai in 0..4usize, a in 0f64..100.0, da in 1e-6f64..10.0) {
        let alpha = [0.5, 1.0, 2.0, 3.0][ai];
        let (lo, hi) = (CurveParam::Finite(a), CurveParam::Finite(a + da));
        prop_assert!(push_h(alpha, lo).value() < push_h(alpha, hi).value());
        prop_assert!(push_h(alpha, hi).value() < push_h(alpha, CurveParam::Infinite).value());
        prop_assert!(push_v(lo).value() < push_v(hi).value());
    }

    #[test]
    fn push_h_is_the_plane_map(alpha in 0.25f64..4.0, a in 0f64..20.0, x in 0.01f64..10.0) {
        let s = SigmaMap::power(alpha).unwrap();
        let img = s.h(curve_point(alpha, a, x));
        let b = push_h(alpha, CurveParam::Finite(a)).value();
        let expect = curve_point(alpha, b, (1.0 + a.powf(1.0 / alpha)) * x);
        prop_assert!(img.dist(expect) <= 1e-10 * img.norm());
        let img = s.v(curve_point(alpha, a, x));
        let expect = curve_point(alpha, push_v(CurveParam::Finite(a)).value(), x);
        prop_assert!(img.dist(expect) <= 1e-10 * img.norm());
    }

    #[test]
    fn kernel_is_scale_invariant(u in 1e-3f64..1e3, dv in 1e-3f64..1e3, k in 1e-3f64..1e3) {
        prop_assert!(kernel_invariance_check(u, u + dv, k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn nesting_shrinks(ai in 0..2usize, w in mixed_word()) {
        let alpha = [1.0, 2.0][ai];
        let mut prev = f64::INFINITY;
        for n in 1..=200 {
            let iv = prefix_interval(alpha, &w, n);
            let width = iv.width();
            prop_assert!(width >= 0.0);
            // endpoints are rounded independently
            prop_assert!(width <= prev + 4.0 * f64::EPSILON * iv.hi.value().min(1e300), "{} n {}", w, n);
            prev = width;
        }
        prop_assert!(prev < 1e-9, "{} width {}", w, prev);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn chart_is_consistent(ai in 0..3usize, w in mixed_word()) {
        let alpha = [1.0, 2.0, 3.0][ai];
        for x in [0.5, 1.0, 2.0] {
            let c = chart_consistency(alpha, x, &w, 1e-13).unwrap();
            prop_assert!(c.rel_err <= 1e-8, "{} {:?}", w, c);
        }
    }

    #[test]
    fn sigma_lines_are_graphs_of_increasing_maps(ai in 0..3usize, w in mixed_word(), x1 in 0.01f64..10.0, dx in 1e-3f64..10.0) {
        let alpha = [1.0, 2.0, 3.0][ai];
        let a = a_of_word(alpha, &w, 1e-12).unwrap().a.value();
        prop_assert!(a > 0.0);
        prop_assert!(curve_point(alpha, a, x1).y < curve_point(alpha, a, x1 + dx).y);
    }
}
