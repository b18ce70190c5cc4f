use approx::relative_eq;
use proptest::prelude::*;
use transvecta::torus::{frac, lebesgue_histogram, CircleMap, TorusMapPair, TorusMove, TrigPoly, Wave};

fn circle_map() -> impl Strategy<Value = CircleMap> {
    prop_oneof![
        (0f64..1.0).prop_map(CircleMap::Const),
        (-5f64..5.0).prop_map(CircleMap::Lin),
        (-0.9f64..0.9).prop_map(CircleMap::Sine),
    ]
}

fn circle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn moves_are_bijections(s1 in circle_map(), s2 in circle_map(), x in 0f64..1.0, y in 0f64..1.0) {
        let pair = TorusMapPair { sigma1: s1, sigma2: s2 };
        let p = (x, y);
        for q in [pair.h_inv(pair.h(p)), pair.h(pair.h_inv(p)), pair.v_inv(pair.v(p)), pair.v(pair.v_inv(p))] {
            prop_assert!(circle_gap(q.0, x) <= 1e-15 && circle_gap(q.1, y) <= 1e-15);
            prop_assert!((0.0..1.0).contains(&q.0) && (0.0..1.0).contains(&q.1));
        }
    }

    #[test]
    fn trig_poly_text_round_trips(
        c0 in -3f64..3.0,
        terms in prop::collection::vec((-3f64..3.0, any::<bool>(), 0u32..6), 0..4),
        x in 0f64..1.0,
    ) {
        let p = TrigPoly {
            constant: c0,
            terms: terms.into_iter().map(|(c, cos, k)| (c, if cos { Wave::Cos } else { Wave::Sin }, k)).collect(),
        };
        let q: TrigPoly = p.to_string().parse().unwrap();
        prop_assert!(relative_eq!(p.eval(x), q.eval(x), epsilon = 1e-12, max_relative = 1e-12));
        prop_assert!(relative_eq!(p.mean(), q.mean(), epsilon = 1e-12));
    }

    #[test]
    fn frac_lands_in_unit_interval(x in -1e6f64..1e6) {
        let f = frac(x);
        prop_assert!((0.0..1.0).contains(&f));
    }
}

#[test]
fn moves_preserve_lebesgue_measure() {
    let pairs = [
        TorusMapPair { sigma1: CircleMap::Sine(0.5), sigma2: CircleMap::Const(2f64.sqrt() - 1.0) },
        TorusMapPair { sigma1: CircleMap::Lin(3.0), sigma2: CircleMap::Sine(-0.7) },
    ];
    for pair in pairs {
        for mv in [TorusMove::H, TorusMove::V] {
            let rep = lebesgue_histogram(&pair, mv, 1_000_000, 10, 2024).unwrap();
            assert!(rep.within_bound(), "{pair:?} {mv:?}: {} > {}", rep.max_abs_dev, rep.bound);
        }
    }
}
