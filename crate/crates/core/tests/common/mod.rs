#![allow(dead_code)]

use proptest::prelude::*;
use transvecta::sigma::SigmaMap;

/// The six families exercised throughout the suite.
pub fn families() -> Vec<SigmaMap> {
    ["id", "pow:0.5", "pow:2", "pow:3", "lin:2:1", "sine:0.5"]
        .iter()
        .map(|d| d.parse().expect("valid descriptor"))
        .collect()
}

pub fn family() -> impl Strategy<Value = SigmaMap> {
    (0..6usize).prop_map(|i| families()[i])
}

/// Any member of the shipped families, with random parameters.
pub fn any_sigma() -> impl Strategy<Value = SigmaMap> {
    prop_oneof![
        Just(SigmaMap::identity()),
        (0.2f64..4.0).prop_map(|a| SigmaMap::power(a).unwrap()),
        (0.1f64..5.0, 0.1f64..3.0).prop_map(|(a, b)| SigmaMap::linear_near_origin(a, b).unwrap()),
        (-0.95f64..0.95).prop_map(|c| SigmaMap::sine_wobble(c).unwrap()),
    ]
}

/// Nonzero coordinate of modest size.
pub fn coord(max: f64) -> impl Strategy<Value = f64> {
    prop_oneof![1e-3..max, -max..-1e-3]
}
