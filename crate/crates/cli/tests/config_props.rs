use std::collections::BTreeMap;

use proptest::prelude::*;
use transvecta_cli::config::{parse_config_file, Command, Format, RunConfig, KEYS};
use transvecta_cli::output::{format_f64, to_json};

fn map(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

proptest! {
    #[test]
    fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = format_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
        // at most 17 significant digits
        let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).collect::<String>();
        prop_assert!(digits.trim_start_matches('0').len() <= 17);
    }

    #[test]
    fn json_key_order_is_insertion_order(keys in proptest::collection::vec("[a-z]{1,6}", 1..8)) {
        let mut m = serde_json::Map::new();
        let mut order = Vec::new();
        for k in keys {
            if !m.contains_key(&k) {
                order.push(k.clone());
            }
            m.insert(k, serde_json::Value::from(1));
        }
        let text = to_json(&serde_json::Value::Object(m));
        let mut pos = 0;
        for k in order {
            let at = text[pos..].find(&format!("\"{k}\":")).map(|i| i + pos);
            prop_assert!(at.is_some());
            pos = at.unwrap();
        }
    }

    #[test]
    fn later_layer_wins(file_depth in 0usize..50, flag_depth in 0usize..50, file_seed in any::<u64>()) {
        let file = parse_config_file(&format!("command = coverage\ndepth = {file_depth}\nseed = {file_seed}\n")).unwrap();
        let mut merged = file.clone();
        merged.extend(map(&[("depth", flag_depth.to_string())]));
        let c = RunConfig::from_map(&merged).unwrap();
        prop_assert_eq!(c.depth, Some(flag_depth));
        prop_assert_eq!(c.seed, file_seed);
    }

    #[test]
    fn unknown_keys_are_rejected(key in "[a-z_]{1,10}") {
        prop_assume!(!KEYS.contains(&key.as_str()));
        let text = format!("command = golden\n{key} = 1\n");
        prop_assert!(parse_config_file(&text).is_err());
        let m = map(&[("command", "golden".into()), (key.as_str(), "1".into())]);
        prop_assert!(RunConfig::from_map(&m).is_err());
    }
}

#[test]
fn defaults() {
    let c = RunConfig::from_map(&map(&[("command", "golden".into())])).unwrap();
    assert_eq!(c.command, Command::Golden);
    assert_eq!(c.seed, 0);
    assert_eq!(c.format, None);
    assert!(c.sigma.is_none());
}

#[test]
fn comments_and_blank_lines() {
    let m =
        parse_config_file("# header\n\ncommand = mertens # trailing\nr = 1/7\nformat = csv\nexact = true\n").unwrap();
    let c = RunConfig::from_map(&m).unwrap();
    assert_eq!(c.command, Command::Mertens);
    assert_eq!(c.format, Some(Format::Csv));
    assert!(c.exact);
    assert!(parse_config_file("command golden").is_err());
}

#[test]
fn rejects_bad_values() {
    for (k, v) in
        [("depth", "-3"), ("format", "xml"), ("sigma", "pow:0"), ("r", "1/0"), ("map1", "tan:1"), ("word", "hx")]
    {
        let m = map(&[("command", "golden".into()), (k, v.into())]);
        assert!(RunConfig::from_map(&m).is_err(), "{k} = {v}");
    }
}
