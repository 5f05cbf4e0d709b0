mod support;

use proptest::prelude::*;
use rxsig::normalizer::Normalizer;
use rxsig::sig_text::{scan_quantities, tokenize};
use support::fuzz::alphabet;

fn quantity_multiset(text: &str) -> Vec<String> {
    let mut v: Vec<String> = scan_quantities(&tokenize(text))
        .into_iter()
        .map(|r| r.quantity.canonical())
        .collect();
    v.sort();
    v
}

fn fuzzed() -> impl Strategy<Value = String> {
    let alpha = alphabet();
    prop::collection::vec(prop::sample::select(alpha), 0..14).prop_map(|w| w.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normalize_is_idempotent(text in fuzzed()) {
        let n = Normalizer::bundled();
        let once = n.normalize_text(&text);
        prop_assert_eq!(n.normalize_text(&once), once.clone(), "input: {}", text);
    }

    #[test]
    fn normalize_preserves_quantities(text in fuzzed()) {
        let n = Normalizer::bundled();
        let out = n.normalize_text(&text);
        prop_assert_eq!(quantity_multiset(&out), quantity_multiset(&text), "output: {}", out);
    }
}
