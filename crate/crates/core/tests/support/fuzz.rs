use std::collections::BTreeSet;

use rxsig::matcher::PatternItem;
use rxsig::normalizer::RuleSet;
use rxsig::sig_text::Lexicon;

/// Every literal word in the bundled lexicon and rules, plus number forms.
pub fn alphabet() -> Vec<String> {
    let mut words = BTreeSet::new();
    let items = Lexicon::bundled()
        .entries()
        .iter()
        .flat_map(|e| e.pattern.items().to_vec())
        .chain(RuleSet::bundled().rules().iter().flat_map(|r| {
            r.pattern
                .items()
                .iter()
                .chain(&r.replacement)
                .cloned()
                .collect::<Vec<_>>()
        }));
    for item in items {
        if let PatternItem::Word(w) = item {
            words.insert(w);
        }
    }
    for extra in [
        "1", "2", "0.5", "1/2", "1 1/2", "one", "two", "half", "and", "a", "(", ")", ".", ",", ";",
        "90", "3.333", "x90", "q4h", "oce", "daily", "take", "-",
    ] {
        words.insert(extra.to_string());
    }
    words.into_iter().collect()
}
