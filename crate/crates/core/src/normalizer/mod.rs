//! Rule-driven rewriting of directions into patient-facing phrasing.
//!
//! The same engine serves as the rule-based baseline translator.

pub mod rules;

use num_rational::Ratio;

pub use rules::{Rule, RuleCategory, RuleError, RuleSet};

use crate::matcher::PatternItem;
use crate::num::Scalar;
use crate::sig_text::{tag_text, ComponentTag, Lexicon, Quantity, TaggedDirection};

const UNIT_WORDS: [(&str, &str); 12] = [
    ("day", "days"),
    ("week", "weeks"),
    ("month", "months"),
    ("year", "years"),
    ("hour", "hours"),
    ("minute", "minutes"),
    ("puff", "puffs"),
    ("tablet", "tablets"),
    ("capsule", "capsules"),
    ("drop", "drops"),
    ("dose", "doses"),
    ("time", "times"),
];

/// Singular or plural form of a known unit word to agree with `count`.
/// Unknown words are returned unchanged.
pub fn agree(word: &str, count: &Quantity) -> String {
    let plural = count.value() > Ratio::from_integer(1);
    UNIT_WORDS
        .iter()
        .find(|(s, p)| *s == word || *p == word)
        .map(|(s, p)| if plural { *p } else { *s })
        .unwrap_or(word)
        .to_string()
}

/// Rewrites a tagged direction.
///
/// In one left-to-right pass the rule matches (longest first, then
/// priority) are replaced and every quantity is written in canonical
/// decimal form. Form rules only fire on tokens tagged Form. If no action
/// verb remains, the verb for the first form or route word is prepended.
/// Trailing periods are dropped; output is lowercase with a capitalized
/// first letter.
pub fn normalize(tagged: &TaggedDirection, rules: &RuleSet) -> String {
    let tokens = tagged.tokens();
    let units = tagged.units();
    let matches = rules.index().find(tokens, units, |m| {
        rules.rules()[m.rank].category != RuleCategory::Form
            || tagged.unit_tag(m.start) == ComponentTag::Form
    });

    let mut out: Vec<String> = Vec::with_capacity(tokens.len() + 2);
    let mut has_action = false;
    let mut pass_through = |out: &mut Vec<String>, u: usize| {
        let unit = &units[u];
        match &unit.quantity {
            Some(q) => out.push(q.canonical()),
            None => {
                if tagged.unit_tag(u) == ComponentTag::Action {
                    has_action = true;
                }
                out.push(tokens[unit.tokens.start].text.clone());
            }
        }
    };

    let mut cursor = 0;
    for m in &matches {
        for u in cursor..m.start {
            pass_through(&mut out, u);
        }
        let rule = &rules.rules()[m.rank];
        let mut captures = units[m.units()].iter().filter_map(|u| u.quantity.as_ref());
        let mut last_slot: Option<&Quantity> = None;
        for item in &rule.replacement {
            match item {
                PatternItem::Number => {
                    let q = captures.next().expect("slot count validated at load");
                    out.push(q.canonical());
                    last_slot = Some(q);
                }
                PatternItem::Word(w) => {
                    match last_slot.take() {
                        Some(q) if rule.category.agrees_in_number() => out.push(agree(w, q)),
                        _ => out.push(w.clone()),
                    }
                }
            }
        }
        cursor = m.start + m.len;
    }
    for u in cursor..units.len() {
        pass_through(&mut out, u);
    }

    let has_action = has_action || out.iter().any(|w| rules.is_action_verb(w));
    if !has_action {
        if let Some(verb) = out.iter().find_map(|w| rules.action_for(w)) {
            out.insert(0, verb.to_string());
        }
    }
    while out.last().is_some_and(|w| w == ".") {
        out.pop();
    }
    render(&out)
}

/// Joins output words; commas attach to the preceding word.
fn render(words: &[String]) -> String {
    let mut text = String::new();
    for w in words {
        if !text.is_empty() && w != "," {
            text.push(' ');
        }
        text.push_str(w);
    }
    let mut chars = text.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => text,
    }
}

/// Lexicon and rules bundled for text-in, text-out normalization.
#[derive(Debug, Clone, Copy)]
pub struct Normalizer<'a> {
    pub lexicon: &'a Lexicon,
    pub rules: &'a RuleSet,
}

impl<'a> Normalizer<'a> {
    pub fn new(lexicon: &'a Lexicon, rules: &'a RuleSet) -> Self {
        Self { lexicon, rules }
    }

    pub fn bundled() -> Normalizer<'static> {
        Normalizer::new(Lexicon::bundled(), RuleSet::bundled())
    }

    pub fn normalize_text(&self, text: &str) -> String {
        normalize(&tag_text(text, self.lexicon), self.rules)
    }

    /// True when normalization changes `text` beyond letter case.
    pub fn changes(&self, text: &str) -> bool {
        self.normalize_text(text).to_lowercase() != text.to_lowercase()
    }
}

/// Fraction of directions that normalization changes (case-insensitive).
/// Zero for an empty list.
pub fn normalization_ratio<F: Scalar, S: AsRef<str>>(directions: &[S], normalizer: &Normalizer) -> F {
    if directions.is_empty() {
        return F::zero();
    }
    let changed = directions
        .iter()
        .filter(|d| normalizer.changes(d.as_ref()))
        .count();
    F::of_usize(changed) / F::of_usize(directions.len())
}
