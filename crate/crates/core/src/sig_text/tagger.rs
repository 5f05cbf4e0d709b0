use std::collections::BTreeMap;

use super::lexicon::{ComponentTag, Lexicon};
use super::quantity::Quantity;
use super::token::{tokenize, Token};
use crate::matcher::{units, Unit};

/// A tokenized direction with one component tag per token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedDirection {
    tokens: Vec<Token>,
    tags: Vec<ComponentTag>,
    units: Vec<Unit>,
    numerics: BTreeMap<ComponentTag, Vec<Quantity>>,
}

impl TaggedDirection {
    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tags(&self) -> &[ComponentTag] {
        &self.tags
    }

    pub fn units(&self) -> &[Unit] {
        &self.units
    }

    /// Quantities found under each tag, in token order. Tags without
    /// quantities are absent.
    pub fn numerics(&self) -> &BTreeMap<ComponentTag, Vec<Quantity>> {
        &self.numerics
    }

    pub fn unit_tag(&self, unit: usize) -> ComponentTag {
        self.tags[self.units[unit].tokens.start]
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Tags tokens with prescription components.
///
/// Lexicon phrases are matched with longest-match-wins overlap resolution.
/// A number inside a phrase takes the phrase's tag, except inside a Form
/// phrase where it becomes Dosage. Remaining untagged numbers directly
/// before a Form token become Dosage. Everything else is Other.
pub fn tag_components(tokens: Vec<Token>, lexicon: &Lexicon) -> TaggedDirection {
    let units = units(&tokens);
    let mut unit_tags = vec![ComponentTag::Other; units.len()];
    for m in lexicon.index().find(&tokens, &units, |_| true) {
        let tag = lexicon.tag_of_rank(m.rank);
        for u in m.units() {
            unit_tags[u] = match (tag, &units[u].quantity) {
                (ComponentTag::Form, Some(_)) => ComponentTag::Dosage,
                (tag, _) => tag,
            };
        }
    }
    for u in 0..units.len().saturating_sub(1) {
        if units[u].quantity.is_some()
            && unit_tags[u] == ComponentTag::Other
            && unit_tags[u + 1] == ComponentTag::Form
        {
            unit_tags[u] = ComponentTag::Dosage;
        }
    }

    let mut tags = vec![ComponentTag::Other; tokens.len()];
    let mut numerics: BTreeMap<ComponentTag, Vec<Quantity>> = BTreeMap::new();
    for (unit, tag) in units.iter().zip(&unit_tags) {
        tags[unit.tokens.clone()].iter_mut().for_each(|t| *t = *tag);
        if let Some(q) = &unit.quantity {
            numerics.entry(*tag).or_default().push(q.clone());
        }
    }
    TaggedDirection {
        tokens,
        tags,
        units,
        numerics,
    }
}

pub fn tag_text(text: &str, lexicon: &Lexicon) -> TaggedDirection {
    tag_components(tokenize(text), lexicon)
}

/// Dosage, Frequency and Duration quantities; every key is present.
pub fn extract_numerics(tagged: &TaggedDirection) -> BTreeMap<ComponentTag, Vec<Quantity>> {
    ComponentTag::NUMERIC
        .into_iter()
        .map(|tag| (tag, tagged.numerics.get(&tag).cloned().unwrap_or_default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ComponentTag::*;

    fn tagged(text: &str) -> Vec<(String, ComponentTag)> {
        let t = tag_text(text, Lexicon::bundled());
        t.tokens()
            .iter()
            .zip(t.tags())
            .map(|(tok, tag)| (tok.text.clone(), *tag))
            .collect()
    }

    fn pairs(v: &[(&str, ComponentTag)]) -> Vec<(String, ComponentTag)> {
        v.iter().map(|(s, t)| (s.to_string(), *t)).collect()
    }

    fn numerics(text: &str) -> Vec<(ComponentTag, Vec<String>)> {
        extract_numerics(&tag_text(text, Lexicon::bundled()))
            .into_iter()
            .map(|(k, v)| (k, v.iter().map(Quantity::canonical).collect()))
            .collect()
    }

    #[test]
    fn worked_inhaler_example() {
        assert_eq!(
            tagged("2 puffs orally q 4 hrs x90 dys wheeze"),
            pairs(&[
                ("2", Dosage),
                ("puffs", Form),
                ("orally", Route),
                ("q", Frequency),
                ("4", Frequency),
                ("hrs", Frequency),
                ("x", Duration),
                ("90", Duration),
                ("dys", Duration),
                ("wheeze", Reason),
            ])
        );
    }

    #[test]
    fn normalized_direction() {
        assert_eq!(
            tagged("take 1 tablet by mouth every morning"),
            pairs(&[
                ("take", Action),
                ("1", Dosage),
                ("tablet", Form),
                ("by", Route),
                ("mouth", Route),
                ("every", Frequency),
                ("morning", Frequency),
            ])
        );
    }

    #[test]
    fn gibberish_is_other() {
        assert!(tagged("zzq blorp ,, wug").iter().all(|(_, t)| *t == Other));
        assert!(tagged("").is_empty());
    }

    #[test]
    fn numerics_per_component() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(
            numerics("take 2 tablets every 4 hours"),
            vec![(Dosage, s(&["2"])), (Frequency, s(&["4"])), (Duration, s(&[]))]
        );
        assert_eq!(
            numerics("1/2 tab bid orally 90."),
            vec![(Dosage, s(&["0.5"])), (Frequency, s(&[])), (Duration, s(&[]))]
        );
        assert_eq!(
            numerics(""),
            vec![(Dosage, s(&[])), (Frequency, s(&[])), (Duration, s(&[]))]
        );
        let t = tag_text("1/2 tab bid orally 90.", Lexicon::bundled());
        assert_eq!(t.numerics()[&Other][0].canonical(), "90");
    }

    #[test]
    fn ambiguous_in_only_after_a_number() {
        let t = tagged("1 in sq daily");
        assert_eq!(t[1], ("in".to_string(), Form));
        assert_eq!(t[0].1, Dosage);
        let t = tagged("4 in the nose");
        assert_eq!(t[0].1, Other);
        assert_eq!(t[1].1, Route);
    }

    #[test]
    fn strength_is_drug_not_dosage() {
        let t = tagged("3.5 tab 7 mg");
        assert_eq!(t[0].1, Dosage);
        assert_eq!(t[2].1, Drug);
    }
}
