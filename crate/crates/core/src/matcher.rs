//! Token-sequence patterns with numeric captures, and the overlap
//! resolution shared by the component tagger and the rule engine.
//!
//! Patterns are matched over *units*: a unit is either one non-numeric
//! token or a whole quantity run (`one and half`, `1 1/2`, `one (1)`).
//! Among overlapping matches the longer one wins; equal lengths go to the
//! earlier start, then to the lower rank.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::sig_text::quantity::{parse_quantity, scan_quantities, Quantity};
use crate::sig_text::token::{tokenize, Token};

pub const NUMBER_SLOT: &str = "<n>";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern is empty")]
    Empty,
    #[error("literal number `{0}` in pattern; use <n>")]
    NumericLiteral(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternItem {
    Word(String),
    Number,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern {
    items: Vec<PatternItem>,
}

impl Pattern {
    pub fn parse(text: &str) -> Result<Self, PatternError> {
        let items = parse_items(text)?;
        if items.is_empty() {
            return Err(PatternError::Empty);
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[PatternItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn captures(&self) -> usize {
        self.items
            .iter()
            .filter(|i| matches!(i, PatternItem::Number))
            .count()
    }

    fn matches_at(&self, tokens: &[Token], units: &[Unit], start: usize) -> bool {
        if start + self.items.len() > units.len() {
            return false;
        }
        self.items
            .iter()
            .zip(&units[start..])
            .all(|(item, unit)| match item {
                PatternItem::Number => unit.quantity.is_some(),
                PatternItem::Word(w) => {
                    unit.quantity.is_none() && tokens[unit.tokens.start].text == *w
                }
            })
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match item {
                PatternItem::Word(w) => f.write_str(w)?,
                PatternItem::Number => f.write_str(NUMBER_SLOT)?,
            }
        }
        Ok(())
    }
}

/// Splits `text` on `<n>` slots and tokenizes the literal pieces.
/// Literal numbers are rejected so that every number goes through a slot.
pub(crate) fn parse_items(text: &str) -> Result<Vec<PatternItem>, PatternError> {
    let mut items = Vec::new();
    for (i, piece) in text.split(NUMBER_SLOT).enumerate() {
        if i > 0 {
            items.push(PatternItem::Number);
        }
        for token in tokenize(piece) {
            if token.is_numeric() || parse_quantity(std::slice::from_ref(&token)).is_some() {
                return Err(PatternError::NumericLiteral(token.text));
            }
            items.push(PatternItem::Word(token.text));
        }
    }
    Ok(items)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unit {
    pub tokens: Range<usize>,
    pub quantity: Option<Quantity>,
}

/// Groups tokens into units.
pub fn units(tokens: &[Token]) -> Vec<Unit> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut next = 0;
    for run in scan_quantities(tokens) {
        out.extend((next..run.tokens.start).map(|i| Unit {
            tokens: i..i + 1,
            quantity: None,
        }));
        next = run.tokens.end;
        out.push(Unit {
            tokens: run.tokens,
            quantity: Some(run.quantity),
        });
    }
    out.extend((next..tokens.len()).map(|i| Unit {
        tokens: i..i + 1,
        quantity: None,
    }));
    out
}

/// A pattern occurrence, in units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Match {
    pub start: usize,
    pub len: usize,
    /// Index of the pattern in the [`PatternIndex`]; lower ranks win ties.
    pub rank: usize,
}

impl Match {
    pub fn units(&self) -> Range<usize> {
        self.start..self.start + self.len
    }
}

/// Patterns bucketed by their first item, in rank order.
#[derive(Debug, Clone, Default)]
pub struct PatternIndex {
    patterns: Vec<Pattern>,
    by_word: HashMap<String, Vec<usize>>,
    by_number: Vec<usize>,
}

impl PatternIndex {
    pub fn new(patterns: Vec<Pattern>) -> Self {
        let mut by_word: HashMap<String, Vec<usize>> = HashMap::new();
        let mut by_number = Vec::new();
        for (rank, p) in patterns.iter().enumerate() {
            match &p.items[0] {
                PatternItem::Word(w) => by_word.entry(w.clone()).or_default().push(rank),
                PatternItem::Number => by_number.push(rank),
            }
        }
        Self {
            patterns,
            by_word,
            by_number,
        }
    }

    pub fn pattern(&self, rank: usize) -> &Pattern {
        &self.patterns[rank]
    }

    /// Every occurrence accepted by `accept`, before overlap resolution.
    pub fn find_all(
        &self,
        tokens: &[Token],
        units: &[Unit],
        mut accept: impl FnMut(&Match) -> bool,
    ) -> Vec<Match> {
        let mut found = Vec::new();
        for (start, unit) in units.iter().enumerate() {
            let bucket = match unit.quantity {
                Some(_) => Some(&self.by_number),
                None => self.by_word.get(&tokens[unit.tokens.start].text),
            };
            for &rank in bucket.into_iter().flatten() {
                let pattern = &self.patterns[rank];
                if pattern.matches_at(tokens, units, start) {
                    let m = Match {
                        start,
                        len: pattern.len(),
                        rank,
                    };
                    if accept(&m) {
                        found.push(m);
                    }
                }
            }
        }
        found
    }

    /// Non-overlapping matches, longest first, ordered by start.
    pub fn find(
        &self,
        tokens: &[Token],
        units: &[Unit],
        accept: impl FnMut(&Match) -> bool,
    ) -> Vec<Match> {
        resolve_overlaps(self.find_all(tokens, units, accept), units.len())
    }
}

pub fn resolve_overlaps(mut matches: Vec<Match>, unit_count: usize) -> Vec<Match> {
    matches.sort_by(|a, b| {
        b.len
            .cmp(&a.len)
            .then(a.start.cmp(&b.start))
            .then(a.rank.cmp(&b.rank))
    });
    let mut taken = vec![false; unit_count];
    let mut chosen = Vec::new();
    for m in matches {
        if taken[m.units()].iter().any(|t| *t) {
            continue;
        }
        taken[m.units()].iter_mut().for_each(|t| *t = true);
        chosen.push(m);
    }
    chosen.sort_by_key(|m| m.start);
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;

    fn index(pats: &[&str]) -> PatternIndex {
        PatternIndex::new(pats.iter().map(|p| Pattern::parse(p).unwrap()).collect())
    }

    #[test]
    fn parses_slots() {
        let p = Pattern::parse("x <n> week").unwrap();
        assert_eq!(
            p.items(),
            &[
                PatternItem::Word("x".into()),
                PatternItem::Number,
                PatternItem::Word("week".into())
            ]
        );
        assert_eq!(p.captures(), 1);
        assert_eq!(p.to_string(), "x <n> week");
        assert_eq!(Pattern::parse("q<n>h").unwrap().to_string(), "q <n> h");
    }

    #[test]
    fn rejects_bad_patterns() {
        assert_eq!(Pattern::parse("  "), Err(PatternError::Empty));
        assert!(matches!(Pattern::parse("take 2"), Err(PatternError::NumericLiteral(_))));
        assert!(matches!(Pattern::parse("one tab"), Err(PatternError::NumericLiteral(_))));
    }

    #[test]
    fn units_group_quantities() {
        let toks = tokenize("take one and half tab");
        let u = units(&toks);
        assert_eq!(u.len(), 3);
        assert_eq!(u[1].tokens, 1..4);
        assert_eq!(u[1].quantity.as_ref().unwrap().canonical(), "1.5");
    }

    #[test]
    fn longer_overlapping_match_wins() {
        let idx = index(&["<n> in", "in the nose"]);
        let toks = tokenize("4 in the nose");
        let u = units(&toks);
        let m = idx.find(&toks, &u, |_| true);
        assert_eq!(m, vec![Match { start: 1, len: 3, rank: 1 }]);
    }

    #[test]
    fn equal_length_ties_go_to_rank() {
        let idx = index(&["every day", "every day"]);
        let toks = tokenize("every day");
        let u = units(&toks);
        let m = idx.find(&toks, &u, |_| true);
        assert_eq!(m[0].rank, 0);
    }

    #[test]
    fn slot_requires_quantity() {
        let idx = index(&["q <n> hrs"]);
        let toks = tokenize("q 4 hrs and q x hrs");
        let u = units(&toks);
        let m = idx.find(&toks, &u, |_| true);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].start, 0);
    }
}
