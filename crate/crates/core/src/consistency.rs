//! Numeric consistency checks between a source direction and a candidate,
//! and backoff to the source when no candidate passes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sig_text::{scan_quantities, tag_text, tokenize, ComponentTag, Lexicon, Quantity, TaggedDirection};
use crate::translation::Candidate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Token,
    Component,
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckMode::Token => "token",
            CheckMode::Component => "component",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown checker mode {0:?}; expected token or component")]
pub struct UnknownMode(pub String);

impl FromStr for CheckMode {
    type Err = UnknownMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "token" => Ok(CheckMode::Token),
            "component" => Ok(CheckMode::Component),
            _ => Err(UnknownMode(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckScope {
    Token,
    Dosage,
    Frequency,
    Duration,
}

impl CheckScope {
    fn of_tag(tag: ComponentTag) -> Self {
        match tag {
            ComponentTag::Dosage => CheckScope::Dosage,
            ComponentTag::Frequency => CheckScope::Frequency,
            ComponentTag::Duration => CheckScope::Duration,
            other => unreachable!("{other} is not a checked component"),
        }
    }
}

/// Canonical values on each side of a failed comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub scope: CheckScope,
    pub source: Vec<String>,
    pub candidate: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub token_consistent: bool,
    pub component_consistent: bool,
    pub mismatches: Vec<Mismatch>,
}

impl CheckReport {
    pub fn consistent() -> Self {
        CheckReport {
            token_consistent: true,
            component_consistent: true,
            mismatches: Vec::new(),
        }
    }

    pub fn passes(&self, mode: CheckMode) -> bool {
        match mode {
            CheckMode::Token => self.token_consistent,
            CheckMode::Component => self.component_consistent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Candidate,
    BackoffSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalDirection {
    pub text: String,
    pub provenance: Provenance,
    pub report: CheckReport,
}

fn canonical_values(quantities: &[Quantity]) -> Vec<String> {
    quantities.iter().map(Quantity::canonical).collect()
}

/// Compares the multisets of every quantity in both texts.
pub fn token_numeric_check(source: &str, candidate: &str) -> Option<Mismatch> {
    let values = |text: &str| -> Vec<String> {
        scan_quantities(&tokenize(text))
            .into_iter()
            .map(|run| run.quantity.canonical())
            .collect()
    };
    let source = values(source);
    let candidate = values(candidate);
    let mut a = source.clone();
    let mut b = candidate.clone();
    a.sort();
    b.sort();
    (a != b).then_some(Mismatch {
        scope: CheckScope::Token,
        source,
        candidate,
    })
}

/// Compares Dosage, Frequency and Duration values in order.
///
/// A component with source values must match exactly. A component that has
/// no source values tolerates candidate values that reuse untagged source
/// numbers; each untagged number can be reused once.
pub fn component_numeric_check(source: &TaggedDirection, candidate: &TaggedDirection) -> Vec<Mismatch> {
    let empty = Vec::new();
    let mut untagged: BTreeMap<String, usize> = BTreeMap::new();
    for q in source.numerics().get(&ComponentTag::Other).unwrap_or(&empty) {
        *untagged.entry(q.canonical()).or_default() += 1;
    }
    let mut mismatches = Vec::new();
    for tag in ComponentTag::NUMERIC {
        let s = canonical_values(source.numerics().get(&tag).unwrap_or(&empty));
        let c = canonical_values(candidate.numerics().get(&tag).unwrap_or(&empty));
        let ok = if s.is_empty() {
            c.iter().all(|v| match untagged.get_mut(v) {
                Some(n) if *n > 0 => {
                    *n -= 1;
                    true
                }
                _ => false,
            })
        } else {
            s == c
        };
        if !ok {
            mismatches.push(Mismatch {
                scope: CheckScope::of_tag(tag),
                source: s,
                candidate: c,
            });
        }
    }
    mismatches
}

/// Runs both checks with a fixed lexicon.
#[derive(Debug, Clone, Copy)]
pub struct Checker<'a> {
    lexicon: &'a Lexicon,
}

impl<'a> Checker<'a> {
    pub fn new(lexicon: &'a Lexicon) -> Self {
        Checker { lexicon }
    }

    pub fn bundled() -> Checker<'static> {
        Checker::new(Lexicon::bundled())
    }

    pub fn check(&self, source: &str, candidate: &str) -> CheckReport {
        let token = token_numeric_check(source, candidate);
        let component = component_numeric_check(
            &tag_text(source, self.lexicon),
            &tag_text(candidate, self.lexicon),
        );
        let mut report = CheckReport {
            token_consistent: token.is_none(),
            component_consistent: component.is_empty(),
            mismatches: Vec::new(),
        };
        report.mismatches.extend(token);
        report.mismatches.extend(component);
        report
    }

    pub fn passes(&self, mode: CheckMode, source: &str, candidate: &str) -> bool {
        match mode {
            CheckMode::Token => token_numeric_check(source, candidate).is_none(),
            CheckMode::Component => component_numeric_check(
                &tag_text(source, self.lexicon),
                &tag_text(candidate, self.lexicon),
            )
            .is_empty(),
        }
    }

    /// Picks the highest-scoring candidate that passes `mode`, or falls back
    /// to the verbatim source. Equal scores keep their input order.
    pub fn resolve_backoff(&self, source: &str, candidates: &[Candidate], mode: CheckMode) -> FinalDirection {
        let mut ranked: Vec<&Candidate> = candidates.iter().collect();
        ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
        let mut top_report = None;
        for cand in ranked {
            let report = self.check(source, &cand.text);
            if report.passes(mode) {
                return FinalDirection {
                    text: cand.text.clone(),
                    provenance: Provenance::Candidate,
                    report,
                };
            }
            top_report.get_or_insert(report);
        }
        FinalDirection {
            text: source.to_string(),
            provenance: Provenance::BackoffSource,
            report: top_report.unwrap_or_else(CheckReport::consistent),
        }
    }

    pub fn flag_counts<S: AsRef<str> + Sync>(&self, pairs: &[(S, S)]) -> FlagCounts {
        pairs
            .par_iter()
            .map(|(s, c)| FlagCounts::of_report(&self.check(s.as_ref(), c.as_ref())))
            .reduce(FlagCounts::default, |a, b| a.add(&b))
    }
}

/// Number of pairs flagged by each checker.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagCounts {
    pub n: usize,
    pub token: usize,
    pub dosage: usize,
    pub frequency: usize,
    pub duration: usize,
    /// Pairs flagged on any component.
    pub component: usize,
}

impl FlagCounts {
    pub fn of_report(report: &CheckReport) -> Self {
        let has = |scope| report.mismatches.iter().any(|m| m.scope == scope);
        FlagCounts {
            n: 1,
            token: usize::from(!report.token_consistent),
            dosage: usize::from(has(CheckScope::Dosage)),
            frequency: usize::from(has(CheckScope::Frequency)),
            duration: usize::from(has(CheckScope::Duration)),
            component: usize::from(!report.component_consistent),
        }
    }

    pub fn add(&self, other: &FlagCounts) -> FlagCounts {
        FlagCounts {
            n: self.n + other.n,
            token: self.token + other.token,
            dosage: self.dosage + other.dosage,
            frequency: self.frequency + other.frequency,
            duration: self.duration + other.duration,
            component: self.component + other.component,
        }
    }
}

pub fn checker_flag_counts<S: AsRef<str> + Sync>(pairs: &[(S, S)]) -> FlagCounts {
    Checker::bundled().flag_counts(pairs)
}
