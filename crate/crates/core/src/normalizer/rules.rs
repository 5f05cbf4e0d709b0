use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::{parse_items, Pattern, PatternIndex, PatternItem};
use crate::tsv::{self, TsvError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleCategory {
    Action,
    Dosage,
    Form,
    Route,
    Frequency,
    Duration,
    Abbreviation,
}

impl RuleCategory {
    pub const ALL: [RuleCategory; 7] = [
        RuleCategory::Action,
        RuleCategory::Dosage,
        RuleCategory::Form,
        RuleCategory::Route,
        RuleCategory::Frequency,
        RuleCategory::Duration,
        RuleCategory::Abbreviation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleCategory::Action => "action",
            RuleCategory::Dosage => "dosage",
            RuleCategory::Form => "form",
            RuleCategory::Route => "route",
            RuleCategory::Frequency => "frequency",
            RuleCategory::Duration => "duration",
            RuleCategory::Abbreviation => "abbreviation",
        }
    }

    /// Categories whose unit words agree in number with a preceding slot.
    pub(crate) fn agrees_in_number(self) -> bool {
        matches!(self, RuleCategory::Duration | RuleCategory::Frequency)
    }
}

impl fmt::Display for RuleCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleCategory::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown rule category `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("cannot read rules: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] TsvError),
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("line {line}: duplicate {category} rule `{pattern}` (first defined on line {first_line})")]
    Duplicate {
        line: u64,
        first_line: u64,
        category: RuleCategory,
        pattern: String,
    },
}

impl RuleError {
    pub fn line(&self) -> Option<u64> {
        match self {
            RuleError::Io(_) => None,
            RuleError::Format(e) => Some(e.line()),
            RuleError::Malformed { line, .. } | RuleError::Duplicate { line, .. } => Some(*line),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub category: RuleCategory,
    pub pattern: Pattern,
    pub replacement: Vec<PatternItem>,
    pub priority: i64,
    pub line: u64,
}

impl Rule {
    pub fn replacement_text(&self) -> String {
        self.replacement
            .iter()
            .map(|i| match i {
                PatternItem::Word(w) => w.as_str(),
                PatternItem::Number => crate::matcher::NUMBER_SLOT,
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Ordered normalization rules plus the form-to-verb map.
///
/// Rows are `category<TAB>pattern<TAB>replacement<TAB>priority`. Action
/// rows do not rewrite text; they map a form or route word to the verb
/// inserted when a direction has no action.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    rules: Vec<Rule>,
    index: PatternIndex,
    actions: Vec<(String, String)>,
    verbs: BTreeSet<String>,
}

pub const RULES_HEADER: [&str; 4] = ["category", "pattern", "replacement", "priority"];

static BUNDLED: OnceLock<RuleSet> = OnceLock::new();

impl RuleSet {
    pub fn parse(text: &str) -> Result<Self, RuleError> {
        let mut rules = Vec::new();
        let mut seen: HashMap<(RuleCategory, Pattern), u64> = HashMap::new();
        for row in tsv::rows(text, &RULES_HEADER)? {
            let line = row.line;
            let malformed = |reason: String| RuleError::Malformed { line, reason };
            let category: RuleCategory = row.fields[0].parse().map_err(malformed)?;
            let pattern = Pattern::parse(row.fields[1])
                .map_err(|e| malformed(format!("pattern: {e}")))?;
            let replacement =
                parse_items(row.fields[2]).map_err(|e| malformed(format!("replacement: {e}")))?;
            let priority = row.fields[3]
                .parse()
                .map_err(|_| malformed(format!("bad priority `{}`", row.fields[3])))?;

            let slots = replacement
                .iter()
                .filter(|i| matches!(i, PatternItem::Number))
                .count();
            if slots != pattern.captures() {
                return Err(malformed(format!(
                    "replacement has {slots} slot(s) but pattern captures {}",
                    pattern.captures()
                )));
            }
            if category == RuleCategory::Action
                && (pattern.len() != 1 || pattern.captures() != 0 || replacement.len() != 1)
            {
                return Err(malformed(
                    "action rows map one word to one verb".to_string(),
                ));
            }
            if let Some(first_line) = seen.insert((category, pattern.clone()), line) {
                return Err(RuleError::Duplicate {
                    line,
                    first_line,
                    category,
                    pattern: pattern.to_string(),
                });
            }
            rules.push(Rule {
                category,
                pattern,
                replacement,
                priority,
                line,
            });
        }
        Ok(Self::from_rules(rules))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RuleError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn bundled() -> &'static RuleSet {
        BUNDLED.get_or_init(|| {
            RuleSet::parse(crate::resources::RULES_TSV).expect("bundled rules are valid")
        })
    }

    fn from_rules(all: Vec<Rule>) -> Self {
        let (actions, mut rules): (Vec<Rule>, Vec<Rule>) = all
            .into_iter()
            .partition(|r| r.category == RuleCategory::Action);
        rules.sort_by_key(|r| (r.priority, r.line));
        let mut actions: Vec<Rule> = actions;
        actions.sort_by_key(|r| (r.priority, r.line));
        let actions: Vec<(String, String)> = actions
            .iter()
            .filter_map(|r| match (&r.pattern.items()[0], &r.replacement[0]) {
                (PatternItem::Word(k), PatternItem::Word(v)) => Some((k.clone(), v.clone())),
                _ => None,
            })
            .collect();
        let verbs = actions.iter().map(|(_, v)| v.clone()).collect();
        let index = PatternIndex::new(rules.iter().map(|r| r.pattern.clone()).collect());
        Self {
            rules,
            index,
            actions,
            verbs,
        }
    }

    /// Rewriting rules in application order (priority, then file order).
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len() + self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Verb for a form or route word, if any.
    pub fn action_for(&self, word: &str) -> Option<&str> {
        self.actions
            .iter()
            .find(|(k, _)| k == word)
            .map(|(_, v)| v.as_str())
    }

    pub fn is_action_verb(&self, word: &str) -> bool {
        self.verbs.contains(word)
    }

    pub(crate) fn index(&self) -> &PatternIndex {
        &self.index
    }
}
