use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::{Pattern, PatternError, PatternIndex};
use crate::tsv::{self, TsvError};

/// Prescription component assigned to a token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentTag {
    Action,
    Dosage,
    Form,
    Route,
    Frequency,
    Duration,
    Reason,
    Drug,
    Other,
}

impl ComponentTag {
    pub const ALL: [ComponentTag; 9] = [
        ComponentTag::Action,
        ComponentTag::Dosage,
        ComponentTag::Form,
        ComponentTag::Route,
        ComponentTag::Frequency,
        ComponentTag::Duration,
        ComponentTag::Reason,
        ComponentTag::Drug,
        ComponentTag::Other,
    ];

    /// The components whose numbers are checked for consistency.
    pub const NUMERIC: [ComponentTag; 3] = [
        ComponentTag::Dosage,
        ComponentTag::Frequency,
        ComponentTag::Duration,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ComponentTag::Action => "action",
            ComponentTag::Dosage => "dosage",
            ComponentTag::Form => "form",
            ComponentTag::Route => "route",
            ComponentTag::Frequency => "frequency",
            ComponentTag::Duration => "duration",
            ComponentTag::Reason => "reason",
            ComponentTag::Drug => "drug",
            ComponentTag::Other => "other",
        }
    }
}

impl fmt::Display for ComponentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown component tag `{0}`")]
pub struct UnknownTag(pub String);

impl FromStr for ComponentTag {
    type Err = UnknownTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ComponentTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownTag(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Format(#[from] TsvError),
    #[error("line {line}: {reason}")]
    Entry { line: u64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub pattern: Pattern,
    pub tag: ComponentTag,
    pub priority: i64,
    pub line: u64,
}

/// Tagging dictionary: `phrase<TAB>tag<TAB>priority` rows.
///
/// Entries are ranked by priority (ascending) and then file order.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    index: PatternIndex,
}

pub const LEXICON_HEADER: [&str; 3] = ["phrase", "tag", "priority"];

static BUNDLED: OnceLock<Lexicon> = OnceLock::new();

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        for row in tsv::rows(text, &LEXICON_HEADER)? {
            let entry_err = |reason: String| LexiconError::Entry {
                line: row.line,
                reason,
            };
            let pattern = Pattern::parse(row.fields[0])
                .map_err(|e: PatternError| entry_err(e.to_string()))?;
            let tag = row.fields[1]
                .parse()
                .map_err(|e: UnknownTag| entry_err(e.to_string()))?;
            let priority = row.fields[2]
                .parse()
                .map_err(|_| entry_err(format!("bad priority `{}`", row.fields[2])))?;
            entries.push(LexiconEntry {
                pattern,
                tag,
                priority,
                line: row.line,
            });
        }
        Ok(Self::from_entries(entries))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn from_entries(mut entries: Vec<LexiconEntry>) -> Self {
        entries.sort_by_key(|e| (e.priority, e.line));
        let index = PatternIndex::new(entries.iter().map(|e| e.pattern.clone()).collect());
        Self { entries, index }
    }

    /// The lexicon shipped with the crate.
    pub fn bundled() -> &'static Lexicon {
        BUNDLED.get_or_init(|| {
            Lexicon::parse(crate::resources::LEXICON_TSV).expect("bundled lexicon is valid")
        })
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn index(&self) -> &PatternIndex {
        &self.index
    }

    pub(crate) fn tag_of_rank(&self, rank: usize) -> ComponentTag {
        self.entries[rank].tag
    }
}
