use std::collections::HashSet;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynonymError {
    #[error("cannot read synonym table: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `word<TAB>word`")]
    Malformed { line: u64 },
}

/// Symmetric word-pair table used by the METEOR synonym stage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    pairs: HashSet<(String, String)>,
}

static BUNDLED: OnceLock<SynonymTable> = OnceLock::new();

impl SynonymTable {
    /// Parses `word<TAB>word` lines; `#` comments and blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, SynonymError> {
        let mut table = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
            match fields.as_slice() {
                [a, b] if !a.is_empty() && !b.is_empty() => table.insert(a, b),
                _ => {
                    return Err(SynonymError::Malformed {
                        line: idx as u64 + 1,
                    })
                }
            }
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SynonymError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn bundled() -> &'static SynonymTable {
        BUNDLED.get_or_init(|| {
            SynonymTable::parse(crate::resources::SYNONYMS_TSV).expect("bundled synonyms are valid")
        })
    }

    pub fn insert(&mut self, a: &str, b: &str) {
        let (a, b) = (a.to_lowercase(), b.to_lowercase());
        self.pairs.insert((b.clone(), a.clone()));
        self.pairs.insert((a, b));
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.pairs.contains(&(a.to_string(), b.to_string()))
    }

    /// Number of unordered pairs.
    pub fn len(&self) -> usize {
        let self_pairs = self.pairs.iter().filter(|(a, b)| a == b).count();
        (self.pairs.len() - self_pairs) / 2 + self_pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}
