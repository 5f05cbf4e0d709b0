//! Parallel corpus loading, auxiliary augmentation, leakage-free splitting
//! and the manual review round trip.

mod review;
mod split;

pub use review::{
    read_review_csv, sample_for_review, tally_review, write_review_csv, LabelCount, ReviewItem, ReviewLabel,
    ReviewTally, REVIEW_HEADER,
};
pub use split::{
    canonical_key, dedup_group_split, parse_split_tsv, Split, SplitAssignment, SplitPlan, SplitRatios,
};

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const AUX_SEPARATOR: &str = "||";

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: duplicate id {id:?} (first seen on line {first_line})")]
    DuplicateId { id: String, line: usize, first_line: usize },
    #[error("split ratios must be non-negative and sum to 1, got {0:?}")]
    InvalidRatios([f64; 3]),
    #[error("corpus is empty")]
    Empty,
    #[error("{outputs} outputs for {pairs} pairs")]
    OutputCount { pairs: usize, outputs: usize },
    #[error("cannot sample {requested} of {available} pairs")]
    SampleTooLarge { requested: usize, available: usize },
    #[error("row {row} ({pair_id}) is unlabeled")]
    Unlabeled { row: usize, pair_id: String },
    #[error("row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DrugInfo {
    pub name: String,
    #[serde(default)]
    pub strength: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrescriptionPair {
    pub id: String,
    pub source: String,
    pub reference: Option<String>,
    pub drug: Option<DrugInfo>,
}

impl PrescriptionPair {
    pub fn new(id: impl Into<String>, source: impl Into<String>, reference: impl Into<String>) -> Self {
        PrescriptionPair {
            id: id.into(),
            source: source.into(),
            reference: Some(reference.into()),
            drug: None,
        }
    }

    pub fn with_drug(mut self, name: impl Into<String>, strength: impl Into<String>) -> Self {
        self.drug = Some(DrugInfo {
            name: name.into(),
            strength: strength.into(),
        });
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MalformedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadedCorpus {
    pub pairs: Vec<PrescriptionPair>,
    pub malformed: Vec<MalformedLine>,
}

#[derive(Deserialize)]
struct RawDrug {
    name: Option<String>,
    strength: Option<String>,
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<serde_json::Value>,
    source: Option<String>,
    reference: Option<String>,
    drug_name: Option<String>,
    drug_strength: Option<String>,
    drug: Option<RawDrug>,
}

fn parse_record(line: usize, text: &str) -> Result<PrescriptionPair, String> {
    let raw: RawRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let source = raw.source.ok_or("missing source field")?;
    if source.trim().is_empty() {
        return Err("empty source".into());
    }
    let id = match raw.id {
        None | Some(serde_json::Value::Null) => format!("L{line}"),
        Some(serde_json::Value::String(s)) => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        Some(other) => return Err(format!("id must be a string or number, got {other}")),
    };
    let (name, strength) = match raw.drug {
        Some(d) => (d.name, d.strength),
        None => (raw.drug_name, raw.drug_strength),
    };
    let drug = name
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty())
        .map(|name| DrugInfo {
            name,
            strength: strength.unwrap_or_default().trim().to_string(),
        });
    Ok(PrescriptionPair {
        id,
        source,
        reference: raw.reference,
        drug,
    })
}

/// Parses JSON-lines corpus text. Malformed lines are collected and
/// skipped; a repeated id is an error.
pub fn parse_corpus(text: &str) -> Result<LoadedCorpus, CorpusError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let parsed: Vec<(usize, Result<PrescriptionPair, String>)> = lines
        .par_iter()
        .map(|(line, l)| (*line, parse_record(*line, l)))
        .collect();
    let mut out = LoadedCorpus::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (line, result) in parsed {
        match result {
            Ok(pair) => {
                if let Some(first_line) = seen.insert(pair.id.clone(), line) {
                    return Err(CorpusError::DuplicateId {
                        id: pair.id,
                        line,
                        first_line,
                    });
                }
                out.pairs.push(pair);
            }
            Err(reason) => out.malformed.push(MalformedLine { line, reason }),
        }
    }
    Ok(out)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<LoadedCorpus, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_corpus(&text)
}

/// `<name> <strength> <separator> <source>`, or the bare source when the
/// pair has no drug information.
pub fn augment_auxiliary(pair: &PrescriptionPair, separator: &str) -> String {
    match &pair.drug {
        None => pair.source.clone(),
        Some(drug) => {
            let mut out = drug.name.clone();
            if !drug.strength.is_empty() {
                out.push(' ');
                out.push_str(&drug.strength);
            }
            format!("{out} {separator} {}", pair.source)
        }
    }
}

/// The direction text after an auxiliary prefix, or the whole text.
pub fn strip_auxiliary<'t>(text: &'t str, separator: &str) -> &'t str {
    let marker = format!(" {separator} ");
    match text.find(&marker) {
        Some(at) => &text[at + marker.len()..],
        None => text,
    }
}
