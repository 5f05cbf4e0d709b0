//! Translators that turn a (possibly augmented) source direction into
//! scored candidates.

mod external;
mod retrieval;

pub use external::{ExternalConfig, ExternalTranslator, Request, Response};
pub use retrieval::{build_retrieval_table, RetrievalTable, RetrievalTranslator};

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{strip_auxiliary, Split, AUX_SEPARATOR};
use crate::normalizer::Normalizer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub text: String,
    pub score: f64,
}

impl Candidate {
    pub fn new(text: impl Into<String>, score: f64) -> Self {
        Candidate {
            text: text.into(),
            score,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TranslatorKind {
    RuleBaseline,
    Retrieval,
    External,
}

impl TranslatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TranslatorKind::RuleBaseline => "rule-baseline",
            TranslatorKind::Retrieval => "retrieval",
            TranslatorKind::External => "external",
        }
    }
}

impl fmt::Display for TranslatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TranslatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "rule-baseline" | "baseline" | "rules" => Ok(TranslatorKind::RuleBaseline),
            "retrieval" => Ok(TranslatorKind::Retrieval),
            "external" => Ok(TranslatorKind::External),
            _ => Err(format!("unknown translator {s:?}; expected rule-baseline, retrieval or external")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslateError {
    #[error("external translator unreachable: {0}")]
    Unreachable(String),
    #[error("no reply for request {id} within {after:?}")]
    Timeout { id: String, after: Duration },
    #[error("malformed reply from external translator: {0}")]
    Malformed(String),
    #[error("pair {id} belongs to the {split} split and cannot train the retrieval table")]
    Leakage { id: String, split: Split },
    #[error("pair {0} has no reference")]
    MissingReference(String),
}

pub trait Translator: Send + Sync {
    fn kind(&self) -> TranslatorKind;

    /// Candidates for one input. Candidate texts are never empty.
    fn translate(&self, input: &str) -> Result<Vec<Candidate>, TranslateError>;

    /// One result per input, in input order.
    fn translate_all(&self, inputs: &[String]) -> Vec<Result<Vec<Candidate>, TranslateError>> {
        inputs.par_iter().map(|i| self.translate(i)).collect()
    }
}

/// The normalizer used as a translator. An auxiliary prefix is ignored.
pub struct RuleBaseline<'a> {
    normalizer: Normalizer<'a>,
}

impl<'a> RuleBaseline<'a> {
    pub fn new(normalizer: Normalizer<'a>) -> Self {
        RuleBaseline { normalizer }
    }

    pub fn bundled() -> RuleBaseline<'static> {
        RuleBaseline::new(Normalizer::bundled())
    }
}

impl Translator for RuleBaseline<'_> {
    fn kind(&self) -> TranslatorKind {
        TranslatorKind::RuleBaseline
    }

    fn translate(&self, input: &str) -> Result<Vec<Candidate>, TranslateError> {
        let text = self
            .normalizer
            .normalize_text(strip_auxiliary(input, AUX_SEPARATOR));
        Ok(if text.trim().is_empty() {
            Vec::new()
        } else {
            vec![Candidate::new(text, 1.0)]
        })
    }
}
