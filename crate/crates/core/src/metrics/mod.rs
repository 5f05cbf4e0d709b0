//! BLEU-4 and METEOR scoring over the shared tokenizer.

pub mod bleu;
pub mod meteor;
pub mod stem;
pub mod synonyms;

use serde::Serialize;
use thiserror::Error;

pub use bleu::{corpus_bleu, corpus_stats, sentence_bleu, BleuScore, NGramStats};
pub use meteor::{align, meteor, meteor_tokens, AlignedPair, MatchStage, MeteorAlignment, MeteorScore};
pub use synonyms::{SynonymError, SynonymTable};

use crate::num::Scalar;
use crate::sig_text::tokenize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("length threshold must be at least 1")]
    InvalidThreshold,
    #[error("{sources} sources but {candidates} candidates and {references} references")]
    LengthMismatch {
        sources: usize,
        candidates: usize,
        references: usize,
    },
}

/// Token texts as scored by both metrics.
pub fn metric_tokens(text: &str) -> Vec<String> {
    tokenize(text).into_iter().map(|t| t.text).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stratum<F> {
    pub size: usize,
    pub bleu: BleuScore<F>,
}

/// Corpus BLEU split by source length in whitespace-separated words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthStrata<F> {
    pub threshold: usize,
    /// Sources shorter than the threshold; absent when there are none.
    pub short: Option<Stratum<F>>,
    pub long: Option<Stratum<F>>,
}

pub fn length_stratified_report<F: Scalar, S: AsRef<str> + Sync>(
    sources: &[S],
    candidates: &[S],
    references: &[S],
    threshold: usize,
) -> Result<LengthStrata<F>, MetricError> {
    if threshold == 0 {
        return Err(MetricError::InvalidThreshold);
    }
    if sources.len() != candidates.len() || sources.len() != references.len() {
        return Err(MetricError::LengthMismatch {
            sources: sources.len(),
            candidates: candidates.len(),
            references: references.len(),
        });
    }
    let mut short = Vec::new();
    let mut long = Vec::new();
    for ((s, c), r) in sources.iter().zip(candidates).zip(references) {
        let bucket = if s.as_ref().split_whitespace().count() < threshold {
            &mut short
        } else {
            &mut long
        };
        bucket.push((c.as_ref(), r.as_ref()));
    }
    let stratum = |pairs: Vec<(&str, &str)>| -> Option<Stratum<F>> {
        let size = pairs.len();
        corpus_bleu(&pairs).ok().map(|bleu| Stratum { size, bleu })
    };
    Ok(LengthStrata {
        threshold,
        short: stratum(short),
        long: stratum(long),
    })
}
