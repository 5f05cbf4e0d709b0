//! Data files shipped with the crate.

pub const LEXICON_TSV: &str = include_str!("../data/lexicon.tsv");
pub const RULES_TSV: &str = include_str!("../data/rules.tsv");
pub const SYNONYMS_TSV: &str = include_str!("../data/synonyms.tsv");
/// About 350 direction pairs with references, drug information and
/// duplicated sources.
pub const MINI_CORPUS_JSONL: &str = include_str!("../data/mini_corpus.jsonl");
/// Source/candidate pairs where dosage and frequency numbers are swapped.
pub const SWAP_SUITE_JSONL: &str = include_str!("../data/swap_suite.jsonl");

use serde::Deserialize;

use crate::corpus::{parse_corpus, PrescriptionPair};

pub fn mini_corpus() -> Vec<PrescriptionPair> {
    parse_corpus(MINI_CORPUS_JSONL)
        .expect("bundled corpus has unique ids")
        .pairs
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct SwapCase {
    pub id: String,
    pub source: String,
    pub candidate: String,
}

pub fn swap_suite() -> Vec<SwapCase> {
    SWAP_SUITE_JSONL
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("bundled swap suite is valid"))
        .collect()
}
