use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CorpusError, PrescriptionPair};
use crate::num::Scalar;

pub const REVIEW_HEADER: [&str; 4] = ["pair_id", "source", "system_output", "label"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReviewLabel {
    Correct,
    Missing,
    Wrong,
    Unlabeled,
}

impl ReviewLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ReviewLabel::Correct => "Correct",
            ReviewLabel::Missing => "Missing",
            ReviewLabel::Wrong => "Wrong",
            ReviewLabel::Unlabeled => "Unlabeled",
        }
    }
}

impl fmt::Display for ReviewLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReviewLabel {
    type Err = String;

    /// Case-insensitive; a blank label reads as Unlabeled.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(ReviewLabel::Unlabeled);
        }
        [
            ReviewLabel::Correct,
            ReviewLabel::Missing,
            ReviewLabel::Wrong,
            ReviewLabel::Unlabeled,
        ]
        .into_iter()
        .find(|l| l.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown label {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub pair_id: String,
    pub source: String,
    pub system_output: String,
    pub label: ReviewLabel,
}

/// Uniform sample of `n` pairs without replacement, in corpus order.
pub fn sample_for_review<S: AsRef<str>>(
    pairs: &[PrescriptionPair],
    outputs: &[S],
    n: usize,
    seed: u64,
) -> Result<Vec<ReviewItem>, CorpusError> {
    if outputs.len() != pairs.len() {
        return Err(CorpusError::OutputCount {
            pairs: pairs.len(),
            outputs: outputs.len(),
        });
    }
    if n > pairs.len() {
        return Err(CorpusError::SampleTooLarge {
            requested: n,
            available: pairs.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, pairs.len(), n).into_vec();
    picked.sort_unstable();
    Ok(picked
        .into_iter()
        .map(|i| ReviewItem {
            pair_id: pairs[i].id.clone(),
            source: pairs[i].source.clone(),
            system_output: outputs[i].as_ref().to_string(),
            label: ReviewLabel::Unlabeled,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LabelCount<F> {
    pub count: usize,
    pub percent: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReviewTally<F> {
    pub total: usize,
    pub correct: LabelCount<F>,
    pub missing: LabelCount<F>,
    pub wrong: LabelCount<F>,
}

/// Label percentages, unrounded. Every item must be labeled.
pub fn tally_review<F: Scalar>(items: &[ReviewItem]) -> Result<ReviewTally<F>, CorpusError> {
    if items.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut counts = [0usize; 3];
    for (row, item) in items.iter().enumerate() {
        let slot = match item.label {
            ReviewLabel::Correct => 0,
            ReviewLabel::Missing => 1,
            ReviewLabel::Wrong => 2,
            ReviewLabel::Unlabeled => {
                return Err(CorpusError::Unlabeled {
                    row: row + 1,
                    pair_id: item.pair_id.clone(),
                })
            }
        };
        counts[slot] += 1;
    }
    let total = items.len();
    let of = |count: usize| LabelCount {
        count,
        percent: F::of(100.0) * F::of_usize(count) / F::of_usize(total),
    };
    Ok(ReviewTally {
        total,
        correct: of(counts[0]),
        missing: of(counts[1]),
        wrong: of(counts[2]),
    })
}

pub fn write_review_csv<W: Write>(items: &[ReviewItem], writer: W) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REVIEW_HEADER)?;
    for item in items {
        w.write_record([
            item.pair_id.as_str(),
            item.source.as_str(),
            item.system_output.as_str(),
            item.label.as_str(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a review file; `row` in errors counts data rows from 1.
pub fn read_review_csv<R: Read>(reader: R) -> Result<Vec<ReviewItem>, CorpusError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    if header != REVIEW_HEADER {
        return Err(CorpusError::BadRow {
            row: 0,
            reason: format!("expected header {}", REVIEW_HEADER.join(",")),
        });
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let label = rec[3]
                .parse()
                .map_err(|reason| CorpusError::BadRow { row: i + 1, reason })?;
            Ok(ReviewItem {
                pair_id: rec[0].to_string(),
                source: rec[1].to_string(),
                system_output: rec[2].to_string(),
                label,
            })
        })
        .collect()
}
