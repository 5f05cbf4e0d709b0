use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{metric_tokens, MetricError};
use crate::num::Scalar;

pub const MAX_ORDER: usize = 4;

/// Clipped n-gram matches and totals for orders 1 through 4.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct NGramStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub candidate_len: u64,
    pub reference_len: u64,
}

impl NGramStats {
    pub fn from_tokens<S: AsRef<str>>(candidate: &[S], reference: &[S]) -> Self {
        let cand: Vec<&str> = candidate.iter().map(AsRef::as_ref).collect();
        let refr: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
        let mut stats = NGramStats {
            candidate_len: cand.len() as u64,
            reference_len: refr.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_ORDER {
            let ref_counts = counts(&refr, n);
            for (gram, c) in counts(&cand, n) {
                stats.matches[n - 1] += c.min(ref_counts.get(&gram).copied().unwrap_or(0));
                stats.totals[n - 1] += c;
            }
        }
        stats
    }

    /// Tokenizes both sides with the shared tokenizer first.
    pub fn from_text(candidate: &str, reference: &str) -> Self {
        Self::from_tokens(&metric_tokens(candidate), &metric_tokens(reference))
    }

    pub fn merge(mut self, other: &NGramStats) -> Self {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.candidate_len += other.candidate_len;
        self.reference_len += other.reference_len;
        self
    }

    pub fn score<F: Scalar>(&self) -> BleuScore<F> {
        let mut precisions = [F::zero(); MAX_ORDER];
        for ((p, &m), &t) in precisions.iter_mut().zip(&self.matches).zip(&self.totals) {
            if t > 0 {
                *p = F::from_u64(m).unwrap() / F::from_u64(t).unwrap();
            }
        }
        let c = F::from_u64(self.candidate_len).unwrap();
        let r = F::from_u64(self.reference_len).unwrap();
        let brevity_penalty = if self.candidate_len == 0 {
            F::zero()
        } else if self.candidate_len > self.reference_len {
            F::one()
        } else {
            (F::one() - r / c).exp()
        };
        let score = if precisions.iter().any(|p| p.is_zero()) {
            F::zero()
        } else {
            let log_mean = precisions.iter().map(|p| p.ln()).sum::<F>() / F::of_usize(MAX_ORDER);
            F::of(100.0) * brevity_penalty * log_mean.exp()
        };
        BleuScore {
            score,
            precisions,
            brevity_penalty,
            stats: *self,
        }
    }
}

fn counts<'w>(words: &'w [&'w str], n: usize) -> HashMap<&'w [&'w str], u64> {
    let mut out = HashMap::new();
    for gram in words.windows(n) {
        *out.entry(gram).or_default() += 1;
    }
    out
}

/// BLEU-4 on a 0-100 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BleuScore<F> {
    pub score: F,
    pub precisions: [F; MAX_ORDER],
    pub brevity_penalty: F,
    pub stats: NGramStats,
}

/// Unsmoothed sentence BLEU-4; zero when any n-gram precision is zero.
pub fn sentence_bleu<F: Scalar>(candidate: &str, reference: &str) -> F {
    NGramStats::from_text(candidate, reference).score().score
}

/// Corpus BLEU over `(candidate, reference)` pairs, with n-gram statistics
/// summed before precisions and brevity penalty are taken.
pub fn corpus_bleu<F: Scalar, S: AsRef<str> + Sync>(
    pairs: &[(S, S)],
) -> Result<BleuScore<F>, MetricError> {
    Ok(corpus_stats(pairs)?.score())
}

pub fn corpus_stats<S: AsRef<str> + Sync>(pairs: &[(S, S)]) -> Result<NGramStats, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    Ok(pairs
        .par_iter()
        .map(|(c, r)| NGramStats::from_text(c.as_ref(), r.as_ref()))
        .reduce(NGramStats::default, |a, b| a.merge(&b)))
}
