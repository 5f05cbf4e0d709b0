use std::collections::{BTreeMap, HashMap};

use super::{Candidate, TranslateError, Translator, TranslatorKind};
use crate::corpus::{augment_auxiliary, canonical_key, PrescriptionPair, Split, SplitPlan, AUX_SEPARATOR};

/// Canonical source key to its most frequent reference and that count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RetrievalTable {
    entries: BTreeMap<String, (String, usize)>,
    augmented: bool,
}

/// Builds the table from training pairs.
///
/// With a split plan, any pair whose source group is assigned to
/// validation or test is rejected. Keys use the augmented input when
/// `augment` is set. Ties between equally frequent references go to the
/// lexicographically smallest.
pub fn build_retrieval_table<'p>(
    pairs: impl IntoIterator<Item = &'p PrescriptionPair>,
    plan: Option<&SplitPlan>,
    augment: bool,
) -> Result<RetrievalTable, TranslateError> {
    let mut counts: HashMap<String, HashMap<&'p str, usize>> = HashMap::new();
    for pair in pairs {
        if let Some(split) = plan.and_then(|p| p.split_of_text(&pair.source)) {
            if split != Split::Train {
                return Err(TranslateError::Leakage {
                    id: pair.id.clone(),
                    split,
                });
            }
        }
        let reference = pair
            .reference
            .as_deref()
            .filter(|r| !r.trim().is_empty())
            .ok_or_else(|| TranslateError::MissingReference(pair.id.clone()))?;
        let input = if augment {
            augment_auxiliary(pair, AUX_SEPARATOR)
        } else {
            pair.source.clone()
        };
        *counts
            .entry(canonical_key(&input))
            .or_default()
            .entry(reference)
            .or_default() += 1;
    }
    let entries = counts
        .into_iter()
        .map(|(key, refs)| {
            let (best, n) = refs
                .into_iter()
                .max_by(|(ra, na), (rb, nb)| na.cmp(nb).then_with(|| rb.cmp(ra)))
                .expect("every key has a reference");
            (key, (best.to_string(), n))
        })
        .collect();
    Ok(RetrievalTable {
        entries,
        augmented: augment,
    })
}

impl RetrievalTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    pub fn get(&self, input: &str) -> Option<(&str, usize)> {
        self.entries
            .get(&canonical_key(input))
            .map(|(r, n)| (r.as_str(), *n))
    }

    /// Entries whose key is within edit distance 1 of the input's key,
    /// in key order.
    pub fn get_fuzzy(&self, input: &str) -> Vec<(&str, usize)> {
        let key = canonical_key(input);
        if let Some((r, n)) = self.entries.get(&key) {
            return vec![(r.as_str(), *n)];
        }
        let len = key.chars().count();
        self.entries
            .iter()
            .filter(|(k, _)| k.chars().count().abs_diff(len) <= 1 && strsim::levenshtein(k, &key) <= 1)
            .map(|(_, (r, n))| (r.as_str(), *n))
            .collect()
    }
}

pub struct RetrievalTranslator {
    table: RetrievalTable,
    fuzzy: bool,
}

impl RetrievalTranslator {
    pub fn new(table: RetrievalTable, fuzzy: bool) -> Self {
        RetrievalTranslator { table, fuzzy }
    }

    pub fn table(&self) -> &RetrievalTable {
        &self.table
    }
}

impl Translator for RetrievalTranslator {
    fn kind(&self) -> TranslatorKind {
        TranslatorKind::Retrieval
    }

    fn translate(&self, input: &str) -> Result<Vec<Candidate>, TranslateError> {
        let hits = if self.fuzzy {
            self.table.get_fuzzy(input)
        } else {
            self.table.get(input).into_iter().collect()
        };
        Ok(hits
            .into_iter()
            .map(|(r, n)| Candidate::new(r, n as f64))
            .collect())
    }
}
