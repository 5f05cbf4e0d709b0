use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use twox_hash::XxHash64;

use super::{CorpusError, PrescriptionPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown split {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, CorpusError> {
        let all = [train, validation, test];
        if all.iter().any(|r| !r.is_finite() || *r < 0.0) || (all.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(CorpusError::InvalidRatios(all));
        }
        Ok(SplitRatios { train, validation, test })
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.6,
            validation: 0.15,
            test: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub group_key: String,
    pub split: Split,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitPlan {
    groups: BTreeMap<String, Split>,
    pairs: BTreeMap<String, Split>,
}

impl SplitPlan {
    pub fn split_of_key(&self, key: &str) -> Option<Split> {
        self.groups.get(key).copied()
    }

    pub fn split_of_text(&self, source: &str) -> Option<Split> {
        self.split_of_key(&canonical_key(source))
    }

    pub fn split_of_pair(&self, id: &str) -> Option<Split> {
        self.pairs.get(id).copied()
    }

    pub fn pair_splits(&self) -> &BTreeMap<String, Split> {
        &self.pairs
    }

    pub fn assignments(&self) -> impl Iterator<Item = SplitAssignment> + '_ {
        self.groups.iter().map(|(k, s)| SplitAssignment {
            group_key: k.clone(),
            split: *s,
        })
    }

    pub fn group_counts(&self) -> BTreeMap<Split, usize> {
        let mut out: BTreeMap<Split, usize> = Split::ALL.into_iter().map(|s| (s, 0)).collect();
        for s in self.groups.values() {
            *out.entry(*s).or_default() += 1;
        }
        out
    }

    /// Pairs belonging to `split`, in input order.
    pub fn select<'p>(&self, pairs: &'p [PrescriptionPair], split: Split) -> Vec<&'p PrescriptionPair> {
        pairs
            .iter()
            .filter(|p| self.split_of_text(&p.source) == Some(split))
            .collect()
    }

    /// `group_key<TAB>split` lines sorted by key.
    pub fn to_tsv(&self) -> String {
        self.groups
            .iter()
            .map(|(k, s)| format!("{k}\t{s}\n"))
            .collect()
    }
}

/// Reads a split TSV back into key assignments; pair lookups are empty.
pub fn parse_split_tsv(text: &str) -> Result<SplitPlan, CorpusError> {
    let mut plan = SplitPlan::default();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
        let (key, split) = line.rsplit_once('\t').ok_or_else(|| CorpusError::BadRow {
            row: i + 1,
            reason: "expected group_key<TAB>split".into(),
        })?;
        let split = split.parse().map_err(|reason| CorpusError::BadRow { row: i + 1, reason })?;
        plan.groups.insert(key.to_string(), split);
    }
    Ok(plan)
}

/// Lowercased with whitespace runs collapsed; punctuation is kept.
pub fn canonical_key(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Assigns every canonical source group to one split.
///
/// Groups are ordered by a seeded hash of their key and then filled in
/// order: `round(train * G)` to train, `round(validation * G)` to
/// validation, the rest to test.
pub fn dedup_group_split(
    pairs: &[PrescriptionPair],
    ratios: SplitRatios,
    seed: u64,
) -> Result<SplitPlan, CorpusError> {
    if pairs.is_empty() {
        return Err(CorpusError::Empty);
    }
    let keys: BTreeSet<String> = pairs.iter().map(|p| canonical_key(&p.source)).collect();
    let mut order: Vec<(u64, &String)> = keys
        .iter()
        .map(|k| (XxHash64::oneshot(seed, k.as_bytes()), k))
        .collect();
    order.sort();
    let g = order.len();
    let n_train = ((ratios.train * g as f64).round() as usize).min(g);
    let n_val = ((ratios.validation * g as f64).round() as usize).min(g - n_train);
    let groups: BTreeMap<String, Split> = order
        .into_iter()
        .enumerate()
        .map(|(i, (_, k))| {
            let split = if i < n_train {
                Split::Train
            } else if i < n_train + n_val {
                Split::Validation
            } else {
                Split::Test
            };
            (k.clone(), split)
        })
        .collect();
    let pairs = pairs
        .iter()
        .map(|p| (p.id.clone(), groups[&canonical_key(&p.source)]))
        .collect();
    Ok(SplitPlan { groups, pairs })
}
