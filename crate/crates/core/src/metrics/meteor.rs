//! METEOR with exact, stem and synonym matching stages.
//!
//! Each stage aligns only tokens left unaligned by earlier stages. Within a
//! stage the alignment has the maximum number of matches and, among those,
//! the fewest chunks for the combined alignment. The score is
//! `Fmean * (1 - 0.5 * (chunks / matches)^3)` with
//! `Fmean = 10PR / (R + 9P)`.

use serde::Serialize;

use super::metric_tokens;
use super::stem::stem;
use super::synonyms::SynonymTable;
use crate::num::Scalar;

// DFS node budget per stage; the best alignment found so far is kept when
// it runs out
const SEARCH_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchStage {
    Exact,
    Stem,
    Synonym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AlignedPair {
    pub candidate: usize,
    pub reference: usize,
    pub stage: MatchStage,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MeteorAlignment {
    /// Sorted by candidate position.
    pub pairs: Vec<AlignedPair>,
    pub matches: usize,
    pub chunks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeteorScore<F> {
    pub score: F,
    pub precision: F,
    pub recall: F,
    pub fmean: F,
    pub penalty: F,
    pub alignment: MeteorAlignment,
}

pub fn meteor<F: Scalar>(candidate: &str, reference: &str, synonyms: &SynonymTable) -> MeteorScore<F> {
    meteor_tokens(&metric_tokens(candidate), &metric_tokens(reference), synonyms)
}

pub fn meteor_tokens<F: Scalar, S: AsRef<str>>(
    candidate: &[S],
    reference: &[S],
    synonyms: &SynonymTable,
) -> MeteorScore<F> {
    let alignment = align(candidate, reference, synonyms);
    let zero = MeteorScore {
        score: F::zero(),
        precision: F::zero(),
        recall: F::zero(),
        fmean: F::zero(),
        penalty: F::zero(),
        alignment: alignment.clone(),
    };
    if alignment.matches == 0 {
        return zero;
    }
    let m = F::of_usize(alignment.matches);
    let precision = m / F::of_usize(candidate.len());
    let recall = m / F::of_usize(reference.len());
    let fmean = F::of(10.0) * precision * recall / (recall + F::of(9.0) * precision);
    let frag = F::of_usize(alignment.chunks) / m;
    let penalty = F::of(0.5) * frag * frag * frag;
    MeteorScore {
        score: fmean * (F::one() - penalty),
        precision,
        recall,
        fmean,
        penalty,
        alignment,
    }
}

/// Number of runs of consecutive candidate positions aligned to
/// consecutive reference positions.
pub fn count_chunks(cand_to_ref: &[Option<usize>]) -> usize {
    let mut chunks = 0;
    let mut prev: Option<usize> = None;
    for slot in cand_to_ref {
        match slot {
            Some(j) => {
                if !continues(prev, *j) {
                    chunks += 1;
                }
                prev = Some(*j);
            }
            None => prev = None,
        }
    }
    chunks
}

fn continues(prev: Option<usize>, j: usize) -> bool {
    prev.is_some_and(|p| p + 1 == j)
}

pub fn align<S: AsRef<str>>(candidate: &[S], reference: &[S], synonyms: &SynonymTable) -> MeteorAlignment {
    let cand: Vec<&str> = candidate.iter().map(AsRef::as_ref).collect();
    let refr: Vec<&str> = reference.iter().map(AsRef::as_ref).collect();
    let cand_stems: Vec<String> = cand.iter().map(|w| stem(w)).collect();
    let ref_stems: Vec<String> = refr.iter().map(|w| stem(w)).collect();

    let mut cand_to_ref: Vec<Option<usize>> = vec![None; cand.len()];
    let mut stage_of: Vec<Option<MatchStage>> = vec![None; cand.len()];
    let mut ref_used = vec![false; refr.len()];

    for stage in [MatchStage::Exact, MatchStage::Stem, MatchStage::Synonym] {
        let edges: Vec<Vec<usize>> = (0..cand.len())
            .map(|i| {
                if cand_to_ref[i].is_some() {
                    return Vec::new();
                }
                (0..refr.len())
                    .filter(|&j| !ref_used[j])
                    .filter(|&j| match stage {
                        MatchStage::Exact => cand[i] == refr[j],
                        MatchStage::Stem => cand_stems[i] == ref_stems[j],
                        MatchStage::Synonym => synonyms.are_synonyms(cand[i], refr[j]),
                    })
                    .collect()
            })
            .collect();
        if edges.iter().all(Vec::is_empty) {
            continue;
        }
        let added = best_stage_alignment(&cand_to_ref, &edges, refr.len());
        for (i, j) in added.into_iter().enumerate() {
            if let Some(j) = j {
                cand_to_ref[i] = Some(j);
                stage_of[i] = Some(stage);
                ref_used[j] = true;
            }
        }
    }

    let pairs: Vec<AlignedPair> = cand_to_ref
        .iter()
        .enumerate()
        .filter_map(|(i, j)| {
            j.map(|j| AlignedPair {
                candidate: i,
                reference: j,
                stage: stage_of[i].expect("aligned positions have a stage"),
            })
        })
        .collect();
    MeteorAlignment {
        matches: pairs.len(),
        chunks: count_chunks(&cand_to_ref),
        pairs,
    }
}

/// Maximum bipartite matching by augmenting paths; `result[i]` is the
/// reference position matched to candidate `i`.
fn max_matching(edges: &[Vec<usize>], ref_len: usize) -> Vec<Option<usize>> {
    fn augment(
        i: usize,
        edges: &[Vec<usize>],
        seen: &mut [bool],
        ref_owner: &mut [Option<usize>],
    ) -> bool {
        for &j in &edges[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if ref_owner[j].is_none_or(|k| augment(k, edges, seen, ref_owner)) {
                ref_owner[j] = Some(i);
                return true;
            }
        }
        false
    }
    let mut ref_owner = vec![None; ref_len];
    for i in 0..edges.len() {
        let mut seen = vec![false; ref_len];
        augment(i, edges, &mut seen, &mut ref_owner);
    }
    let mut result = vec![None; edges.len()];
    for (j, owner) in ref_owner.iter().enumerate() {
        if let Some(i) = owner {
            result[*i] = Some(j);
        }
    }
    result
}

struct StageSearch<'a> {
    fixed: &'a [Option<usize>],
    edges: &'a [Vec<usize>],
    target: usize,
    // number of positions at or after i that have at least one edge
    capacity: Vec<usize>,
    used: Vec<bool>,
    current: Vec<Option<usize>>,
    best: Option<(usize, Vec<Option<usize>>)>,
    nodes: usize,
}

impl StageSearch<'_> {
    fn run(&mut self, i: usize, prev: Option<usize>, chunks: usize, added: usize) {
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET {
            return;
        }
        if self.best.as_ref().is_some_and(|(b, _)| chunks >= *b) {
            return;
        }
        if added + self.capacity[i] < self.target {
            return;
        }
        if i == self.fixed.len() {
            if added == self.target {
                self.best = Some((chunks, self.current.clone()));
            }
            return;
        }
        if let Some(j) = self.fixed[i] {
            let c = chunks + usize::from(!continues(prev, j));
            self.run(i + 1, Some(j), c, added);
            return;
        }
        let mut options: Vec<usize> = self.edges[i]
            .iter()
            .copied()
            .filter(|&j| !self.used[j])
            .collect();
        if let Some(pos) = options.iter().position(|&j| continues(prev, j)) {
            let j = options.remove(pos);
            options.insert(0, j);
        }
        for j in options {
            self.used[j] = true;
            self.current[i] = Some(j);
            let c = chunks + usize::from(!continues(prev, j));
            self.run(i + 1, Some(j), c, added + 1);
            self.current[i] = None;
            self.used[j] = false;
        }
        self.run(i + 1, None, chunks, added);
    }
}

fn best_stage_alignment(
    fixed: &[Option<usize>],
    edges: &[Vec<usize>],
    ref_len: usize,
) -> Vec<Option<usize>> {
    let fallback = max_matching(edges, ref_len);
    let target = fallback.iter().filter(|j| j.is_some()).count();
    let mut capacity = vec![0; edges.len() + 1];
    for i in (0..edges.len()).rev() {
        capacity[i] = capacity[i + 1] + usize::from(!edges[i].is_empty());
    }
    let mut used = vec![false; ref_len];
    for j in fixed.iter().flatten() {
        used[*j] = true;
    }
    let mut search = StageSearch {
        fixed,
        edges,
        target,
        capacity,
        used,
        current: vec![None; edges.len()],
        best: None,
        nodes: 0,
    };
    search.run(0, None, 0, 0);
    search.best.map(|(_, a)| a).unwrap_or(fallback)
}
