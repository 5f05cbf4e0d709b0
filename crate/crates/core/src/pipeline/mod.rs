//! The full flow: translate, check with backoff, normalize; plus corpus
//! evaluation, the ablation grid and review export.

mod config;
mod eval;

pub use config::{PipelineConfig, Resources};
pub use eval::{
    ablation_configs, evaluate, export_review, import_review, run_ablation, AblationRun, EvalReport,
    NormalizedReferenceScores, PairRecord,
};

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::consistency::{CheckReport, Checker, FinalDirection, Provenance};
use crate::corpus::{augment_auxiliary, strip_auxiliary, CorpusError, PrescriptionPair, AUX_SEPARATOR};
use crate::metrics::MetricError;
use crate::translation::{
    build_retrieval_table, Candidate, ExternalTranslator, RetrievalTranslator, RuleBaseline, TranslateError,
    Translator, TranslatorKind,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot load {path}: {reason}")]
    Resource { path: PathBuf, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("pair {0} has no reference")]
    MissingReference(String),
}

impl PipelineError {
    fn resource(path: &Path, err: impl std::fmt::Display) -> Self {
        PipelineError::Resource {
            path: path.to_path_buf(),
            reason: err.to_string(),
        }
    }
}

/// What happened to one pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineOutput {
    pub id: String,
    pub translator_input: String,
    pub candidates: Vec<Candidate>,
    /// Set when the translator failed; the pair then has no candidates.
    pub translate_error: Option<String>,
    /// The selected text before post-check normalization.
    pub checked: FinalDirection,
    pub output: String,
}

/// Builds the configured translator. Retrieval trains on `train`.
pub fn build_translator<'r>(
    config: &PipelineConfig,
    resources: &'r Resources,
    train: &[PrescriptionPair],
) -> Result<Box<dyn Translator + 'r>, PipelineError> {
    Ok(match config.translator {
        TranslatorKind::RuleBaseline => Box::new(RuleBaseline::new(resources.normalizer())),
        TranslatorKind::Retrieval => {
            let table = build_retrieval_table(train, None, config.augment_aux)?;
            Box::new(RetrievalTranslator::new(table, config.fuzzy_retrieval))
        }
        TranslatorKind::External => {
            let ext = config
                .external
                .as_ref()
                .ok_or_else(|| PipelineError::Config("external translator needs a command".into()))?;
            Box::new(ExternalTranslator::spawn(ext)?)
        }
    })
}

pub fn translator_input(config: &PipelineConfig, pair: &PrescriptionPair) -> String {
    if config.augment_aux {
        augment_auxiliary(pair, AUX_SEPARATOR)
    } else {
        pair.source.clone()
    }
}

/// Runs every pair through the pipeline; output order matches input order.
pub fn run_pipeline(
    config: &PipelineConfig,
    resources: &Resources,
    translator: &dyn Translator,
    pairs: &[PrescriptionPair],
) -> Result<Vec<PipelineOutput>, PipelineError> {
    config.validate()?;
    let inputs: Vec<String> = pairs.iter().map(|p| translator_input(config, p)).collect();
    let translated = translator.translate_all(&inputs);
    let normalizer = resources.normalizer();
    let checker = Checker::new(&resources.lexicon);
    let pre_normalize = config.normalize && config.normalize_before_check;

    Ok(pairs
        .par_iter()
        .zip(inputs)
        .zip(translated)
        .map(|((pair, input), result)| {
            let (mut candidates, translate_error) = match result {
                Ok(c) => (c, None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
            for c in &mut candidates {
                c.text = strip_auxiliary(&c.text, AUX_SEPARATOR).to_string();
                if pre_normalize {
                    c.text = normalizer.normalize_text(&c.text);
                }
            }
            candidates.retain(|c| !c.text.trim().is_empty());
            let checked = match config.checker.filter(|_| config.backoff) {
                Some(mode) => checker.resolve_backoff(&pair.source, &candidates, mode),
                None => select_top(&checker, &pair.source, &candidates),
            };
            let output = if config.normalize {
                normalizer.normalize_text(&checked.text)
            } else {
                checked.text.clone()
            };
            PipelineOutput {
                id: pair.id.clone(),
                translator_input: input,
                candidates,
                translate_error,
                checked,
                output,
            }
        })
        .collect())
}

/// Highest-scoring candidate without any check; the source when there is
/// none.
fn select_top(checker: &Checker, source: &str, candidates: &[Candidate]) -> FinalDirection {
    let top = candidates
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.score.total_cmp(&b.score).then(j.cmp(i)))
        .map(|(_, c)| c);
    match top {
        Some(c) => FinalDirection {
            text: c.text.clone(),
            provenance: Provenance::Candidate,
            report: checker.check(source, &c.text),
        },
        None => FinalDirection {
            text: source.to_string(),
            provenance: Provenance::BackoffSource,
            report: CheckReport::consistent(),
        },
    }
}
