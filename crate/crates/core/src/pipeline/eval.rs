use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{build_translator, run_pipeline, PipelineConfig, PipelineError, Resources};
use crate::consistency::{CheckMode, CheckReport, Checker, FlagCounts, Provenance};
use crate::corpus::{read_review_csv, sample_for_review, tally_review, write_review_csv, PrescriptionPair, ReviewTally};
use crate::metrics::{corpus_bleu, length_stratified_report, meteor, sentence_bleu, BleuScore, LengthStrata};
use crate::normalizer::normalization_ratio;
use crate::num::Scalar;
use crate::translation::{Translator, TranslatorKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRecord<F> {
    pub id: String,
    pub source: String,
    pub translator_input: String,
    pub reference: String,
    pub output: String,
    pub provenance: Provenance,
    pub candidates: usize,
    pub translate_error: Option<String>,
    pub report: CheckReport,
    pub bleu: F,
    pub meteor: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedReferenceScores<F> {
    pub bleu: BleuScore<F>,
    pub meteor: F,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport<F> {
    pub config: PipelineConfig,
    pub pairs: usize,
    pub bleu: BleuScore<F>,
    /// Mean sentence METEOR.
    pub meteor: F,
    /// Fraction of outputs the normalizer would still change.
    pub normalization_ratio: F,
    /// Fraction of outputs that fell back to the source.
    pub backoff_rate: F,
    /// Both checkers applied to each pair's top candidate; pairs without
    /// candidates are not counted.
    pub flags: FlagCounts,
    pub length_strata: LengthStrata<F>,
    pub normalized_reference: Option<NormalizedReferenceScores<F>>,
    pub records: Vec<PairRecord<F>>,
}

fn mean<F: Scalar>(values: impl Iterator<Item = F>, n: usize) -> F {
    if n == 0 {
        F::zero()
    } else {
        values.fold(F::zero(), |a, b| a + b) / F::of_usize(n)
    }
}

pub fn evaluate<F: Scalar>(
    config: &PipelineConfig,
    resources: &Resources,
    translator: &dyn Translator,
    pairs: &[PrescriptionPair],
) -> Result<EvalReport<F>, PipelineError> {
    let references: Vec<&str> = pairs
        .iter()
        .map(|p| {
            p.reference
                .as_deref()
                .ok_or_else(|| PipelineError::MissingReference(p.id.clone()))
        })
        .collect::<Result<_, _>>()?;
    let outputs = run_pipeline(config, resources, translator, pairs)?;
    let texts: Vec<&str> = outputs.iter().map(|o| o.output.as_str()).collect();
    let scored: Vec<(&str, &str)> = texts.iter().copied().zip(references.iter().copied()).collect();
    let bleu = corpus_bleu::<F, _>(&scored)?;
    let synonyms = &*resources.synonyms;
    let sentence: Vec<(F, F)> = scored
        .par_iter()
        .map(|(c, r)| (sentence_bleu::<F>(c, r), meteor::<F>(c, r, synonyms).score))
        .collect();
    let normalizer = resources.normalizer();
    let checker = Checker::new(&resources.lexicon);

    let flags = pairs
        .par_iter()
        .zip(&outputs)
        .filter_map(|(p, o)| {
            let top = o
                .candidates
                .iter()
                .enumerate()
                .max_by(|(i, a), (j, b)| a.score.total_cmp(&b.score).then(j.cmp(i)))?
                .1;
            Some(FlagCounts::of_report(&checker.check(&p.source, &top.text)))
        })
        .reduce(FlagCounts::default, |a, b| a.add(&b));

    let sources: Vec<&str> = pairs.iter().map(|p| p.source.as_str()).collect();
    let length_strata = length_stratified_report(&sources, &texts, &references, config.length_threshold)?;

    let normalized_reference = if config.normalized_reference {
        let refs: Vec<String> = references.par_iter().map(|r| normalizer.normalize_text(r)).collect();
        let pairs: Vec<(&str, &str)> = texts.iter().copied().zip(refs.iter().map(String::as_str)).collect();
        let meteors: Vec<F> = pairs.par_iter().map(|(c, r)| meteor::<F>(c, r, synonyms).score).collect();
        Some(NormalizedReferenceScores {
            bleu: corpus_bleu(&pairs)?,
            meteor: mean(meteors.into_iter(), pairs.len()),
        })
    } else {
        None
    };

    let ratio = normalization_ratio(&texts, &normalizer);
    let backoffs = outputs
        .iter()
        .filter(|o| o.checked.provenance == Provenance::BackoffSource)
        .count();
    let records = outputs
        .into_iter()
        .zip(pairs)
        .zip(&sentence)
        .map(|((o, p), (b, m))| PairRecord {
            id: o.id,
            source: p.source.clone(),
            translator_input: o.translator_input,
            reference: p.reference.clone().unwrap_or_default(),
            output: o.output,
            provenance: o.checked.provenance,
            candidates: o.candidates.len(),
            translate_error: o.translate_error,
            report: o.checked.report,
            bleu: *b,
            meteor: *m,
        })
        .collect();
    Ok(EvalReport {
        config: config.clone(),
        pairs: pairs.len(),
        bleu,
        meteor: mean(sentence.iter().map(|s| s.1), pairs.len()),
        normalization_ratio: ratio,
        backoff_rate: F::of_usize(backoffs) / F::of_usize(pairs.len().max(1)),
        flags,
        length_strata,
        normalized_reference,
        records,
    })
}

impl<F: Scalar> EvalReport<F> {
    /// Plain-text summary, one metric per line.
    pub fn render_table(&self) -> String {
        let pct = |x: F| x.to_f64().unwrap_or(f64::NAN) * 100.0;
        let v = |x: F| x.to_f64().unwrap_or(f64::NAN);
        let mut out = String::new();
        let mut row = |k: &str, val: String| {
            let _ = writeln!(out, "{k:<28}{val}");
        };
        row("pairs", self.pairs.to_string());
        row("BLEU", format!("{:.2}", v(self.bleu.score)));
        row("METEOR", format!("{:.2}", pct(self.meteor)));
        row("normalization ratio", format!("{:.2}%", pct(self.normalization_ratio)));
        row("backoff rate", format!("{:.2}%", pct(self.backoff_rate)));
        let f = &self.flags;
        row("flagged (token)", format!("{} / {}", f.token, f.n));
        row(
            "flagged (component)",
            format!(
                "{} / {} (dosage {}, frequency {}, duration {})",
                f.component, f.n, f.dosage, f.frequency, f.duration
            ),
        );
        let t = self.length_strata.threshold;
        for (name, s) in [
            (format!("BLEU < {t} words"), &self.length_strata.short),
            (format!("BLEU >= {t} words"), &self.length_strata.long),
        ] {
            row(
                &name,
                s.as_ref()
                    .map_or("absent".into(), |s| format!("{:.2} (n={})", v(s.bleu.score), s.size)),
            );
        }
        if let Some(n) = &self.normalized_reference {
            row("BLEU (normalized ref)", format!("{:.2}", v(n.bleu.score)));
            row("METEOR (normalized ref)", format!("{:.2}", pct(n.meteor)));
        }
        out
    }
}

/// The six ablation rows, all built on `base`'s translator and checker.
pub fn ablation_configs(base: &PipelineConfig) -> Vec<(String, PipelineConfig)> {
    let t = base.translator;
    let checker = base.checker.or(Some(CheckMode::Component));
    let with = |translator, augment_aux, backoff, normalize| PipelineConfig {
        translator,
        augment_aux,
        backoff,
        normalize,
        checker,
        normalize_before_check: false,
        ..base.clone()
    };
    vec![
        ("(1) rule baseline".into(), with(TranslatorKind::RuleBaseline, false, false, false)),
        (format!("(2) {t} + aux"), with(t, true, false, false)),
        (format!("(3) {t}"), with(t, false, false, false)),
        (format!("(4) {t} + aux + backoff"), with(t, true, true, false)),
        (format!("(5) {t} + aux + backoff + normalize"), with(t, true, true, true)),
        (format!("(6) {t} + aux + normalize"), with(t, true, false, true)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRun<F> {
    pub label: String,
    pub report: EvalReport<F>,
}

/// Evaluates every ablation row on `eval`; retrieval rows train on
/// `train`.
pub fn run_ablation<F: Scalar>(
    base: &PipelineConfig,
    resources: &Resources,
    train: &[PrescriptionPair],
    eval: &[PrescriptionPair],
) -> Result<Vec<AblationRun<F>>, PipelineError> {
    ablation_configs(base)
        .into_iter()
        .map(|(label, config)| {
            let translator = build_translator(&config, resources, train)?;
            let report = evaluate(&config, resources, translator.as_ref(), eval)?;
            Ok(AblationRun { label, report })
        })
        .collect()
}

/// Writes a review sample of `n` pairs; returns the number of rows.
pub fn export_review<S: AsRef<str>>(
    pairs: &[PrescriptionPair],
    outputs: &[S],
    n: usize,
    seed: u64,
    path: impl AsRef<Path>,
) -> Result<usize, PipelineError> {
    let items = sample_for_review(pairs, outputs, n, seed)?;
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    write_review_csv(&items, std::io::BufWriter::new(file))?;
    Ok(items.len())
}

pub fn import_review<F: Scalar>(path: impl AsRef<Path>) -> Result<ReviewTally<F>, PipelineError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| PipelineError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok(tally_review(&read_review_csv(file)?)?)
}
