use std::fs::File;
use std::io::{self, BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rxsig::consistency::{CheckMode, CheckReport, Checker, Mismatch, Provenance};
use rxsig::corpus::{
    dedup_group_split, load_corpus, parse_split_tsv, LoadedCorpus, PrescriptionPair, Split, SplitPlan, SplitRatios,
};
use rxsig::pipeline::{
    build_translator, evaluate, export_review, import_review, run_ablation, run_pipeline, AblationRun, EvalReport,
    PipelineConfig, Resources,
};
use rxsig::translation::{ExternalConfig, TranslatorKind};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rxsig", version, about = "Simplify and evaluate prescription directions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a corpus and report malformed lines.
    Ingest {
        corpus: PathBuf,
        /// Write the parsed pairs as JSON lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assign canonical source groups to train/validation/test.
    Split {
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Run the pipeline and write one JSON line per pair.
    Run {
        corpus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Score pipeline output against references.
    Evaluate {
        corpus: PathBuf,
        /// JSON report destination.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Evaluate the six ablation configurations.
        #[arg(long)]
        ablation: bool,
        /// Also score against normalized references.
        #[arg(long)]
        normalized_reference: bool,
        #[arg(long)]
        length_threshold: Option<usize>,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Check candidates against sources. Reads JSON lines with `source`
    /// and `candidate`, or a single pair from the flags.
    Check {
        input: Option<PathBuf>,
        #[arg(long, requires = "candidate", conflicts_with = "input")]
        source: Option<String>,
        #[arg(long)]
        candidate: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Normalize directions given as arguments, or one per stdin line.
    Normalize {
        text: Vec<String>,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Export a random sample of pipeline output for manual review.
    SampleReview {
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(short, long, default_value_t = 300)]
        n: usize,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
    /// Summarize a labeled review file.
    TallyReview {
        review: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Subset {
    All,
    Train,
    Validation,
    Test,
}

#[derive(Args)]
struct SplitArgs {
    /// Existing split file; otherwise the split is computed from the seed.
    #[arg(long)]
    split_file: Option<PathBuf>,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.6, 0.15, 0.25])]
    ratios: Vec<f64>,
    /// Pairs to process.
    #[arg(long, value_enum, default_value_t = Subset::All)]
    on: Subset,
    #[arg(long)]
    split_seed: Option<u64>,
}

#[derive(Args, Default)]
struct PipelineArgs {
    /// TOML configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// rule-baseline, retrieval or external.
    #[arg(long)]
    translator: Option<TranslatorKind>,
    /// Command for the external translator.
    #[arg(long)]
    translator_cmd: Option<String>,
    #[arg(long)]
    translator_timeout_ms: Option<u64>,
    /// token or component.
    #[arg(long)]
    checker: Option<CheckMode>,
    #[arg(long)]
    no_backoff: bool,
    #[arg(long)]
    no_normalize: bool,
    #[arg(long)]
    augment_aux: bool,
    #[arg(long)]
    fuzzy: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    rules: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    synonyms: Option<PathBuf>,
}

impl PipelineArgs {
    fn config(&self) -> Result<PipelineConfig> {
        let mut c = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(t) = self.translator {
            c.translator = t;
        }
        if let Some(cmd) = &self.translator_cmd {
            let mut parts = cmd.split_whitespace().map(str::to_string);
            let mut ext = ExternalConfig::new(parts.next().context("empty --translator-cmd")?);
            ext.args = parts.collect();
            c.external = Some(ext);
        }
        if let (Some(ms), Some(ext)) = (self.translator_timeout_ms, c.external.as_mut()) {
            ext.timeout_ms = ms;
        }
        if self.checker.is_some() {
            c.checker = self.checker;
        }
        c.backoff &= !self.no_backoff;
        c.normalize &= !self.no_normalize;
        c.augment_aux |= self.augment_aux;
        c.fuzzy_retrieval |= self.fuzzy;
        if let Some(s) = self.seed {
            c.seed = s;
        }
        for (slot, flag) in [
            (&mut c.rules, &self.rules),
            (&mut c.lexicon, &self.lexicon),
            (&mut c.synonyms, &self.synonyms),
        ] {
            if flag.is_some() {
                slot.clone_from(flag);
            }
        }
        c.validate()?;
        Ok(c)
    }
}

fn load(path: &Path) -> Result<Vec<PrescriptionPair>> {
    let LoadedCorpus { pairs, malformed } =
        load_corpus(path).with_context(|| format!("loading {}", path.display()))?;
    for m in &malformed {
        eprintln!("{}:{}: skipped: {}", path.display(), m.line, m.reason);
    }
    Ok(pairs)
}

fn plan(args: &SplitArgs, pairs: &[PrescriptionPair], seed: u64) -> Result<SplitPlan> {
    match &args.split_file {
        Some(p) => Ok(parse_split_tsv(&std::fs::read_to_string(p).with_context(|| p.display().to_string())?)?),
        None => {
            let ratios = SplitRatios::new(args.ratios[0], args.ratios[1], args.ratios[2])?;
            Ok(dedup_group_split(pairs, ratios, args.split_seed.unwrap_or(seed))?)
        }
    }
}

/// Training pairs and the pairs selected by `--on`.
fn subsets(args: &SplitArgs, pairs: &[PrescriptionPair], seed: u64) -> Result<(Vec<PrescriptionPair>, Vec<PrescriptionPair>)> {
    let plan = plan(args, pairs, seed)?;
    let pick = |s| plan.select(pairs, s).into_iter().cloned().collect::<Vec<_>>();
    let train = pick(Split::Train);
    let target = match args.on {
        Subset::All => pairs.to_vec(),
        Subset::Train => train.clone(),
        Subset::Validation => pick(Split::Validation),
        Subset::Test => pick(Split::Test),
    };
    if target.is_empty() {
        bail!("no pairs selected");
    }
    Ok((train, target))
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| p.display().to_string())?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut w = writer(Some(path))?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn check_line(id: &str, report: &CheckReport, provenance: Provenance) -> serde_json::Value {
    let mismatches: &[Mismatch] = &report.mismatches;
    json!({
        "id": id,
        "token_consistent": report.token_consistent,
        "component_consistent": report.component_consistent,
        "mismatches": mismatches,
        "provenance": provenance,
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Ingest { corpus, out } => {
            let loaded = load_corpus(&corpus).with_context(|| format!("loading {}", corpus.display()))?;
            for m in &loaded.malformed {
                eprintln!("{}:{}: {}", corpus.display(), m.line, m.reason);
            }
            let with_drug = loaded.pairs.iter().filter(|p| p.drug.is_some()).count();
            println!("pairs      {}", loaded.pairs.len());
            println!("with drug  {with_drug}");
            println!("malformed  {}", loaded.malformed.len());
            if let Some(out) = out {
                let mut w = writer(Some(&out))?;
                for p in &loaded.pairs {
                    serde_json::to_writer(&mut w, p)?;
                    writeln!(w)?;
                }
            }
        }
        Command::Split { corpus, out, split } => {
            let pairs = load(&corpus)?;
            let plan = plan(&split, &pairs, 0)?;
            std::fs::write(&out, plan.to_tsv()).with_context(|| out.display().to_string())?;
            for (s, n) in plan.group_counts() {
                println!("{:<12}{n}", s.as_str());
            }
        }
        Command::Run { corpus, out, split, pipeline } => {
            let config = pipeline.config()?;
            let resources = Resources::load(&config)?;
            let pairs = load(&corpus)?;
            let (train, target) = subsets(&split, &pairs, config.seed)?;
            let translator = build_translator(&config, &resources, &train)?;
            let outputs = run_pipeline(&config, &resources, translator.as_ref(), &target)?;
            let mut w = writer(out.as_deref())?;
            for o in &outputs {
                let mut line = check_line(&o.id, &o.checked.report, o.checked.provenance);
                line["output"] = json!(o.output);
                writeln!(w, "{line}")?;
            }
            w.flush()?;
            let backoffs = outputs
                .iter()
                .filter(|o| o.checked.provenance == Provenance::BackoffSource)
                .count();
            eprintln!("{} pairs, {backoffs} backed off", outputs.len());
        }
        Command::Evaluate {
            corpus,
            report,
            ablation,
            normalized_reference,
            length_threshold,
            split,
            pipeline,
        } => {
            let mut config = pipeline.config()?;
            config.normalized_reference |= normalized_reference;
            if let Some(t) = length_threshold {
                config.length_threshold = t;
                config.validate()?;
            }
            let resources = Resources::load(&config)?;
            let pairs = load(&corpus)?;
            let (train, target) = subsets(&split, &pairs, config.seed)?;
            if ablation {
                let runs: Vec<AblationRun<f64>> = run_ablation(&config, &resources, &train, &target)?;
                println!("{:<44}{:>8}{:>8}{:>10}{:>10}", "configuration", "BLEU", "METEOR", "backoff", "norm");
                for r in &runs {
                    println!(
                        "{:<44}{:>8.2}{:>8.2}{:>9.1}%{:>9.1}%",
                        r.label,
                        r.report.bleu.score,
                        r.report.meteor * 100.0,
                        r.report.backoff_rate * 100.0,
                        r.report.normalization_ratio * 100.0
                    );
                }
                if let Some(p) = report {
                    write_json(&p, &runs)?;
                }
            } else {
                let translator = build_translator(&config, &resources, &train)?;
                let r: EvalReport<f64> = evaluate(&config, &resources, translator.as_ref(), &target)?;
                print!("{}", r.render_table());
                if let Some(p) = report {
                    write_json(&p, &r)?;
                }
            }
        }
        Command::Check {
            input,
            source,
            candidate,
            out,
            pipeline,
        } => {
            let config = pipeline.config()?;
            let resources = Resources::load(&config)?;
            let checker = Checker::new(&resources.lexicon);
            let mode = config.checker.unwrap_or(CheckMode::Component);
            let items: Vec<(String, String, String)> = match (input, source, candidate) {
                (Some(path), _, _) => {
                    let file = File::open(&path).with_context(|| path.display().to_string())?;
                    let mut items = Vec::new();
                    for (i, line) in io::BufReader::new(file).lines().enumerate() {
                        let line = line?;
                        if line.trim().is_empty() {
                            continue;
                        }
                        let v: serde_json::Value =
                            serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
                        let field = |k: &str| {
                            v[k].as_str()
                                .map(str::to_string)
                                .with_context(|| format!("{}:{}: missing {k}", path.display(), i + 1))
                        };
                        let id = v["id"].as_str().map_or_else(|| format!("L{}", i + 1), str::to_string);
                        items.push((id, field("source")?, field("candidate")?));
                    }
                    items
                }
                (None, Some(s), Some(c)) => vec![("1".into(), s, c)],
                _ => bail!("give an input file or --source and --candidate"),
            };
            let mut w = writer(out.as_deref())?;
            let (mut token, mut component) = (0, 0);
            for (id, s, c) in &items {
                let r = checker.check(s, c);
                token += usize::from(!r.token_consistent);
                component += usize::from(!r.component_consistent);
                let provenance = if r.passes(mode) {
                    Provenance::Candidate
                } else {
                    Provenance::BackoffSource
                };
                writeln!(w, "{}", check_line(id, &r, provenance))?;
            }
            w.flush()?;
            eprintln!("{} pairs; flagged: token {token}, component {component}", items.len());
        }
        Command::Normalize { text, pipeline } => {
            let config = pipeline.config()?;
            let resources = Resources::load(&config)?;
            let normalizer = resources.normalizer();
            let mut out = io::stdout().lock();
            if text.is_empty() {
                for line in io::stdin().lock().lines() {
                    writeln!(out, "{}", normalizer.normalize_text(&line?))?;
                }
            } else {
                writeln!(out, "{}", normalizer.normalize_text(&text.join(" ")))?;
            }
        }
        Command::SampleReview {
            corpus,
            out,
            n,
            split,
            pipeline,
        } => {
            let config = pipeline.config()?;
            let resources = Resources::load(&config)?;
            let pairs = load(&corpus)?;
            let (train, target) = subsets(&split, &pairs, config.seed)?;
            let translator = build_translator(&config, &resources, &train)?;
            let outputs: Vec<String> = run_pipeline(&config, &resources, translator.as_ref(), &target)?
                .into_iter()
                .map(|o| o.output)
                .collect();
            let rows = export_review(&target, &outputs, n, config.seed, &out)?;
            println!("wrote {rows} rows to {}", out.display());
        }
        Command::TallyReview { review, report } => {
            let t = import_review::<f64>(&review)?;
            for (label, c) in [("Correct", t.correct), ("Missing", t.missing), ("Wrong", t.wrong)] {
                println!("{label:<10}{:>6.1}%  (n={})", c.percent, c.count);
            }
            println!("{:<10}{:>6}", "total", t.total);
            if let Some(p) = report {
                write_json(&p, &t)?;
            }
        }
    }
    Ok(())
}
