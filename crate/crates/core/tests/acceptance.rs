//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

mod support;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rxsig::consistency::{CheckMode, Checker, Provenance};
use rxsig::corpus::{
    augment_auxiliary, canonical_key, dedup_group_split, PrescriptionPair, Split, SplitRatios, AUX_SEPARATOR,
};
use rxsig::metrics::{corpus_bleu, meteor, sentence_bleu, SynonymTable};
use rxsig::normalizer::{normalization_ratio, Normalizer};
use rxsig::pipeline::{build_translator, run_ablation, run_pipeline, AblationRun, PipelineConfig, Resources};
use rxsig::resources::{mini_corpus, swap_suite};
use rxsig::sig_text::parse_quantity_str;
use rxsig::translation::{Candidate, RuleBaseline, TranslateError, Translator, TranslatorKind};
use support::fuzz::alphabet;
use support::naive_bleu::{oracle_corpus_bleu, synthetic_pairs};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn loose(text: &str) -> String {
    text.trim().trim_end_matches('.').trim_end().to_lowercase()
}

fn c1_baseline() -> Outcome {
    let rows = [
        ("1/2 tab bid orally 90.", "Take 0.5 tablet by mouth twice a day 90"),
        ("tablets by mouth daily; 3.5 tab 7 mg.", "Take tablets by mouth daily ; 3.5 tablet 7 mg."),
        ("1 puff aero pow br act bid.", "Inhale 1 puff aero pow br act twice a day."),
        (
            "spray 1 spray(s) 4 times a day by intranasal route as needed for 90 days .",
            "Use spray 1 spray 4 times a day in the nose route as needed for 90 days .",
        ),
    ];
    let t = RuleBaseline::bundled();
    let out = |s: &str| t.translate(s).map(|c| c[0].text.clone()).unwrap_or_default();
    for (src, want) in rows {
        let got = out(src);
        ensure(loose(&got) == loose(want), || format!("{src:?} -> {got:?}, expected {want:?}"))?;
    }
    let row3 = out("one tablet by mouth oce daily .");
    ensure(row3.split_whitespace().any(|w| w == "oce"), || format!("row 3 lost the misspelling: {row3:?}"))?;
    ensure(loose(&row3) == "take 1 tablet by mouth oce daily", || format!("row 3: {row3:?}"))?;
    Ok("rows 1, 2, 4, 5 exact; row 3 keeps \"oce\"".into())
}

fn c2_worked_pipeline() -> Outcome {
    let pairs = [
        PrescriptionPair::new("1", "2 puffs orally q 4 hrs x90 dys wheeze", "-"),
        PrescriptionPair::new("2", "1 g vaginal mon/tu/th/fr", "-"),
    ];
    let want = [
        "inhale 2 puffs by mouth every 4 hours for 90 days for wheeze",
        "insert 1 gram vaginally monday, tuesday, thursday and friday",
    ];
    let config = PipelineConfig::default();
    let res = Resources::bundled();
    let t = build_translator(&config, &res, &[]).map_err(|e| e.to_string())?;
    let out = run_pipeline(&config, &res, t.as_ref(), &pairs).map_err(|e| e.to_string())?;
    for (o, w) in out.iter().zip(want) {
        ensure(loose(&o.output) == w, || format!("{} -> {:?}", o.id, o.output))?;
        ensure(o.checked.provenance == Provenance::Candidate, || format!("{} backed off", o.id))?;
    }
    Ok("rows 1-2 match through translate, check, backoff, normalize".into())
}

fn c3_bleu() -> Outcome {
    let row1: f64 = sentence_bleu(
        "apply 1 drop into each eye at bedtime .",
        "instill 1 drop into both eyes at bedtime .",
    );
    ensure(row1 == 0.0, || format!("first example BLEU {row1}"))?;
    let same: f64 = sentence_bleu("take 1 tablet by mouth daily", "take 1 tablet by mouth daily");
    ensure((same - 100.0).abs() < 1e-9, || format!("identical BLEU {same}"))?;
    let amp: f64 = sentence_bleu(
        "take 1 tablet by mouth every morning & every evening .",
        "take 1 tablet by mouth every morning and every evening .",
    );
    ensure((amp - 70.0).abs() <= 2.0, || format!("& pair BLEU {amp}"))?;
    let mut worst: f64 = 0.0;
    for seed in [7, 11, 2024] {
        let pairs = synthetic_pairs(seed, 50);
        let got = corpus_bleu::<f64, _>(&pairs).map_err(|e| e.to_string())?.score;
        worst = worst.max((got - oracle_corpus_bleu(&pairs)).abs());
    }
    ensure(worst < 1e-4, || format!("oracle gap {worst}"))?;
    Ok(format!("row1 = 0, identical = 100, & pair = {amp:.2}, oracle gap {worst:.1e}"))
}

fn c4_meteor() -> Outcome {
    let syn = SynonymTable::bundled();
    let ten = "a b c d e f g h i j";
    let m: f64 = meteor(ten, ten, syn).score;
    ensure((m - (1.0 - 0.5 * 0.1f64.powi(3))).abs() < 1e-12, || format!("identical METEOR {m}"))?;
    let cand = "apply 1 drop into each eye at bedtime .";
    let refr = "instill 1 drop into both eyes at bedtime .";
    let row1: f64 = meteor(cand, refr, syn).score;
    ensure((row1 - 0.77).abs() <= 0.10, || format!("first example METEOR {row1}"))?;
    let bleu: f64 = sentence_bleu(cand, refr);
    ensure(row1 > bleu / 100.0, || format!("METEOR {row1} <= BLEU/100 {}", bleu / 100.0))?;
    Ok(format!("identical = {m}, row1 = {row1:.4} > BLEU/100 = {}", bleu / 100.0))
}

fn c5_checkers() -> Outcome {
    let checker = Checker::bundled();
    let suite = swap_suite();
    let (mut comp, mut tok) = (0, 0);
    for case in &suite {
        let r = checker.check(&case.source, &case.candidate);
        comp += usize::from(!r.component_consistent);
        tok += usize::from(!r.token_consistent);
    }
    ensure(suite.len() == 10 && comp == 10 && tok == 0, || {
        format!("swap suite of {}: component {comp}, token {tok}", suite.len())
    })?;
    let reference = "take 1 tablet by mouth every morning and every evening.";
    let ten = checker.check(reference, "take 10 tablets by mouth every morning and every evening.");
    ensure(!ten.token_consistent && !ten.component_consistent, || format!("10 tablets: {ten:?}"))?;
    let amp = checker.check(reference, "take 1 tablet by mouth every morning & every evening.");
    ensure(amp.token_consistent && amp.component_consistent, || format!("& candidate: {amp:?}"))?;
    Ok("swaps: component 10/10, token 0/10; \"10 tablets\" flagged by both; \"&\" by neither".into())
}

/// Serves fixed candidate lists keyed by input text.
struct FixedTranslator(HashMap<String, Vec<Candidate>>);

impl Translator for FixedTranslator {
    fn kind(&self) -> TranslatorKind {
        TranslatorKind::External
    }

    fn translate(&self, input: &str) -> Result<Vec<Candidate>, TranslateError> {
        Ok(self.0.get(input).cloned().unwrap_or_default())
    }
}

fn mutate(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut words: Vec<String> = base.split_whitespace().map(str::to_string).collect();
    let numeric: Vec<usize> = (0..words.len())
        .filter(|&i| parse_quantity_str(&words[i]).is_some())
        .collect();
    let pool = ["1", "2", "3", "4", "6", "10", "0.5", "90", "1/2", "two"];
    match rng.gen_range(0..6) {
        1 if !numeric.is_empty() => {
            let i = *numeric.choose(rng).unwrap();
            words[i] = pool.choose(rng).unwrap().to_string();
        }
        2 if numeric.len() >= 2 => {
            let a = *numeric.choose(rng).unwrap();
            let b = *numeric.choose(rng).unwrap();
            words.swap(a, b);
        }
        3 if !numeric.is_empty() => {
            words.remove(*numeric.choose(rng).unwrap());
        }
        4 => {
            let at = rng.gen_range(0..=words.len());
            words.insert(at, pool.choose(rng).unwrap().to_string());
        }
        5 if words.len() > 1 => {
            let i = rng.gen_range(0..words.len());
            words.remove(i);
        }
        _ => {}
    }
    words.join(" ")
}

fn c6_backoff_safety() -> Outcome {
    let corpus = mini_corpus();
    let res = Resources::bundled();
    let normalizer = res.normalizer();
    let checker = Checker::new(&res.lexicon);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut table: HashMap<String, Vec<Candidate>> = HashMap::new();
    for i in 0..1000 {
        let pair = &corpus[i % corpus.len()];
        let base = if rng.gen_bool(0.5) {
            pair.reference.clone().unwrap()
        } else {
            normalizer.normalize_text(&pair.source)
        };
        let text = mutate(&mut rng, &base);
        if text.trim().is_empty() {
            continue;
        }
        let score = f64::from(rng.gen_range(0..5u8));
        table.entry(pair.source.clone()).or_default().push(Candidate::new(text, score));
    }
    let fuzzed: usize = table.values().map(Vec::len).sum();
    let mut singles = 0;
    let mut single_backoffs = 0;
    for (source, cands) in &table {
        for cand in cands {
            for mode in [CheckMode::Token, CheckMode::Component] {
                singles += 1;
                let f = checker.resolve_backoff(source, std::slice::from_ref(cand), mode);
                match f.provenance {
                    Provenance::Candidate => ensure(checker.passes(mode, source, &f.text), || {
                        format!("{mode} mode accepted {:?} for {source:?}", f.text)
                    })?,
                    Provenance::BackoffSource => {
                        single_backoffs += 1;
                        ensure(&f.text == source, || format!("backoff text differs for {source:?}"))?
                    }
                }
            }
        }
    }
    let translator = FixedTranslator(table);
    let baseline = RuleBaseline::new(res.normalizer());
    let mut checked = 0;
    let mut backoffs = 0;
    for mode in [CheckMode::Token, CheckMode::Component] {
        for normalize in [false, true] {
            let config = PipelineConfig {
                checker: Some(mode),
                backoff: true,
                normalize,
                ..Default::default()
            };
            for t in [&translator as &dyn Translator, &baseline] {
                let out = run_pipeline(&config, &res, t, &corpus).map_err(|e| e.to_string())?;
                for (o, p) in out.iter().zip(&corpus) {
                    checked += 1;
                    match o.checked.provenance {
                        Provenance::Candidate => ensure(checker.passes(mode, &p.source, &o.checked.text), || {
                            format!("{mode} mode passed an inconsistent candidate for {}: {:?}", p.id, o.checked.text)
                        })?,
                        Provenance::BackoffSource => {
                            backoffs += 1;
                            ensure(o.checked.text == p.source, || format!("{} backoff text differs", p.id))?
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{checked} pipeline outputs ({backoffs} backoffs) and {singles} single-candidate resolutions \
         ({single_backoffs} backoffs) over {} pairs and {fuzzed} fuzzed candidates, 0 violations",
        corpus.len()
    ))
}

fn c7_idempotence() -> Outcome {
    let n = Normalizer::bundled();
    let corpus = mini_corpus();
    let mut directions: Vec<String> = corpus
        .iter()
        .flat_map(|p| [p.source.clone(), p.reference.clone().unwrap_or_default()])
        .collect();
    let alpha = alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let len = rng.gen_range(0..14);
        let words: Vec<&str> = (0..len).map(|_| alpha.choose(&mut rng).unwrap().as_str()).collect();
        directions.push(words.join(" "));
    }
    let mut normalized = Vec::with_capacity(directions.len());
    for d in &directions {
        let once = n.normalize_text(d);
        let twice = n.normalize_text(&once);
        ensure(once == twice, || format!("{d:?}: {once:?} then {twice:?}"))?;
        normalized.push(once);
    }
    let ratio: f64 = normalization_ratio(&normalized, &n);
    ensure(ratio == 0.0, || format!("ratio of normalized corpus {ratio}"))?;
    let raw: f64 = normalization_ratio(&corpus.iter().map(|p| p.source.as_str()).collect::<Vec<_>>(), &n);
    Ok(format!(
        "{} directions idempotent; ratio normalized = 0 (raw sources {raw:.3})",
        directions.len()
    ))
}

fn synthetic_corpus(seed: u64) -> Vec<PrescriptionPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let forms = ["tab", "cap", "puff", "drop", "spray"];
    let freqs = ["qd", "bid", "tid", "q 4 hrs", "q 6 hrs", "qhs", "prn"];
    let mut sources: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    while sources.len() < 7000 {
        let s = format!(
            "{} {} po {} x{} days",
            rng.gen_range(1..6),
            forms.choose(&mut rng).unwrap(),
            freqs.choose(&mut rng).unwrap(),
            rng.gen_range(1..400)
        );
        if seen.insert(canonical_key(&s)) {
            sources.push(s);
        }
    }
    for _ in 0..3000 {
        let s = sources[rng.gen_range(0..7000)].clone();
        let variant = match rng.gen_range(0..3) {
            0 => s.to_uppercase(),
            1 => s.replace(' ', "  "),
            _ => s,
        };
        sources.push(variant);
    }
    sources.shuffle(&mut rng);
    sources
        .into_iter()
        .enumerate()
        .map(|(i, s)| PrescriptionPair::new(format!("p{i}"), s, "r"))
        .collect()
}

fn c8_split() -> Outcome {
    let pairs = synthetic_corpus(8);
    let ratios = SplitRatios::new(0.6, 0.15, 0.25).map_err(|e| e.to_string())?;
    let plan = dedup_group_split(&pairs, ratios, 42).map_err(|e| e.to_string())?;
    let mut splits_of_key: BTreeMap<String, BTreeSet<Split>> = BTreeMap::new();
    for p in &pairs {
        let s = plan.split_of_pair(&p.id).ok_or("unassigned pair")?;
        splits_of_key.entry(canonical_key(&p.source)).or_default().insert(s);
    }
    let leaked = splits_of_key.values().filter(|s| s.len() > 1).count();
    ensure(leaked == 0, || format!("{leaked} canonical sources in two splits"))?;
    let groups = splits_of_key.len();
    let counts = plan.group_counts();
    for (split, want) in [(Split::Train, 0.6), (Split::Validation, 0.15), (Split::Test, 0.25)] {
        let got = counts[&split] as f64 / groups as f64;
        ensure((got - want).abs() <= 0.02, || format!("{split} proportion {got:.4}"))?;
    }
    let tsv = plan.to_tsv();
    let again = dedup_group_split(&pairs, ratios, 42).map_err(|e| e.to_string())?;
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?
        .install(|| dedup_group_split(&pairs, ratios, 42))
        .map_err(|e| e.to_string())?;
    ensure(again.to_tsv() == tsv && single.to_tsv() == tsv, || "rerun differs".into())?;
    ensure(again.pair_splits() == plan.pair_splits(), || "pair assignment differs".into())?;
    Ok(format!(
        "{} pairs, {groups} groups, 0 leaks, train/val/test = {}/{}/{}",
        pairs.len(),
        counts[&Split::Train],
        counts[&Split::Validation],
        counts[&Split::Test]
    ))
}

fn c9_ablation() -> Outcome {
    let corpus = mini_corpus();
    let plan = dedup_group_split(&corpus, SplitRatios::default(), 0).map_err(|e| e.to_string())?;
    let train: Vec<PrescriptionPair> = plan.select(&corpus, Split::Train).into_iter().cloned().collect();
    let test: Vec<PrescriptionPair> = plan.select(&corpus, Split::Test).into_iter().cloned().collect();
    let base = PipelineConfig {
        translator: TranslatorKind::Retrieval,
        fuzzy_retrieval: true,
        ..Default::default()
    };
    let runs: Vec<AblationRun<f64>> =
        run_ablation(&base, &Resources::bundled(), &train, &test).map_err(|e| e.to_string())?;
    ensure(runs.len() == 6, || format!("{} configurations", runs.len()))?;
    let (aux, bare) = (&runs[1].report, &runs[2].report);
    let mut only_aux = aux.config.clone();
    only_aux.augment_aux = false;
    ensure(aux.config.augment_aux && only_aux == bare.config, || "configs differ beyond augmentation".into())?;
    let mut differing = 0;
    for ((a, b), p) in aux.records.iter().zip(&bare.records).zip(&test) {
        ensure(a.id == b.id && b.translator_input == p.source, || format!("{}: bare input", p.id))?;
        ensure(a.translator_input == augment_auxiliary(p, AUX_SEPARATOR), || format!("{}: aux input", p.id))?;
        if a.translator_input != b.translator_input {
            differing += 1;
            ensure(a.translator_input.contains(AUX_SEPARATOR), || format!("{}: no separator", p.id))?;
        }
    }
    let with_drug = test.iter().filter(|p| p.drug.is_some()).count();
    ensure(differing == with_drug && differing > 0, || format!("{differing} inputs differ, {with_drug} have drug info"))?;
    let bleus: Vec<String> = runs.iter().map(|r| format!("{:.1}", r.report.bleu.score)).collect();
    Ok(format!(
        "6 configs on {} test pairs, BLEU [{}]; aux vs bare differ in {differing} inputs only",
        test.len(),
        bleus.join(", ")
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 golden baseline", c1_baseline),
        ("2 worked pipeline examples", c2_worked_pipeline),
        ("3 BLEU", c3_bleu),
        ("4 METEOR", c4_meteor),
        ("5 checker discrimination", c5_checkers),
        ("6 backoff safety", c6_backoff_safety),
        ("7 normalizer idempotence", c7_idempotence),
        ("8 split hygiene", c8_split),
        ("9 ablation shape", c9_ablation),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({ms} ms) {detail}"),
            Err(detail) => {
                println!("criterion {name}: FAIL ({ms} ms) {detail}");
                failed.push(name);
            }
        }
    }
    let paths_ok = !["3 BLEU", "4 METEOR", "5 checker discrimination", "9 ablation shape"]
        .iter()
        .any(|n| failed.contains(n));
    if paths_ok {
        println!(
            "criterion 10 non-reproducibility: PASS corpus-scale figures (BLEU 60.27, METEOR 76.11, 94.3% usable, \
             17.33%/5.98% flag rates) are not reproduced; their code paths ran in criteria 3-5 and 9"
        );
    } else {
        println!("criterion 10 non-reproducibility: FAIL a criterion exercising its code paths failed");
        failed.push("10");
    }
    println!("acceptance: {} failed, total {} ms", failed.len(), start.elapsed().as_millis());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
