use rxsig::consistency::Provenance;
use rxsig::normalizer::Normalizer;
use rxsig::pipeline::{run_pipeline, PipelineConfig, Resources};
use rxsig::resources::mini_corpus;
use rxsig::translation::{ExternalConfig, ExternalTranslator, TranslateError, Translator, TranslatorKind};

fn echo(args: &[&str], timeout_ms: u64, pool: usize) -> ExternalConfig {
    ExternalConfig {
        command: env!("CARGO_BIN_EXE_echo-translator").to_string(),
        args: args.iter().map(|a| a.to_string()).collect(),
        timeout_ms,
        pool,
    }
}

#[test]
fn echo_returns_source() {
    let t = ExternalTranslator::spawn(&echo(&[], 5_000, 1)).unwrap();
    let c = t.translate("1 po qd").unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].text, "1 po qd");
    assert_eq!(t.translate("2 tab bid").unwrap()[0].text, "2 tab bid");
}

#[test]
fn slow_reply_times_out() {
    let t = ExternalTranslator::spawn(&echo(&["--delay-ms", "1500"], 100, 1)).unwrap();
    assert!(matches!(t.translate("1 po qd"), Err(TranslateError::Timeout { .. })));
}

#[test]
fn malformed_reply() {
    let t = ExternalTranslator::spawn(&echo(&["--malformed"], 5_000, 1)).unwrap();
    assert!(matches!(t.translate("1 po qd"), Err(TranslateError::Malformed(_))));
}

#[test]
fn exited_process_is_unreachable() {
    let t = ExternalTranslator::spawn(&echo(&["--exit"], 5_000, 1)).unwrap();
    assert!(matches!(t.translate("1 po qd"), Err(TranslateError::Unreachable(_))));
    let missing = ExternalConfig::new("/nonexistent/translator");
    assert!(matches!(ExternalTranslator::spawn(&missing), Err(TranslateError::Unreachable(_))));
}

#[test]
fn out_of_order_replies_are_correlated_for_any_pool_size() {
    let inputs: Vec<String> = (0..12).map(|i| format!("{i} tab po qd")).collect();
    let mut seen = Vec::new();
    for pool in [1, 2, 3] {
        let t = ExternalTranslator::spawn(&echo(&["--reverse"], 5_000, pool)).unwrap();
        let out: Vec<String> = t
            .translate_all(&inputs)
            .into_iter()
            .map(|r| r.unwrap()[0].text.clone())
            .collect();
        assert_eq!(out, inputs, "pool {pool}");
        seen.push(out);
    }
    assert!(seen.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn echo_pipeline_is_identity_then_normalize() {
    let corpus = mini_corpus();
    let config = PipelineConfig {
        translator: TranslatorKind::External,
        external: Some(echo(&[], 5_000, 2)),
        ..Default::default()
    };
    let res = Resources::bundled();
    let t = ExternalTranslator::spawn(config.external.as_ref().unwrap()).unwrap();
    let out = run_pipeline(&config, &res, &t, &corpus).unwrap();
    let n = Normalizer::bundled();
    for (o, p) in out.iter().zip(&corpus) {
        assert_eq!(o.checked.provenance, Provenance::Candidate, "{}", p.id);
        assert!(o.checked.report.token_consistent && o.checked.report.component_consistent);
        assert_eq!(o.output, n.normalize_text(&p.source));
    }
}

#[test]
fn timeouts_back_off_without_failing_the_batch() {
    let corpus: Vec<_> = mini_corpus().into_iter().take(3).collect();
    let config = PipelineConfig {
        translator: TranslatorKind::External,
        external: Some(echo(&["--delay-ms", "1500"], 50, 1)),
        normalize: false,
        ..Default::default()
    };
    let t = ExternalTranslator::spawn(config.external.as_ref().unwrap()).unwrap();
    let out = run_pipeline(&config, &Resources::bundled(), &t, &corpus).unwrap();
    for (o, p) in out.iter().zip(&corpus) {
        assert_eq!(o.checked.provenance, Provenance::BackoffSource);
        assert_eq!(o.output, p.source);
        assert!(o.translate_error.as_deref().unwrap().contains("no reply"));
    }
}
