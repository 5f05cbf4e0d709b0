use std::borrow::Cow;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::consistency::CheckMode;
use crate::metrics::SynonymTable;
use crate::normalizer::{Normalizer, RuleSet};
use crate::sig_text::Lexicon;
use crate::translation::{ExternalConfig, TranslatorKind};

fn default_threshold() -> usize {
    12
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub translator: TranslatorKind,
    /// Required when `translator` is external.
    pub external: Option<ExternalConfig>,
    /// Retrieval lookups tolerate one edit on the key.
    pub fuzzy_retrieval: bool,
    /// Required when backoff is enabled.
    pub checker: Option<CheckMode>,
    #[serde(default = "default_true")]
    pub backoff: bool,
    #[serde(default = "default_true")]
    pub normalize: bool,
    pub augment_aux: bool,
    /// Normalize candidates before the check instead of after it.
    pub normalize_before_check: bool,
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub length_threshold: usize,
    /// Also score against references passed through the normalizer.
    pub normalized_reference: bool,
    pub rules: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub synonyms: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            translator: TranslatorKind::RuleBaseline,
            external: None,
            fuzzy_retrieval: false,
            checker: Some(CheckMode::Component),
            backoff: true,
            normalize: true,
            augment_aux: false,
            normalize_before_check: false,
            seed: 0,
            length_threshold: default_threshold(),
            normalized_reference: false,
            rules: None,
            lexicon: None,
            synonyms: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        let config: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.backoff && self.checker.is_none() {
            return Err(PipelineError::Config("backoff needs a checker mode".into()));
        }
        if self.translator == TranslatorKind::External && self.external.is_none() {
            return Err(PipelineError::Config("external translator needs an [external] command".into()));
        }
        if self.length_threshold == 0 {
            return Err(PipelineError::Config("length_threshold must be at least 1".into()));
        }
        Ok(())
    }
}

/// Lexicon, rules and synonyms, from files or the bundled defaults.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicon: Cow<'static, Lexicon>,
    pub rules: Cow<'static, RuleSet>,
    pub synonyms: Cow<'static, SynonymTable>,
}

impl Resources {
    pub fn bundled() -> Self {
        Resources {
            lexicon: Cow::Borrowed(Lexicon::bundled()),
            rules: Cow::Borrowed(RuleSet::bundled()),
            synonyms: Cow::Borrowed(SynonymTable::bundled()),
        }
    }

    pub fn load(config: &PipelineConfig) -> Result<Self, PipelineError> {
        let mut r = Resources::bundled();
        if let Some(p) = &config.lexicon {
            r.lexicon = Cow::Owned(Lexicon::load(p).map_err(|e| PipelineError::resource(p, e))?);
        }
        if let Some(p) = &config.rules {
            r.rules = Cow::Owned(RuleSet::load(p).map_err(|e| PipelineError::resource(p, e))?);
        }
        if let Some(p) = &config.synonyms {
            r.synonyms = Cow::Owned(SynonymTable::load(p).map_err(|e| PipelineError::resource(p, e))?);
        }
        Ok(r)
    }

    pub fn normalizer(&self) -> Normalizer<'_> {
        Normalizer::new(&self.lexicon, &self.rules)
    }
}
