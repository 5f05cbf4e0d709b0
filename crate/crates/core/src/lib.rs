//! Simplification of prescription directions: tokenizing and tagging,
//! rule-based normalization, pluggable translation, numeric consistency
//! checks with backoff, and BLEU/METEOR evaluation.

pub mod consistency;
pub mod corpus;
pub mod matcher;
pub mod metrics;
pub mod normalizer;
pub mod num;
pub mod pipeline;
pub mod resources;
pub mod sig_text;
pub mod translation;
mod tsv;


pub type Rational = sig_text::Rational;
pub type BleuScore = metrics::BleuScore<f64>;
pub type MeteorScore = metrics::MeteorScore<f64>;
pub type LengthStrata = metrics::LengthStrata<f64>;
pub type ReviewTally = corpus::ReviewTally<f64>;
pub type EvalReport = pipeline::EvalReport<f64>;
