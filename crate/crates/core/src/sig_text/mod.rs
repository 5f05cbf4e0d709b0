//! Tokenization, quantity parsing, and dictionary-based component tagging.

pub mod lexicon;
pub mod quantity;
pub mod tagger;
pub mod token;

pub use lexicon::{ComponentTag, Lexicon, LexiconEntry, LexiconError};
pub use quantity::{parse_quantity, parse_quantity_str, scan_quantities, Quantity, QuantityRun, Rational};
pub use tagger::{extract_numerics, tag_components, tag_text, TaggedDirection};
pub use token::{tokenize, Token, TokenKind};
