use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Number,
    /// `a/b` or a mixed number such as `1 1/2`.
    Fraction,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// Lowercased surface form.
    pub text: String,
    pub kind: TokenKind,
    /// Character offsets into the original text.
    pub span: Range<usize>,
}

impl Token {
    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, TokenKind::Number | TokenKind::Fraction)
    }
}

/// Splits direction text into lowercased tokens.
///
/// Digit runs (with an optional decimal part), `a/b` fractions and mixed
/// numbers separated from their fraction by spaces only are single tokens.
/// Letter runs stop at digits, so `x90` yields `x` and `90`. Every other
/// non-whitespace character is its own punctuation token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() {
            let (end, kind) = scan_number(&chars, i);
            i = end;
            kind
        } else if c.is_alphabetic() {
            while i < chars.len() && chars[i].is_alphabetic() {
                i += 1;
            }
            TokenKind::Word
        } else {
            i += 1;
            TokenKind::Punctuation
        };
        let surface: String = chars[start..i].iter().collect();
        tokens.push(Token {
            text: surface.to_lowercase(),
            kind,
            span: start..i,
        });
    }
    tokens
}

fn digits_end(chars: &[char], mut i: usize) -> usize {
    while i < chars.len() && chars[i].is_ascii_digit() {
        i += 1;
    }
    i
}

fn digit_at(chars: &[char], i: usize) -> bool {
    chars.get(i).is_some_and(|c| c.is_ascii_digit())
}

// Returns the end of a simple `a/b` fraction starting at `i`, if any.
fn fraction_end(chars: &[char], i: usize) -> Option<usize> {
    if !digit_at(chars, i) || i > 0 && chars[i - 1] == '/' {
        return None;
    }
    let num_end = digits_end(chars, i);
    if chars.get(num_end) == Some(&'/') && digit_at(chars, num_end + 1) {
        let end = digits_end(chars, num_end + 1);
        // `1/2/3` is not a fraction
        if chars.get(end) == Some(&'/') || chars.get(end) == Some(&'.') && digit_at(chars, end + 1) {
            return None;
        }
        Some(end)
    } else {
        None
    }
}

fn scan_number(chars: &[char], start: usize) -> (usize, TokenKind) {
    if let Some(end) = fraction_end(chars, start) {
        return (end, TokenKind::Fraction);
    }
    let mut end = digits_end(chars, start);
    if chars.get(end) == Some(&'.') && digit_at(chars, end + 1) {
        end = digits_end(chars, end + 1);
        return (end, TokenKind::Number);
    }
    // mixed number: integer, horizontal space, fraction
    let mut j = end;
    while j < chars.len() && (chars[j] == ' ' || chars[j] == '\t') {
        j += 1;
    }
    if j > end {
        if let Some(frac_end) = fraction_end(chars, j) {
            let boundary_ok = chars.get(frac_end).is_none_or(|c| !c.is_ascii_digit());
            if boundary_ok {
                return (frac_end, TokenKind::Fraction);
            }
        }
    }
    (end, TokenKind::Number)
}
