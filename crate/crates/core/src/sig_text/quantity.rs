use std::fmt;
use std::ops::Range;

use num_rational::Ratio;
use num_traits::CheckedAdd;

use super::token::{tokenize, Token, TokenKind};

/// Exact non-negative rational used for every quantity value.
pub type Rational = Ratio<u64>;

const WORD_NUMBERS: [&str; 20] = [
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
    "twenty",
];

/// A numeric amount recovered from direction text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantity {
    value: Rational,
    surface: String,
}

impl Quantity {
    pub fn new(value: Rational, surface: impl Into<String>) -> Self {
        Self {
            value,
            surface: surface.into(),
        }
    }

    pub fn value(&self) -> Rational {
        self.value
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    /// Decimal rendering with at most two fractional digits.
    pub fn canonical(&self) -> String {
        render_decimal(self.value)
    }

    pub fn to_f64(&self) -> f64 {
        // the canonical string always parses
        self.canonical().parse().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Renders `value` rounded half-up to hundredths, trailing zeros trimmed.
pub fn render_decimal(value: Rational) -> String {
    let numer = u128::from(*value.numer());
    let denom = u128::from(*value.denom());
    let hundredths = (numer * 200 + denom) / (denom * 2);
    let whole = hundredths / 100;
    let frac = hundredths % 100;
    if frac == 0 {
        whole.to_string()
    } else if frac % 10 == 0 {
        format!("{whole}.{}", frac / 10)
    } else {
        format!("{whole}.{frac:02}")
    }
}

/// A maximal run of tokens that together denote one quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantityRun {
    pub tokens: Range<usize>,
    pub quantity: Quantity,
}

/// Parses a whole token run as a single quantity.
///
/// Returns `None` for anything outside the recognized grammar, never a
/// partial value.
pub fn parse_quantity(tokens: &[Token]) -> Option<Quantity> {
    let (end, value) = parse_at(tokens, 0)?;
    (end == tokens.len()).then(|| Quantity::new(value, surface(tokens)))
}

/// Tokenizes `text` and parses it as a single quantity.
pub fn parse_quantity_str(text: &str) -> Option<Quantity> {
    parse_quantity(&tokenize(text))
}

/// Finds quantity runs left to right, taking the longest run at each start.
pub fn scan_quantities(tokens: &[Token]) -> Vec<QuantityRun> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match parse_at(tokens, i) {
            Some((end, value)) => {
                runs.push(QuantityRun {
                    tokens: i..end,
                    quantity: Quantity::new(value, surface(&tokens[i..end])),
                });
                i = end;
            }
            None => i += 1,
        }
    }
    runs
}

fn surface(tokens: &[Token]) -> String {
    tokens
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn text_at(tokens: &[Token], i: usize) -> Option<&str> {
    tokens.get(i).map(|t| t.text.as_str())
}

fn small_fraction(word: &str) -> Option<Rational> {
    match word {
        "half" => Some(Rational::new(1, 2)),
        "quarter" => Some(Rational::new(1, 4)),
        _ => None,
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
    if int_part.is_empty() || int_part.len() > 18 || frac_part.len() > 18 {
        return None;
    }
    let int: u64 = int_part.parse().ok()?;
    if frac_part.is_empty() {
        return Some(Rational::from_integer(int));
    }
    let frac: u64 = frac_part.parse().ok()?;
    let scale = 10u64.checked_pow(frac_part.len() as u32)?;
    let numer = int.checked_mul(scale)?.checked_add(frac)?;
    Some(Rational::new(numer, scale))
}

fn parse_fraction(text: &str) -> Option<Rational> {
    let (whole, frac) = match text.split_once(char::is_whitespace) {
        Some((w, f)) => (Some(w), f.trim_start()),
        None => (None, text),
    };
    let (numer, denom) = frac.split_once('/')?;
    if numer.len() > 18 || denom.len() > 18 {
        return None;
    }
    let numer: u64 = numer.parse().ok()?;
    let denom: u64 = denom.parse().ok()?;
    if denom == 0 {
        return None;
    }
    let frac = Rational::new(numer, denom);
    match whole {
        Some(w) => Rational::from_integer(parse_decimal(w)?.to_integer()).checked_add(&frac),
        None => Some(frac),
    }
}

// (end, value, is_whole_number)
fn atom(tokens: &[Token], i: usize) -> Option<(usize, Rational, bool)> {
    let token = tokens.get(i)?;
    match token.kind {
        TokenKind::Number => {
            let value = parse_decimal(&token.text)?;
            Some((i + 1, value, !token.text.contains('.')))
        }
        TokenKind::Fraction => Some((i + 1, parse_fraction(&token.text)?, false)),
        TokenKind::Word => {
            if let Some(pos) = WORD_NUMBERS.iter().position(|w| *w == token.text) {
                return Some((i + 1, Rational::from_integer(pos as u64 + 1), true));
            }
            if let Some(v) = small_fraction(&token.text) {
                return Some((i + 1, v, false));
            }
            if token.text == "a" {
                let v = small_fraction(text_at(tokens, i + 1)?)?;
                return Some((i + 2, v, false));
            }
            None
        }
        TokenKind::Punctuation => None,
    }
}

fn parse_at(tokens: &[Token], i: usize) -> Option<(usize, Rational)> {
    let (mut end, mut value, whole) = atom(tokens, i)?;
    // "one and half", "two and a quarter"
    if whole && text_at(tokens, end) == Some("and") {
        let mut j = end + 1;
        if text_at(tokens, j) == Some("a") {
            j += 1;
        }
        if let Some(extra) = text_at(tokens, j).and_then(small_fraction) {
            if let Some(sum) = value.checked_add(&extra) {
                value = sum;
                end = j + 1;
            }
        }
    }
    // "one (1)": a parenthesized echo of the same value
    if text_at(tokens, end) == Some("(") {
        if let Some((echo_end, echo, _)) = atom(tokens, end + 1) {
            if echo == value && text_at(tokens, echo_end) == Some(")") {
                end = echo_end + 1;
            }
        }
    }
    Some((end, value))
}
