//! Suffix-stripping stemmer for the closed direction vocabulary.

const EXCEPTIONS: [&str; 16] = [
    "is", "was", "has", "does", "this", "as", "us", "bus", "yes", "gas", "plus", "its", "his",
    "less", "thus", "always",
];

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn undouble(w: &mut String) {
    let b = w.as_bytes();
    let n = b.len();
    if n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1]) && !matches!(b[n - 1], b'l' | b's' | b'z') {
        w.pop();
    }
}

/// Strips plural `-s/-es/-ies`, `-ed` and `-ing`, then a final `e`.
///
/// `eyes`/`eye`, `treats`/`treat`, `taking`/`take` and `applied`/`apply`
/// share a stem.
pub fn stem(word: &str) -> String {
    if EXCEPTIONS.contains(&word) || !word.is_ascii() {
        return word.to_string();
    }
    let len = word.len();
    let mut w = if len > 4 && word.ends_with("ies") || len > 4 && word.ends_with("ied") {
        format!("{}y", &word[..len - 3])
    } else if word.ends_with("sses") {
        word[..len - 2].to_string()
    } else if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        word.to_string()
    } else if word.ends_with("es")
        && ["s", "x", "z", "ch", "sh"].iter().any(|s| word[..len - 2].ends_with(s))
    {
        word[..len - 2].to_string()
    } else if word.ends_with('s') && len > 2 {
        word[..len - 1].to_string()
    } else if word.ends_with("ed") && !word.ends_with("eed") && len > 3 {
        let mut w = word[..len - 2].to_string();
        undouble(&mut w);
        w
    } else if word.ends_with("ing") && len > 5 {
        let mut w = word[..len - 3].to_string();
        undouble(&mut w);
        w
    } else {
        word.to_string()
    };
    if w.len() > 2 && w.ends_with('e') {
        w.pop();
    }
    w
}
