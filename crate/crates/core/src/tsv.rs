use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TsvError {
    #[error("line {line}: expected header `{expected}`, found `{found}`")]
    Header {
        line: u64,
        expected: String,
        found: String,
    },
    #[error("line {line}: expected {expected} tab-separated columns, found {found}")]
    Columns {
        line: u64,
        expected: usize,
        found: usize,
    },
}

impl TsvError {
    pub fn line(&self) -> u64 {
        match self {
            TsvError::Header { line, .. } | TsvError::Columns { line, .. } => *line,
        }
    }
}

/// A data row with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row<'a> {
    pub line: u64,
    pub fields: Vec<&'a str>,
}

/// Splits tab-separated text with a mandatory header row.
///
/// Blank lines and lines starting with `#` are ignored. Text with no data
/// lines at all (not even a header) yields no rows.
pub fn rows<'a>(text: &'a str, header: &[&str]) -> Result<Vec<Row<'a>>, TsvError> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx as u64 + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').map(str::trim).collect();
        if !seen_header {
            let matches = fields.len() == header.len()
                && fields
                    .iter()
                    .zip(header)
                    .all(|(f, h)| f.eq_ignore_ascii_case(h));
            if !matches {
                return Err(TsvError::Header {
                    line,
                    expected: header.join("\t"),
                    found: raw.to_string(),
                });
            }
            seen_header = true;
            continue;
        }
        if fields.len() != header.len() {
            return Err(TsvError::Columns {
                line,
                expected: header.len(),
                found: fields.len(),
            });
        }
        out.push(Row { line, fields });
    }
    Ok(out)
}
