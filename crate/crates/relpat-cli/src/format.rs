//! The pattern file format and the compact word grammar.
//!
//! A pattern file is a set of `key = value` lines (`#` starts a comment):
//!
//! ```text
//! alphabet = a b
//! relation = len
//! pattern  = x1 x2 ab y1 y2 y3 ab z1 z2 z3 z4 z5
//! pairs    = (x1,x2) (y1,y2) (y2,y3) (z1,z2) (z2,z3) (z3,z4) (z4,z5)
//! ```
//!
//! A pattern token made solely of alphabet symbols (each optionally followed
//! by `^uint`) expands to a terminal run; any other identifier token is a
//! variable. Words use the same grammar: `a^2aba^9aba^5`.

use relpat::pattern::{Alphabet, Pattern, PatternItem, Relation, RelationKind, RelationalPattern, Var, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FileError {
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    DuplicateVariable(String),
    UnknownSymbolInPairs(String),
    Invalid(relpat::Error),
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Parse {
                line,
                column,
                message,
            } => write!(f, "parse error at line {line}, column {column}: {message}"),
            FileError::DuplicateVariable(v) => write!(f, "duplicate variable {v}"),
            FileError::UnknownSymbolInPairs(v) => {
                write!(f, "pairs mention {v}, which is not in the pattern")
            }
            FileError::Invalid(e) => write!(f, "invalid pattern: {e}"),
        }
    }
}

impl std::error::Error for FileError {}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> FileError {
    FileError::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Expands a token under the word grammar `(symbol | symbol '^' uint)+`;
/// `None` if the token is not a pure terminal run over the alphabet.
fn terminal_run(alphabet: &Alphabet, token: &str) -> Option<Vec<char>> {
    let chars: Vec<char> = token.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let sym = chars[i];
        if !alphabet.contains(sym) {
            return None;
        }
        i += 1;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return None;
            }
            let count: usize = chars[start..i].iter().collect::<String>().parse().ok()?;
            out.extend(std::iter::repeat_n(sym, count));
        } else {
            out.push(sym);
        }
    }
    Some(out)
}

/// Parses a compact word literal; every symbol must be in the alphabet.
pub fn parse_word_literal(alphabet: &Alphabet, text: &str) -> Result<Word, FileError> {
    if text.is_empty() {
        return Ok(Word::empty());
    }
    terminal_run(alphabet, text)
        .map(Word::new)
        .ok_or_else(|| parse_err(0, 1, format!("malformed word literal {text:?}")))
}

struct RawFile {
    alphabet: (usize, String),
    relation: (usize, String),
    pattern: (usize, String),
    pairs: Option<(usize, String)>,
}

fn split_records(text: &str) -> Result<RawFile, FileError> {
    let mut alphabet = None;
    let mut relation = None;
    let mut pattern = None;
    let mut pairs = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if line.trim().is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(parse_err(line_no, 1, "expected `key = value`"));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim().to_string();
        let slot = match key {
            "alphabet" => &mut alphabet,
            "relation" => &mut relation,
            "pattern" => &mut pattern,
            "pairs" => &mut pairs,
            _ => return Err(parse_err(line_no, 1, format!("unknown key {key:?}"))),
        };
        if slot.is_some() {
            return Err(parse_err(line_no, 1, format!("repeated key {key:?}")));
        }
        *slot = Some((line_no, value));
    }
    Ok(RawFile {
        alphabet: alphabet.ok_or_else(|| parse_err(0, 1, "missing `alphabet` line"))?,
        relation: relation.ok_or_else(|| parse_err(0, 1, "missing `relation` line"))?,
        pattern: pattern.ok_or_else(|| parse_err(0, 1, "missing `pattern` line"))?,
        pairs,
    })
}

pub fn parse_pattern_file(text: &str) -> Result<RelationalPattern, FileError> {
    let raw = split_records(text)?;

    let (alpha_line, alpha_text) = &raw.alphabet;
    let mut symbols = Vec::new();
    for token in alpha_text.split_whitespace() {
        let mut cs = token.chars();
        let (Some(c), None) = (cs.next(), cs.next()) else {
            return Err(parse_err(
                *alpha_line,
                1,
                format!("alphabet symbols are single characters, got {token:?}"),
            ));
        };
        symbols.push(c);
    }
    let alphabet = Alphabet::new(symbols).map_err(FileError::Invalid)?;

    let (rel_line, rel_text) = &raw.relation;
    let kind = match rel_text.as_str() {
        "eq" => RelationKind::Eq,
        "rev" => RelationKind::Rev,
        "len" => RelationKind::Len,
        other => {
            return Err(parse_err(
                *rel_line,
                1,
                format!("relation must be eq, rev, or len, got {other:?}"),
            ))
        }
    };

    let (pat_line, pat_text) = &raw.pattern;
    let mut items = Vec::new();
    let mut column = 1usize;
    for token in pat_text.split_whitespace() {
        if let Some(run) = terminal_run(&alphabet, token) {
            items.extend(run.into_iter().map(PatternItem::Terminal));
        } else {
            if !token
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(parse_err(
                    *pat_line,
                    column,
                    format!("token {token:?} is neither a terminal run nor a variable name"),
                ));
            }
            items.push(PatternItem::var(token));
        }
        column += token.chars().count() + 1;
    }
    let pattern = match Pattern::new(items) {
        Ok(p) => p,
        Err(relpat::Error::DuplicateVariable(v)) => {
            return Err(FileError::DuplicateVariable(v.name().to_string()))
        }
        Err(e) => return Err(FileError::Invalid(e)),
    };

    let mut pair_list = Vec::new();
    if let Some((pairs_line, pairs_text)) = &raw.pairs {
        for token in pairs_text.split_whitespace() {
            let inner = token
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| {
                    parse_err(*pairs_line, 1, format!("pair {token:?} must look like (x,y)"))
                })?;
            let Some((x, y)) = inner.split_once(',') else {
                return Err(parse_err(
                    *pairs_line,
                    1,
                    format!("pair {token:?} must look like (x,y)"),
                ));
            };
            pair_list.push((Var::new(x.trim()), Var::new(y.trim())));
        }
    }

    match RelationalPattern::new(alphabet, pattern, Relation::new(kind, pair_list)) {
        Ok(rp) => Ok(rp),
        Err(relpat::Error::UnknownVariableInPairs(v)) => {
            Err(FileError::UnknownSymbolInPairs(v.name().to_string()))
        }
        Err(e) => Err(FileError::Invalid(e)),
    }
}

/// Serializes back to the file format; `parse_pattern_file` inverts this for
/// every constructible pattern.
pub fn serialize_pattern(rp: &RelationalPattern) -> String {
    let alphabet = rp
        .alphabet()
        .symbols()
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    let pairs = rp
        .relation()
        .pairs()
        .map(|(x, y)| format!("({},{})", x.name(), y.name()))
        .collect::<Vec<_>>()
        .join(" ");
    format!(
        "alphabet = {alphabet}\nrelation = {}\npattern = {}\npairs = {pairs}\n",
        rp.kind(),
        rp.pattern()
    )
}
