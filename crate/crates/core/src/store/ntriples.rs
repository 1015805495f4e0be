//! Canonical N-Triples persistence.
//!
//! Output has one triple per line, lines sorted bytewise, each terminated
//! by `\n`. Literals are plain; `"`, `\` and control characters are escaped.
//! The reader accepts the same subset of N-Triples: IRIs and plain literals,
//! blank lines and `#` comments. Blank nodes, language tags and datatypes are
//! rejected.

use super::{Dataset, StoreError, Term, Triple};

/// Serialize a dataset as canonical N-Triples.
pub fn serialize_ntriples(dataset: &Dataset) -> String {
    let mut lines: Vec<String> = dataset.iter().map(|t| t.to_string()).collect();
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parse N-Triples text. Errors carry the 1-based line number.
pub fn parse_ntriples(input: &str) -> Result<Dataset, StoreError> {
    let mut triples = Vec::new();
    for (i, line) in input.split('\n').enumerate() {
        let line_no = i + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let err = |message: String| StoreError::NTriples { line: line_no, message };
        let mut cursor = Cursor { rest: line };
        cursor.skip_ws();
        if cursor.rest.is_empty() || cursor.rest.starts_with('#') {
            continue;
        }
        let subject = cursor.term().map_err(&err)?;
        cursor.skip_ws();
        let predicate = cursor.term().map_err(&err)?;
        cursor.skip_ws();
        let object = cursor.term().map_err(&err)?;
        cursor.skip_ws();
        if !cursor.eat('.') {
            return Err(err("expected '.' after object".into()));
        }
        cursor.skip_ws();
        if !cursor.rest.is_empty() && !cursor.rest.starts_with('#') {
            return Err(err(format!("unexpected trailing content {:?}", cursor.rest)));
        }
        triples.push(Triple::new(subject, predicate, object).map_err(|e| err(e.to_string()))?);
    }
    Ok(triples.into_iter().collect())
}

struct Cursor<'a> {
    rest: &'a str,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn eat(&mut self, c: char) -> bool {
        match self.rest.strip_prefix(c) {
            Some(rest) => {
                self.rest = rest;
                true
            }
            None => false,
        }
    }

    fn term(&mut self) -> Result<Term, String> {
        match self.rest.chars().next() {
            Some('<') => self.iri(),
            Some('"') => self.literal(),
            Some('_') => Err("blank nodes are not supported".into()),
            Some(c) => Err(format!("unexpected character {c:?}")),
            None => Err("unexpected end of line".into()),
        }
    }

    fn iri(&mut self) -> Result<Term, String> {
        self.eat('<');
        let mut value = String::new();
        let mut chars = self.rest.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '>' => {
                    self.rest = &self.rest[i + 1..];
                    return Term::iri(value).map_err(|e| e.to_string());
                }
                '\\' => {
                    let (_, kind) = chars.next().ok_or("dangling escape in IRI")?;
                    value.push(unicode_escape(kind, &mut chars)?);
                }
                c => value.push(c),
            }
        }
        Err("unterminated IRI".into())
    }

    fn literal(&mut self) -> Result<Term, String> {
        self.eat('"');
        let mut value = String::new();
        let mut chars = self.rest.char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.rest = &self.rest[i + 1..];
                    if self.rest.starts_with('@') || self.rest.starts_with("^^") {
                        return Err("language tags and datatypes are not supported".into());
                    }
                    return Ok(Term::literal(value));
                }
                '\\' => {
                    let (_, kind) = chars.next().ok_or("dangling escape in literal")?;
                    value.push(match kind {
                        't' => '\t',
                        'b' => '\u{8}',
                        'n' => '\n',
                        'r' => '\r',
                        'f' => '\u{c}',
                        '"' => '"',
                        '\'' => '\'',
                        '\\' => '\\',
                        other => unicode_escape(other, &mut chars)?,
                    });
                }
                c => value.push(c),
            }
        }
        Err("unterminated literal".into())
    }
}

/// Decode `\uXXXX` / `\UXXXXXXXX`, with `kind` the letter after the backslash.
fn unicode_escape(kind: char, chars: &mut std::str::CharIndices<'_>) -> Result<char, String> {
    let digits = match kind {
        'u' => 4,
        'U' => 8,
        other => return Err(format!("invalid escape \\{other}")),
    };
    let hex: String = chars.by_ref().take(digits).map(|(_, c)| c).collect();
    if hex.len() != digits {
        return Err("truncated unicode escape".into());
    }
    u32::from_str_radix(&hex, 16)
        .ok()
        .and_then(char::from_u32)
        .ok_or_else(|| format!("invalid unicode escape {hex}"))
}
