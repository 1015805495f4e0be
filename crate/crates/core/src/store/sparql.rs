//! SPARQL SELECT subset.
//!
//! Accepted grammar:
//!
//! ```text
//! query    := prefix* SELECT DISTINCT? (var+ | '*') WHERE? '{' patterns '}' modifier*
//! prefix   := PREFIX pname_ns iriref
//! patterns := (pattern ('.' pattern?)*)?
//! pattern  := term term term
//! term     := var | iriref | prefixed_name | 'a' | plain_string
//! modifier := LIMIT integer | OFFSET integer
//! ```
//!
//! Recognised but unsupported SPARQL features (OPTIONAL, FILTER, UNION and
//! friends, `;`/`,` lists, typed or tagged literals) are reported as such
//! rather than as plain syntax errors.

use std::collections::HashMap;
use std::fmt;

use super::term::{escape_literal, validate_iri, Term};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "OPTIONAL", "FILTER", "UNION", "MINUS", "BIND", "VALUES", "GRAPH", "SERVICE", "ORDER", "GROUP",
    "HAVING", "CONSTRUCT", "ASK", "DESCRIBE", "REDUCED", "BASE", "FROM", "NAMED", "EXISTS", "NOT", "AS",
    "INSERT", "DELETE", "LOAD", "CLEAR", "DROP", "CREATE", "WITH",
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Variable(String),
    Term(Term),
}

impl PatternTerm {
    pub fn variable(&self) -> Option<&str> {
        match self {
            PatternTerm::Variable(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Variable(v) => write!(f, "?{v}"),
            PatternTerm::Term(t) => t.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn slots(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

/// A parsed SELECT query over a basic graph pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    /// Declared prefixes in declaration order.
    pub prefixes: Vec<(String, String)>,
    /// Projected variables, without `?`. For `SELECT *` these are all pattern
    /// variables in order of first appearance.
    pub variables: Vec<String>,
    pub select_all: bool,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl Query {
    /// Variables used in the patterns, in order of first appearance.
    pub fn pattern_variables(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for pattern in &self.patterns {
            for v in pattern.slots().into_iter().filter_map(PatternTerm::variable) {
                if !seen.iter().any(|s: &String| s == v) {
                    seen.push(v.to_string());
                }
            }
        }
        seen
    }
}

/// Render a query back to SPARQL text using full IRIs.
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        if self.distinct {
            f.write_str("DISTINCT ")?;
        }
        if self.select_all {
            f.write_str("*")?;
        } else {
            let vars: Vec<String> = self.variables.iter().map(|v| format!("?{v}")).collect();
            f.write_str(&vars.join(" "))?;
        }
        f.write_str(" WHERE {")?;
        for p in &self.patterns {
            write!(f, " {} {} {} .", p.subject, p.predicate, p.object)?;
        }
        f.write_str(" }")?;
        if let Some(limit) = self.limit {
            write!(f, " LIMIT {limit}")?;
        }
        if let Some(offset) = self.offset {
            write!(f, " OFFSET {offset}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SparqlError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown prefix {prefix:?} at byte {position}")]
    UnknownPrefix { prefix: String, position: usize },
    #[error("unsupported feature at byte {position}: {feature}")]
    Unsupported { feature: String, position: usize },
}

impl SparqlError {
    pub fn position(&self) -> usize {
        match self {
            SparqlError::Syntax { position, .. }
            | SparqlError::UnknownPrefix { position, .. }
            | SparqlError::Unsupported { position, .. } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Iri(String),
    PrefixedName { prefix: String, local: String },
    Var(String),
    Str(String),
    Integer(u64),
    Word(String),
    Punct(char),
    /// Syntax of a SPARQL feature outside the subset.
    Unsupported(String),
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Iri(i) => format!("<{i}>"),
            Token::PrefixedName { prefix, local } => format!("{prefix}:{local}"),
            Token::Var(v) => format!("?{v}"),
            Token::Str(s) => format!("\"{}\"", escape_literal(s)),
            Token::Integer(n) => n.to_string(),
            Token::Word(w) => w.clone(),
            Token::Punct(c) => format!("'{c}'"),
            Token::Unsupported(f) => f.clone(),
            Token::Eof => "end of query".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn syntax(&self, position: usize, message: impl Into<String>) -> SparqlError {
        SparqlError::Syntax {
            position,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = &self.src[self.pos..];
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                return;
            }
        }
    }

    fn tokenize(mut self) -> Result<Vec<(Token, usize)>, SparqlError> {
        let mut tokens = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.pos;
            let Some(c) = self.src[start..].chars().next() else {
                tokens.push((Token::Eof, start));
                return Ok(tokens);
            };
            let token = match c {
                '<' => self.iri(start)?,
                '?' | '$' => {
                    let name_len = self.src[start + 1..]
                        .find(|ch: char| !(ch.is_alphanumeric() || ch == '_'))
                        .unwrap_or(self.src.len() - start - 1);
                    if name_len == 0 {
                        return Err(self.syntax(start, "empty variable name"));
                    }
                    self.pos = start + 1 + name_len;
                    Token::Var(self.src[start + 1..self.pos].to_string())
                }
                '"' | '\'' => self.string(start, c)?,
                '{' | '}' | '.' | '*' => {
                    self.pos += 1;
                    Token::Punct(c)
                }
                ';' | ',' => {
                    self.pos += 1;
                    Token::Unsupported(format!("'{c}' predicate/object lists"))
                }
                '(' | ')' | '[' | ']' | '!' | '=' | '>' | '^' | '|' | '/' | '+' | '-' => {
                    self.pos += 1;
                    Token::Unsupported(format!("expressions and paths ('{c}')"))
                }
                c if c.is_ascii_digit() => {
                    let len = self.src[start..]
                        .find(|ch: char| !ch.is_ascii_digit())
                        .unwrap_or(self.src.len() - start);
                    self.pos = start + len;
                    let digits = &self.src[start..self.pos];
                    Token::Integer(digits.parse().map_err(|_| self.syntax(start, "integer out of range"))?)
                }
                c if c.is_alphabetic() || c == ':' || c == '_' => self.word(start),
                other => return Err(self.syntax(start, format!("unexpected character {other:?}"))),
            };
            tokens.push((token, start));
        }
    }

    fn iri(&mut self, start: usize) -> Result<Token, SparqlError> {
        let body_start = start + 1;
        let Some(len) = self.src[body_start..].find(['>', '\n']) else {
            return Err(self.syntax(start, "unterminated IRI"));
        };
        if self.src[body_start + len..].starts_with('\n') {
            return Err(self.syntax(start, "unterminated IRI"));
        }
        let iri = &self.src[body_start..body_start + len];
        validate_iri(iri).map_err(|e| self.syntax(start, e.to_string()))?;
        self.pos = body_start + len + 1;
        Ok(Token::Iri(iri.to_string()))
    }

    fn string(&mut self, start: usize, quote: char) -> Result<Token, SparqlError> {
        let mut value = String::new();
        let mut chars = self.src[start + 1..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                c if c == quote => {
                    self.pos = start + 1 + i + 1;
                    let rest = &self.src[self.pos..];
                    if rest.starts_with('@') || rest.starts_with("^^") {
                        return Err(SparqlError::Unsupported {
                            feature: "language-tagged or typed literals".into(),
                            position: self.pos,
                        });
                    }
                    return Ok(Token::Str(value));
                }
                '\n' | '\r' => break,
                '\\' => {
                    let Some((_, kind)) = chars.next() else { break };
                    let decoded = match kind {
                        't' => '\t',
                        'n' => '\n',
                        'r' => '\r',
                        'b' => '\u{8}',
                        'f' => '\u{c}',
                        '"' => '"',
                        '\'' => '\'',
                        '\\' => '\\',
                        'u' | 'U' => {
                            let digits = if kind == 'u' { 4 } else { 8 };
                            let hex: String = chars.by_ref().take(digits).map(|(_, c)| c).collect();
                            u32::from_str_radix(&hex, 16)
                                .ok()
                                .filter(|_| hex.len() == digits)
                                .and_then(char::from_u32)
                                .ok_or_else(|| self.syntax(start + 1 + i, "invalid unicode escape"))?
                        }
                        other => return Err(self.syntax(start + 1 + i, format!("invalid escape \\{other}"))),
                    };
                    value.push(decoded);
                }
                c => value.push(c),
            }
        }
        Err(self.syntax(start, "unterminated string"))
    }

    fn word(&mut self, start: usize) -> Token {
        let len = self.src[start..]
            .find(|c: char| !(c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.' | '%')))
            .unwrap_or(self.src.len() - start);
        let mut word = &self.src[start..start + len];
        // a trailing '.' ends the pattern, it is not part of the name
        while word.ends_with('.') {
            word = &word[..word.len() - 1];
        }
        self.pos = start + word.len();
        match word.split_once(':') {
            Some((prefix, local)) => Token::PrefixedName {
                prefix: prefix.to_string(),
                local: local.to_string(),
            },
            None => Token::Word(word.to_string()),
        }
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    index: usize,
    prefixes: HashMap<String, String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.index].0
    }

    fn position(&self) -> usize {
        self.tokens[self.index].1
    }

    fn advance(&mut self) -> (Token, usize) {
        let token = self.tokens[self.index].clone();
        if self.index + 1 < self.tokens.len() {
            self.index += 1;
        }
        token
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, SparqlError> {
        Err(SparqlError::Syntax {
            position: self.position(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, SparqlError> {
        if let Token::Unsupported(feature) = self.peek() {
            return Err(SparqlError::Unsupported {
                feature: feature.clone(),
                position: self.position(),
            });
        }
        if let Token::Word(w) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED_KEYWORDS.contains(&upper.as_str()) {
                return Err(SparqlError::Unsupported {
                    feature: upper,
                    position: self.position(),
                });
            }
        }
        self.syntax(format!("expected {expected}, found {}", self.peek().describe()))
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Token::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), SparqlError> {
        if self.keyword(kw) {
            self.advance();
            Ok(())
        } else {
            self.unexpected(kw)
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), SparqlError> {
        if *self.peek() == Token::Punct(c) {
            self.advance();
            Ok(())
        } else {
            self.unexpected(&format!("'{c}'"))
        }
    }

    fn query(&mut self) -> Result<Query, SparqlError> {
        let mut declared = Vec::new();
        while self.keyword("PREFIX") {
            self.advance();
            let prefix = match self.advance() {
                (Token::PrefixedName { prefix, local }, _) if local.is_empty() => prefix,
                (other, position) => {
                    return Err(SparqlError::Syntax {
                        position,
                        message: format!("expected prefix name ending in ':', found {}", other.describe()),
                    })
                }
            };
            let iri = match self.advance() {
                (Token::Iri(iri), _) => iri,
                (other, position) => {
                    return Err(SparqlError::Syntax {
                        position,
                        message: format!("expected IRI after PREFIX {prefix}:, found {}", other.describe()),
                    })
                }
            };
            self.prefixes.insert(prefix.clone(), iri.clone());
            declared.push((prefix, iri));
        }

        self.expect_keyword("SELECT")?;
        let distinct = if self.keyword("DISTINCT") {
            self.advance();
            true
        } else {
            false
        };

        let mut variables = Vec::new();
        let mut projected_at = Vec::new();
        let select_all = if *self.peek() == Token::Punct('*') {
            self.advance();
            true
        } else {
            while let Token::Var(v) = self.peek().clone() {
                projected_at.push(self.position());
                variables.push(v);
                self.advance();
            }
            if variables.is_empty() {
                return self.unexpected("projected variables or '*'");
            }
            false
        };

        if self.keyword("WHERE") {
            self.advance();
        }
        self.expect_punct('{')?;
        let patterns = self.patterns()?;
        self.expect_punct('}')?;

        let mut limit = None;
        let mut offset = None;
        loop {
            let slot = if self.keyword("LIMIT") {
                &mut limit
            } else if self.keyword("OFFSET") {
                &mut offset
            } else {
                break;
            };
            let (kw, position) = self.advance();
            if slot.is_some() {
                return Err(SparqlError::Syntax {
                    position,
                    message: format!("duplicate {}", kw.describe()),
                });
            }
            match self.advance() {
                (Token::Integer(n), _) => *slot = Some(usize::try_from(n).unwrap_or(usize::MAX)),
                (other, position) => {
                    return Err(SparqlError::Syntax {
                        position,
                        message: format!("expected integer, found {}", other.describe()),
                    })
                }
            }
        }
        if *self.peek() != Token::Eof {
            return self.unexpected("end of query");
        }

        let mut query = Query {
            prefixes: declared,
            variables,
            select_all,
            distinct,
            patterns,
            limit,
            offset,
        };
        let in_pattern = query.pattern_variables();
        if select_all {
            query.variables = in_pattern;
        } else {
            for (v, position) in query.variables.iter().zip(projected_at) {
                if !in_pattern.contains(v) {
                    return Err(SparqlError::Syntax {
                        position,
                        message: format!("projected variable ?{v} does not occur in the pattern"),
                    });
                }
            }
        }
        Ok(query)
    }

    fn patterns(&mut self) -> Result<Vec<TriplePattern>, SparqlError> {
        let mut patterns = Vec::new();
        loop {
            match self.peek() {
                Token::Punct('}') => return Ok(patterns),
                Token::Punct('{') => {
                    // a nested group usually comes with UNION or MINUS; name that if present
                    let keyword = self.tokens[self.index..].iter().find_map(|(t, p)| match t {
                        Token::Word(w) if UNSUPPORTED_KEYWORDS.contains(&w.to_ascii_uppercase().as_str()) => {
                            Some((w.to_ascii_uppercase(), *p))
                        }
                        _ => None,
                    });
                    let (feature, position) = keyword.unwrap_or(("nested group patterns".into(), self.position()));
                    return Err(SparqlError::Unsupported { feature, position });
                }
                _ => {}
            }
            let subject = self.term(false)?;
            let predicate = self.term(true)?;
            if let PatternTerm::Term(Term::Literal(_)) = predicate {
                return self.syntax("literal in predicate position");
            }
            let object = self.term(false)?;
            patterns.push(TriplePattern {
                subject,
                predicate,
                object,
            });
            match self.peek() {
                Token::Punct('.') => {
                    self.advance();
                }
                Token::Punct('}') => return Ok(patterns),
                _ => return self.unexpected("'.' or '}'"),
            }
        }
    }

    fn term(&mut self, predicate_position: bool) -> Result<PatternTerm, SparqlError> {
        let position = self.position();
        let term = match self.peek().clone() {
            Token::Var(v) => PatternTerm::Variable(v),
            Token::Iri(iri) => PatternTerm::Term(Term::Iri(iri)),
            Token::Str(s) => PatternTerm::Term(Term::Literal(s)),
            Token::PrefixedName { prefix, local } => {
                let Some(namespace) = self.prefixes.get(&prefix) else {
                    return Err(SparqlError::UnknownPrefix { prefix, position });
                };
                let iri = format!("{namespace}{local}");
                validate_iri(&iri).map_err(|e| SparqlError::Syntax {
                    position,
                    message: e.to_string(),
                })?;
                PatternTerm::Term(Term::Iri(iri))
            }
            Token::Word(w) if predicate_position && w == "a" => PatternTerm::Term(Term::Iri(RDF_TYPE.to_string())),
            Token::Integer(_) => {
                return Err(SparqlError::Unsupported {
                    feature: "numeric literals".into(),
                    position,
                })
            }
            _ => return self.unexpected("a variable, IRI, prefixed name or string"),
        };
        self.advance();
        Ok(term)
    }
}

/// Parse a query of the supported subset.
pub fn parse_sparql(text: &str) -> Result<Query, SparqlError> {
    let tokens = Lexer { src: text, pos: 0 }.tokenize()?;
    Parser {
        tokens,
        index: 0,
        prefixes: HashMap::new(),
    }
    .query()
}
