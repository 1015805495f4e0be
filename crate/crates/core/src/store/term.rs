use std::fmt;

use super::StoreError;

/// An RDF term: an absolute IRI or a plain literal.
///
/// Ordering puts IRIs before literals, then compares the string value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(String),
    Literal(String),
}

impl Term {
    /// An IRI term. Fails unless `iri` is absolute and contains only
    /// characters N-Triples allows inside `<...>`.
    pub fn iri(iri: impl Into<String>) -> Result<Self, StoreError> {
        let iri = iri.into();
        validate_iri(&iri)?;
        Ok(Term::Iri(iri))
    }

    pub fn literal(value: impl Into<String>) -> Self {
        Term::Literal(value.into())
    }

    pub fn value(&self) -> &str {
        match self {
            Term::Iri(v) | Term::Literal(v) => v,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }
}

/// N-Triples syntax: `<iri>` or `"escaped literal"`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{iri}>"),
            Term::Literal(value) => {
                f.write_str("\"")?;
                f.write_str(&escape_literal(value))?;
                f.write_str("\"")
            }
        }
    }
}

/// Escape a literal body for N-Triples and SPARQL string syntax.
pub fn escape_literal(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn validate_iri(iri: &str) -> Result<(), StoreError> {
    let bad = |reason: &str| StoreError::InvalidIri {
        iri: iri.to_string(),
        reason: reason.to_string(),
    };
    let Some(colon) = iri.find(':') else {
        return Err(bad("not absolute (no scheme)"));
    };
    let scheme = &iri[..colon];
    if scheme.is_empty()
        || !scheme.starts_with(|c: char| c.is_ascii_alphabetic())
        || !scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
    {
        return Err(bad("not absolute (invalid scheme)"));
    }
    if let Some(c) = iri
        .chars()
        .find(|&c| c.is_whitespace() || c.is_control() || "<>\"{}|^`\\".contains(c))
    {
        return Err(bad(&format!("illegal character {c:?}")));
    }
    Ok(())
}

/// Subject, predicate, object. Subject and predicate are always IRIs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, StoreError> {
        if !subject.is_iri() {
            return Err(StoreError::LiteralPosition("subject"));
        }
        if !predicate.is_iri() {
            return Err(StoreError::LiteralPosition("predicate"));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_validation() {
        assert!(Term::iri("http://purl.example/expert-pivot#title").is_ok());
        assert!(Term::iri("file:///tmp/tao/uid70.html").is_ok());
        assert!(Term::iri("urn:x").is_ok());
        assert!(Term::iri("x").is_err());
        assert!(Term::iri(":x").is_err());
        assert!(Term::iri("1http://a").is_err());
        assert!(Term::iri("http://a b").is_err());
        assert!(Term::iri("http://a/<b>").is_err());
        assert!(Term::iri("http://a/é").is_ok());
    }

    #[test]
    fn literal_escaping() {
        let t = Term::literal("say \"hi\"\\\n\t\u{1}é");
        assert_eq!(t.to_string(), r#""say \"hi\"\\\n\t\u0001é""#);
    }

    #[test]
    fn literal_positions_rejected() {
        let iri = Term::iri("http://e.org/a").unwrap();
        assert!(Triple::new(Term::literal("x"), iri.clone(), iri.clone()).is_err());
        assert!(Triple::new(iri.clone(), Term::literal("x"), iri.clone()).is_err());
        assert!(Triple::new(iri.clone(), iri.clone(), Term::literal("x")).is_ok());
    }
}
