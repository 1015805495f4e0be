//! RDF triples, N-Triples persistence, an indexed in-memory dataset and a
//! SPARQL SELECT subset over it.

mod dataset;
mod eval;
mod graph;
mod ntriples;
mod sparql;
mod term;

pub use dataset::{AccessPath, Dataset};
pub use eval::{evaluate, evaluate_with_order, QueryResults};
pub use graph::{build_graph, experts_query, Vocabulary, DEFAULT_BASE, SKOS_PREF_LABEL};
pub use ntriples::{parse_ntriples, serialize_ntriples};
pub use sparql::{parse_sparql, PatternTerm, Query, SparqlError, TriplePattern};
pub use term::{escape_literal, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("invalid IRI {iri:?}: {reason}")]
    InvalidIri { iri: String, reason: String },
    #[error("literal in {0} position")]
    LiteralPosition(&'static str),
    #[error("N-Triples line {line}: {message}")]
    NTriples { line: usize, message: String },
    #[error("duplicate document {0}")]
    DuplicateDocument(String),
    #[error("annotation cites unknown document {0}")]
    UnknownDocument(String),
    #[error("document {doc_id} is cited as {cited} but is {actual}")]
    SourceMismatch {
        doc_id: String,
        cited: &'static str,
        actual: &'static str,
    },
    #[error("document {doc_id} cites unknown concept {concept}")]
    UnknownConcept { doc_id: String, concept: String },
}
