//! Expert finding through a pivot taxonomy.
//!
//! Wikipedia articles and expert report pages are annotated with concepts
//! from a SKOS taxonomy. The annotations become RDF links that can be joined
//! on the shared concept with a small SPARQL subset.

pub mod ingest;
pub mod matcher;
pub mod store;
pub mod taxonomy;
pub mod textproc;

pub use ingest::{Document, DocumentMeta, Source};
pub use matcher::{Annotation, Matcher};
pub use store::{Dataset, Query, Term, Triple};
pub use taxonomy::{Concept, PhraseLexicon, Taxonomy};
pub use textproc::CleanText;
