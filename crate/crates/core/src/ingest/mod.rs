//! Document sources: a MediaWiki XML dump and a directory of expert
//! activity-report pages.

mod expert;
mod wiki;

pub use expert::{read_expert_docs, ExpertDocOptions, ExpertDocReader};
pub use wiki::{read_wiki_dump, WikiDumpOptions, WikiDumpReader, DEFAULT_WIKI_BASE};

use std::fmt;

use crate::textproc::CleanText;

/// Which corpus a document belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Wikipedia,
    Expert,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Wikipedia => "wikipedia",
            Source::Expert => "expert",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything about a document except its text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DocumentMeta {
    pub doc_id: String,
    pub source: Source,
    pub title: String,
    pub url: String,
    /// Present exactly for expert documents.
    pub team: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub meta: DocumentMeta,
    pub clean: CleanText,
}

/// Reader counters. `yielded + skipped == seen` once a reader is exhausted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub seen: usize,
    pub yielded: usize,
    pub skipped: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed dump XML after {pages} page(s), at byte {offset}: {message}")]
    Xml { pages: usize, offset: u64, message: String },
    #[error("zero documents found under {0}")]
    NoDocuments(String),
    #[error("invalid URL base {base:?}: {message}")]
    BadBase { base: String, message: String },
}
