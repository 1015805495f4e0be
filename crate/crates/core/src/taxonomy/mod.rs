//! Taxonomy concepts loaded from SKOS, and the phrase lexicon compiled from
//! their labels.

mod lexicon;
mod skos;

pub use lexicon::{build_lexicon, LexiconOptions, PhraseLexicon};
pub use skos::{parse_skos, parse_skos_file, SkosOptions};

use std::collections::{BTreeMap, BTreeSet};

use crate::textproc::tokenize;

/// Normalize a taxonomy label into tokens. Identical to
/// [`tokenize`](crate::textproc::tokenize) so that labels and document text
/// always agree.
pub fn normalize_label(label: &str) -> Vec<String> {
    tokenize(label)
}

/// One taxonomy node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub id: String,
    pub pref_label: String,
    pub alt_labels: BTreeSet<String>,
    /// IRIs of the parent concepts.
    pub broader: BTreeSet<String>,
}

impl Concept {
    /// The preferred label followed by the alternate labels.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.pref_label.as_str()).chain(self.alt_labels.iter().map(String::as_str))
    }
}

/// A validated set of concepts: ids are unique, every broader edge resolves
/// and the broader relation is acyclic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    concepts: BTreeMap<String, Concept>,
    source_uri: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaxonomyStats {
    pub concepts: usize,
    pub labels: usize,
    pub broader_edges: usize,
}

impl Taxonomy {
    /// Build from already parsed concepts, checking every invariant.
    /// Dangling broader edges are an error unless `lenient`, in which case
    /// they are logged and dropped.
    pub fn from_concepts(
        concepts: impl IntoIterator<Item = Concept>,
        source_uri: impl Into<String>,
        lenient: bool,
    ) -> Result<Self, TaxonomyError> {
        let mut map = BTreeMap::new();
        for concept in concepts {
            if concept.pref_label.trim().is_empty() {
                return Err(TaxonomyError::MissingPrefLabel(concept.id));
            }
            let id = concept.id.clone();
            if map.insert(id.clone(), concept).is_some() {
                return Err(TaxonomyError::DuplicateConcept(id));
            }
        }

        let dangling: Vec<(String, String)> = map
            .values()
            .flat_map(|c| {
                c.broader
                    .iter()
                    .filter(|b| !map.contains_key(*b))
                    .map(|b| (c.id.clone(), b.clone()))
            })
            .collect();
        if !dangling.is_empty() {
            if !lenient {
                return Err(TaxonomyError::DanglingBroader(dangling));
            }
            for (child, parent) in &dangling {
                log::warn!("dropping broader edge {child} -> {parent}: target is not a concept");
                if let Some(c) = map.get_mut(child) {
                    c.broader.remove(parent);
                }
            }
        }

        let taxonomy = Taxonomy {
            concepts: map,
            source_uri: source_uri.into(),
        };
        if let Some(cycle) = taxonomy.find_cycle() {
            return Err(TaxonomyError::BroaderCycle(cycle));
        }
        Ok(taxonomy)
    }

    pub fn empty(source_uri: impl Into<String>) -> Self {
        Taxonomy {
            concepts: BTreeMap::new(),
            source_uri: source_uri.into(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.concepts.contains_key(id)
    }

    /// Concepts in IRI order.
    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn source_uri(&self) -> &str {
        &self.source_uri
    }

    pub fn stats(&self) -> TaxonomyStats {
        TaxonomyStats {
            concepts: self.concepts.len(),
            labels: self.concepts.values().map(|c| 1 + c.alt_labels.len()).sum(),
            broader_edges: self.concepts.values().map(|c| c.broader.len()).sum(),
        }
    }

    /// Concept ids ordered so that every concept comes after all of its
    /// broader concepts (Kahn's algorithm, ties broken by IRI). `None` if
    /// the broader relation has a cycle.
    pub fn topological_order(&self) -> Option<Vec<&str>> {
        let mut pending: BTreeMap<&str, usize> = self
            .concepts
            .values()
            .map(|c| (c.id.as_str(), c.broader.len()))
            .collect();
        let mut narrower: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for c in self.concepts.values() {
            for b in &c.broader {
                narrower.entry(b.as_str()).or_default().push(c.id.as_str());
            }
        }
        let mut ready: BTreeSet<&str> = pending
            .iter()
            .filter(|(_, &n)| n == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut order = Vec::with_capacity(self.concepts.len());
        while let Some(id) = ready.pop_first() {
            order.push(id);
            for &child in narrower.get(id).into_iter().flatten() {
                let count = pending.get_mut(child).expect("child is a concept");
                *count -= 1;
                if *count == 0 {
                    ready.insert(child);
                }
            }
        }
        (order.len() == self.concepts.len()).then_some(order)
    }

    fn find_cycle(&self) -> Option<Vec<String>> {
        if self.topological_order().is_some() {
            return None;
        }
        // walk broader edges from a concept left over by the sort until one repeats
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        fn visit<'a>(
            taxonomy: &'a Taxonomy,
            id: &'a str,
            marks: &mut BTreeMap<&'a str, Mark>,
            path: &mut Vec<&'a str>,
        ) -> Option<Vec<String>> {
            match marks.get(id) {
                Some(Mark::Done) => return None,
                Some(Mark::Active) => {
                    let start = path.iter().position(|p| *p == id).unwrap_or(0);
                    let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                    cycle.push(id.to_string());
                    return Some(cycle);
                }
                None => {}
            }
            marks.insert(id, Mark::Active);
            path.push(id);
            for parent in &taxonomy.concepts[id].broader {
                if let Some(cycle) = visit(taxonomy, parent, marks, path) {
                    return Some(cycle);
                }
            }
            path.pop();
            marks.insert(id, Mark::Done);
            None
        }

        let mut marks = BTreeMap::new();
        for id in self.concepts.keys() {
            let mut path = Vec::new();
            if let Some(cycle) = visit(self, id, &mut marks, &mut path) {
                return Some(cycle);
            }
        }
        None
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TaxonomyError {
    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("cannot resolve IRI {iri:?} against base {base:?}")]
    BadIri { iri: String, base: String },
    #[error("duplicate concept {0}")]
    DuplicateConcept(String),
    #[error("concept {0} has no non-empty prefLabel")]
    MissingPrefLabel(String),
    #[error("{} dangling broader edge(s): {}", .0.len(), format_edges(.0))]
    DanglingBroader(Vec<(String, String)>),
    #[error("broader cycle: {}", .0.join(" -> "))]
    BroaderCycle(Vec<String>),
    #[error("no skos:Concept elements found")]
    Empty,
    #[error("cannot read taxonomy: {0}")]
    Io(#[from] std::io::Error),
}

fn format_edges(edges: &[(String, String)]) -> String {
    const SHOWN: usize = 10;
    let mut listed: Vec<String> = edges
        .iter()
        .take(SHOWN)
        .map(|(c, b)| format!("{c} -> {b}"))
        .collect();
    if edges.len() > SHOWN {
        listed.push(format!("... and {} more", edges.len() - SHOWN));
    }
    listed.join(", ")
}
