use std::collections::{BTreeMap, BTreeSet};

use super::term::{escape_literal, validate_iri};
use super::{Dataset, StoreError, Term, Triple};
use crate::ingest::{DocumentMeta, Source};
use crate::matcher::Annotation;
use crate::taxonomy::Taxonomy;

pub const DEFAULT_BASE: &str = "http://purl.example/expert-pivot#";
pub const SKOS_PREF_LABEL: &str = "http://www.w3.org/2004/02/skos/core#prefLabel";

/// Predicate IRIs of the link graph, all under one base IRI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    base: String,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary {
            base: DEFAULT_BASE.to_string(),
        }
    }
}

impl Vocabulary {
    pub fn new(base: impl Into<String>) -> Result<Self, StoreError> {
        let base = base.into();
        validate_iri(&base)?;
        Ok(Vocabulary { base })
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    fn predicate(&self, local: &str) -> Term {
        Term::Iri(format!("{}{local}", self.base))
    }

    pub fn title(&self) -> Term {
        self.predicate("title")
    }

    pub fn source(&self) -> Term {
        self.predicate("source")
    }

    pub fn url(&self) -> Term {
        self.predicate("url")
    }

    pub fn team(&self) -> Term {
        self.predicate("team")
    }

    pub fn mentions_concept(&self) -> Term {
        self.predicate("mentionsConcept")
    }
}

/// Materialize documents and their concept annotations as triples.
///
/// A document's subject IRI is its URL. Each document gets title, source,
/// url and (for expert documents) team triples; each distinct
/// (document, concept) pair gets one `mentionsConcept` triple; each
/// referenced concept gets its `skos:prefLabel`.
pub fn build_graph(
    wiki_annotations: &[Annotation],
    expert_annotations: &[Annotation],
    documents: &[DocumentMeta],
    taxonomy: &Taxonomy,
    vocab: &Vocabulary,
) -> Result<Dataset, StoreError> {
    let mut subjects: BTreeMap<&str, (&DocumentMeta, Term)> = BTreeMap::new();
    let mut triples = Vec::new();
    for doc in documents {
        let subject = Term::iri(doc.url.as_str())?;
        if subjects.insert(&doc.doc_id, (doc, subject.clone())).is_some() {
            return Err(StoreError::DuplicateDocument(doc.doc_id.clone()));
        }
        let mut push = |p: Term, o: Term| triples.push(Triple::new(subject.clone(), p, o));
        push(vocab.title(), Term::literal(doc.title.as_str()));
        push(vocab.source(), Term::literal(doc.source.as_str()));
        push(vocab.url(), Term::literal(doc.url.as_str()));
        if let Some(team) = &doc.team {
            push(vocab.team(), Term::literal(team.as_str()));
        }
    }

    let mut links: BTreeSet<(&str, &str)> = BTreeSet::new();
    for (cited, annotations) in [(Source::Wikipedia, wiki_annotations), (Source::Expert, expert_annotations)] {
        for a in annotations {
            let (doc, _) = subjects
                .get(a.doc_id.as_str())
                .ok_or_else(|| StoreError::UnknownDocument(a.doc_id.clone()))?;
            if doc.source != cited {
                return Err(StoreError::SourceMismatch {
                    doc_id: a.doc_id.clone(),
                    cited: cited.as_str(),
                    actual: doc.source.as_str(),
                });
            }
            if !taxonomy.contains(&a.concept_id) {
                return Err(StoreError::UnknownConcept {
                    doc_id: a.doc_id.clone(),
                    concept: a.concept_id.clone(),
                });
            }
            links.insert((&a.doc_id, &a.concept_id));
        }
    }

    let mut concepts = BTreeSet::new();
    for (doc_id, concept) in links {
        let concept_term = Term::iri(concept)?;
        triples.push(Triple::new(subjects[doc_id].1.clone(), vocab.mentions_concept(), concept_term.clone()));
        if concepts.insert(concept) {
            let label = &taxonomy.get(concept).expect("checked above").pref_label;
            triples.push(Triple::new(concept_term, Term::Iri(SKOS_PREF_LABEL.into()), Term::literal(label.as_str())));
        }
    }
    triples.into_iter().collect()
}

/// The canonical experts query for one article title: every concept the
/// article mentions, with each expert document and team mentioning it.
pub fn experts_query(title: &str, vocab: &Vocabulary) -> String {
    format!(
        "PREFIX epl: <{base}>\n\
         PREFIX skos: <http://www.w3.org/2004/02/skos/core#>\n\
         SELECT DISTINCT ?concept ?label ?team ?doc WHERE {{\n  \
         ?page epl:title \"{title}\" . ?page epl:source \"wikipedia\" .\n  \
         ?page epl:mentionsConcept ?concept . ?concept skos:prefLabel ?label .\n  \
         ?doc epl:mentionsConcept ?concept . ?doc epl:source \"expert\" .\n  \
         ?doc epl:team ?team . }}\n",
        base = vocab.base(),
        title = escape_literal(title),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{evaluate, parse_sparql, PatternTerm};
    use crate::taxonomy::Concept;

    fn taxonomy(ids: &[(&str, &str)]) -> Taxonomy {
        Taxonomy::from_concepts(
            ids.iter().map(|(id, label)| Concept {
                id: id.to_string(),
                pref_label: label.to_string(),
                alt_labels: BTreeSet::new(),
                broader: BTreeSet::new(),
            }),
            "urn:test",
            false,
        )
        .unwrap()
    }

    fn wiki(title: &str) -> DocumentMeta {
        DocumentMeta {
            doc_id: format!("wp:{title}"),
            source: Source::Wikipedia,
            title: title.into(),
            url: format!("https://en.wikipedia.org/wiki/{title}"),
            team: None,
        }
    }

    fn expert(team: &str, file: &str) -> DocumentMeta {
        DocumentMeta {
            doc_id: format!("ex:{team}/{file}"),
            source: Source::Expert,
            title: file.into(),
            url: format!("file:///r/{team}/{file}"),
            team: Some(team.into()),
        }
    }

    fn ann(doc: &DocumentMeta, concept: &str, sentence: usize) -> Annotation {
        Annotation {
            doc_id: doc.doc_id.clone(),
            concept_id: concept.into(),
            phrase: "x".into(),
            sentence_index: sentence,
            start: 0,
            end: 1,
        }
    }

    const C: &str = "http://e.org/c";

    #[test]
    fn three_way_link_by_join() {
        let t = taxonomy(&[(C, "Gaussian processes")]);
        let w = wiki("Kriging");
        let e = expert("tao", "uid70.html");
        let d = build_graph(&[ann(&w, C, 0)], &[ann(&e, C, 2)], &[w.clone(), e.clone()], &t, &Vocabulary::default())
            .unwrap();
        let q = parse_sparql(&experts_query("Kriging", &Vocabulary::default())).unwrap();
        let r = evaluate(&q, &d);
        assert_eq!(
            r.rows,
            vec![vec![
                Term::iri(C).unwrap(),
                Term::literal("Gaussian processes"),
                Term::literal("tao"),
                Term::iri(e.url.as_str()).unwrap(),
            ]]
        );
    }

    #[test]
    fn no_shared_concept_no_rows_but_metadata() {
        let t = taxonomy(&[(C, "A"), ("http://e.org/d", "B")]);
        let w = wiki("Kriging");
        let e = expert("tao", "a.html");
        let d = build_graph(
            &[ann(&w, C, 0)],
            &[ann(&e, "http://e.org/d", 0)],
            &[w.clone(), e.clone()],
            &t,
            &Vocabulary::default(),
        )
        .unwrap();
        let q = parse_sparql(&experts_query("Kriging", &Vocabulary::default())).unwrap();
        assert!(evaluate(&q, &d).is_empty());
        let subject = Term::iri(e.url.as_str()).unwrap();
        assert_eq!(d.matching(Some(&subject), None, None).len(), 5);
    }

    #[test]
    fn repeated_mentions_one_link() {
        let t = taxonomy(&[(C, "A")]);
        let w = wiki("W");
        let anns: Vec<Annotation> = (0..5).map(|i| ann(&w, C, i)).collect();
        let d = build_graph(&anns, &[], std::slice::from_ref(&w), &t, &Vocabulary::default()).unwrap();
        let mentions = Vocabulary::default().mentions_concept();
        assert_eq!(d.matching(None, Some(&mentions), None).len(), 1);
        // 3 metadata + 1 link + 1 label
        assert_eq!(d.len(), 5);
    }

    #[test]
    fn unknown_references_rejected() {
        let t = taxonomy(&[(C, "A")]);
        let w = wiki("W");
        let e = expert("tao", "a.html");
        let v = Vocabulary::default();
        let err = build_graph(&[ann(&w, "http://e.org/zz", 0)], &[], std::slice::from_ref(&w), &t, &v).unwrap_err();
        assert!(matches!(err, StoreError::UnknownConcept { .. }));
        let err = build_graph(&[ann(&w, C, 0)], &[], &[], &t, &v).unwrap_err();
        assert_eq!(err, StoreError::UnknownDocument(w.doc_id.clone()));
        let err = build_graph(&[ann(&e, C, 0)], &[], std::slice::from_ref(&e), &t, &v).unwrap_err();
        assert!(matches!(err, StoreError::SourceMismatch { .. }));
        let err = build_graph(&[], &[], &[w.clone(), w.clone()], &t, &v).unwrap_err();
        assert_eq!(err, StoreError::DuplicateDocument(w.doc_id.clone()));
    }

    #[test]
    fn query_escapes_title() {
        let q = experts_query("A \"quoted\" \\ title", &Vocabulary::default());
        let parsed = parse_sparql(&q).unwrap();
        assert_eq!(parsed.patterns.len(), 7);
        assert_eq!(
            parsed.patterns[0].object,
            PatternTerm::Term(Term::literal("A \"quoted\" \\ title"))
        );
        assert!(parsed.distinct);
        assert_eq!(parsed.variables, ["concept", "label", "team", "doc"]);
    }

    #[test]
    fn custom_base() {
        assert!(Vocabulary::new("not an iri").is_err());
        let v = Vocabulary::new("http://x.org/v/").unwrap();
        assert_eq!(v.team(), Term::iri("http://x.org/v/team").unwrap());
    }
}
