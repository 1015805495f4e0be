//! SKOS RDF/XML reader.
//!
//! Only the element vocabulary needed for a classification is read:
//! `skos:Concept` (with `rdf:about` or `rdf:ID`), `skos:prefLabel`,
//! `skos:altLabel` and `skos:broader` (with `rdf:resource`). Everything else
//! is skipped. Relative IRIs are resolved against the root `xml:base`, or
//! against the document's own URI when there is none.

use std::collections::BTreeSet;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::name::{Namespace, ResolveResult};
use quick_xml::NsReader;
use url::Url;

use super::{Concept, Taxonomy, TaxonomyError};

const SKOS_NS: &[u8] = b"http://www.w3.org/2004/02/skos/core#";
const RDF_NS: &[u8] = b"http://www.w3.org/1999/02/22-rdf-syntax-ns#";

#[derive(Debug, Clone, Copy, Default)]
pub struct SkosOptions {
    /// Log and drop dangling broader edges (and label-less concepts)
    /// instead of failing.
    pub lenient: bool,
}

#[derive(Debug)]
enum LabelKind {
    Pref { rank: u8 },
    Alt,
}

#[derive(Debug)]
struct OpenLabel {
    kind: LabelKind,
    depth: usize,
    text: String,
}

#[derive(Debug)]
struct PartialConcept {
    id: String,
    depth: usize,
    pref: Option<(u8, String)>,
    alt: BTreeSet<String>,
    broader: BTreeSet<String>,
}

impl PartialConcept {
    fn new(id: String, depth: usize) -> Self {
        PartialConcept {
            id,
            depth,
            pref: None,
            alt: BTreeSet::new(),
            broader: BTreeSet::new(),
        }
    }
}

/// Read a SKOS file from disk. Its `file:` URL is the base for relative IRIs.
pub fn parse_skos_file(path: &Path, options: &SkosOptions) -> Result<Taxonomy, TaxonomyError> {
    let bytes = std::fs::read(path)?;
    let absolute = std::fs::canonicalize(path)?;
    let source_uri = Url::from_file_path(&absolute)
        .map(String::from)
        .unwrap_or_else(|_| absolute.display().to_string());
    parse_skos(&bytes, &source_uri, options)
}

/// Parse a SKOS RDF/XML document into a validated [`Taxonomy`].
pub fn parse_skos(bytes: &[u8], source_uri: &str, options: &SkosOptions) -> Result<Taxonomy, TaxonomyError> {
    let mut reader = NsReader::from_reader(bytes);
    let mut buf = Vec::new();

    let mut base = source_uri.to_string();
    let mut seen_root = false;
    let mut depth = 0usize;
    let mut open: Vec<PartialConcept> = Vec::new();
    let mut label: Option<OpenLabel> = None;
    let mut finished: Vec<Concept> = Vec::new();

    loop {
        let event = reader.read_resolved_event_into(&mut buf);
        let (in_skos, event) = match event {
            Ok((ns, event)) => (is_ns(&ns, SKOS_NS), event),
            Err(e) => {
                return Err(TaxonomyError::Xml {
                    offset: reader.error_position(),
                    message: e.to_string(),
                })
            }
        };
        let xml_err = |e: &dyn std::fmt::Display, reader: &NsReader<&[u8]>| TaxonomyError::Xml {
            offset: reader.buffer_position(),
            message: e.to_string(),
        };

        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                depth += 1;
                if !seen_root {
                    seen_root = true;
                    if let Some(xml_base) = raw_attribute(e, b"xml:base").map_err(|m| xml_err(&m, &reader))? {
                        base = resolve(&xml_base, source_uri)?;
                    }
                }
                let local = e.local_name();
                let local = local.as_ref();

                if in_skos && local == b"Concept" {
                    let id = concept_id(&reader, e, &base).map_err(|m| xml_err(&m, &reader))?;
                    let Some(id) = id else {
                        return Err(xml_err(&"skos:Concept without rdf:about or rdf:ID", &reader));
                    };
                    let id = resolve(&id, &base)?;
                    let partial = PartialConcept::new(id, depth);
                    if is_empty {
                        finish(partial, options, &mut finished)?;
                    } else {
                        open.push(partial);
                    }
                } else if let (true, Some(current)) = (in_skos, open.last_mut()) {
                    match local {
                        b"prefLabel" | b"altLabel" if !is_empty => {
                            let kind = if local == b"prefLabel" {
                                let lang = raw_attribute(e, b"xml:lang").map_err(|m| xml_err(&m, &reader))?;
                                LabelKind::Pref { rank: lang_rank(lang.as_deref()) }
                            } else {
                                LabelKind::Alt
                            };
                            label = Some(OpenLabel {
                                kind,
                                depth,
                                text: String::new(),
                            });
                        }
                        b"broader" => {
                            if let Some(target) = rdf_attribute(&reader, e, b"resource").map_err(|m| xml_err(&m, &reader))? {
                                current.broader.insert(resolve(&target, &base)?);
                            }
                        }
                        _ => {}
                    }
                }
                if is_empty {
                    depth -= 1;
                }
            }
            Event::Text(ref t) => {
                if let Some(label) = label.as_mut() {
                    let text = t.unescape().map_err(|e| xml_err(&e, &reader))?;
                    label.text.push_str(&text);
                }
            }
            Event::CData(ref t) => {
                if let Some(label) = label.as_mut() {
                    label.text.push_str(&String::from_utf8_lossy(t));
                }
            }
            Event::End(_) => {
                if label.as_ref().is_some_and(|l| l.depth == depth) {
                    let done = label.take().expect("checked above");
                    if let Some(current) = open.last_mut() {
                        let text = done.text.trim().to_string();
                        match done.kind {
                            LabelKind::Pref { rank } if !text.is_empty() => {
                                if current.pref.as_ref().is_none_or(|(best, _)| rank < *best) {
                                    current.pref = Some((rank, text));
                                }
                            }
                            LabelKind::Alt if !text.is_empty() => {
                                current.alt.insert(text);
                            }
                            _ => {}
                        }
                    }
                }
                if let Some(partial) = open.pop_if(|c| c.depth == depth) {
                    finish(partial, options, &mut finished)?;
                }
                depth = depth.saturating_sub(1);
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if finished.is_empty() {
        return Err(TaxonomyError::Empty);
    }
    Taxonomy::from_concepts(finished, source_uri, options.lenient)
}

fn finish(partial: PartialConcept, options: &SkosOptions, out: &mut Vec<Concept>) -> Result<(), TaxonomyError> {
    let Some((_, pref_label)) = partial.pref else {
        if options.lenient {
            log::warn!("skipping concept {} without prefLabel", partial.id);
            return Ok(());
        }
        return Err(TaxonomyError::MissingPrefLabel(partial.id));
    };
    let mut alt_labels = partial.alt;
    alt_labels.remove(&pref_label);
    out.push(Concept {
        id: partial.id,
        pref_label,
        alt_labels,
        broader: partial.broader,
    });
    Ok(())
}

/// English labels first, then untagged ones, then anything else.
fn lang_rank(lang: Option<&str>) -> u8 {
    match lang {
        Some(l) if l.eq_ignore_ascii_case("en") || l.to_ascii_lowercase().starts_with("en-") => 0,
        None | Some("") => 1,
        Some(_) => 2,
    }
}

fn is_ns(ns: &ResolveResult, wanted: &[u8]) -> bool {
    matches!(ns, ResolveResult::Bound(Namespace(n)) if *n == wanted)
}

fn raw_attribute(e: &BytesStart, key: &[u8]) -> Result<Option<String>, String> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| err.to_string())?;
        if attr.key.as_ref() == key {
            let value = attr.unescape_value().map_err(|err| err.to_string())?;
            return Ok(Some(value.into_owned()));
        }
    }
    Ok(None)
}

fn rdf_attribute(reader: &NsReader<&[u8]>, e: &BytesStart, local: &[u8]) -> Result<Option<String>, String> {
    for attr in e.attributes() {
        let attr = attr.map_err(|err| err.to_string())?;
        let (ns, name) = reader.resolve_attribute(attr.key);
        if is_ns(&ns, RDF_NS) && name.as_ref() == local {
            let value = attr.unescape_value().map_err(|err| err.to_string())?;
            return Ok(Some(value.into_owned()));
        }
    }
    Ok(None)
}

fn concept_id(reader: &NsReader<&[u8]>, e: &BytesStart, base: &str) -> Result<Option<String>, String> {
    if let Some(about) = rdf_attribute(reader, e, b"about")? {
        return Ok(Some(about));
    }
    let base_without_fragment = base.split('#').next().unwrap_or(base);
    Ok(rdf_attribute(reader, e, b"ID")?.map(|id| format!("{base_without_fragment}#{id}")))
}

/// Keep absolute IRIs verbatim; resolve relative references against `base`.
fn resolve(iri: &str, base: &str) -> Result<String, TaxonomyError> {
    let iri = iri.trim();
    if has_scheme(iri) {
        return Ok(iri.to_string());
    }
    Url::parse(base)
        .and_then(|b| b.join(iri))
        .map(String::from)
        .map_err(|_| TaxonomyError::BadIri {
            iri: iri.to_string(),
            base: base.to_string(),
        })
}

fn has_scheme(iri: &str) -> bool {
    match iri.find(':') {
        Some(colon) if colon > 0 => {
            let scheme = &iri[..colon];
            scheme.starts_with(|c: char| c.is_ascii_alphabetic())
                && scheme.chars().all(|c| c.is_ascii_alphanumeric() || "+-.".contains(c))
        }
        _ => false,
    }
}
