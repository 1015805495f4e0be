use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use expert_pivot::ingest::{
    read_expert_docs, read_wiki_dump, Document, DocumentMeta, ExpertDocOptions, Source, WikiDumpOptions,
};
use expert_pivot::matcher::{Annotation, Matcher};
use expert_pivot::store::{build_graph, serialize_ntriples, Vocabulary};
use expert_pivot::taxonomy::{build_lexicon, parse_skos_file, LexiconOptions, SkosOptions};
use rayon::prelude::*;

const BATCH: usize = 256;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub taxonomy: PathBuf,
    pub wiki_dump: PathBuf,
    pub experts: PathBuf,
    pub output: PathBuf,
    pub min_tokens: usize,
    pub stoplist: Option<PathBuf>,
    pub alt_labels: bool,
    pub lenient: bool,
    pub base_iri: String,
    pub wiki_url_base: String,
    pub expert_url_base: Option<String>,
    pub team_component: usize,
    pub keep_untagged: bool,
    pub progress_every: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSummary {
    pub pages_tagged: usize,
    pub expert_docs_tagged: usize,
    pub concepts_used: usize,
    pub wiki_pages: usize,
    pub expert_docs: usize,
    pub triples: usize,
}

impl IndexSummary {
    pub fn line(&self) -> String {
        format!(
            "pages tagged: {}, expert docs tagged: {}, concepts used: {}",
            self.pages_tagged, self.expert_docs_tagged, self.concepts_used
        )
    }

    pub fn json(&self, output: &Path) -> serde_json::Value {
        serde_json::json!({
            "pages_tagged": self.pages_tagged,
            "expert_docs_tagged": self.expert_docs_tagged,
            "concepts_used": self.concepts_used,
            "wiki_pages": self.wiki_pages,
            "expert_docs": self.expert_docs,
            "triples": self.triples,
            "output": output.display().to_string(),
        })
    }
}

fn read_stoplist(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read stoplist {}", path.display()))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect())
}

/// Documents of one corpus with their annotations, tagged ones first in
/// reading order.
struct Annotated {
    documents: Vec<DocumentMeta>,
    annotations: Vec<Annotation>,
    read: usize,
    tagged: usize,
}

fn annotate_stream<I>(docs: I, matcher: &Matcher, config: &PipelineConfig, source: Source, progress: &mut dyn Write) -> Result<Annotated>
where
    I: Iterator<Item = Result<Document>>,
{
    let mut out = Annotated {
        documents: Vec::new(),
        annotations: Vec::new(),
        read: 0,
        tagged: 0,
    };
    let mut batch = Vec::with_capacity(BATCH);
    let mut docs = docs.peekable();
    while docs.peek().is_some() {
        batch.clear();
        for doc in docs.by_ref().take(BATCH) {
            batch.push(doc?);
        }
        let results: Vec<Vec<Annotation>> = batch
            .par_iter()
            .map(|doc| matcher.annotate(&doc.meta.doc_id, &doc.clean))
            .collect();
        for (doc, annotations) in batch.drain(..).zip(results) {
            out.read += 1;
            if config.progress_every > 0 && out.read.is_multiple_of(config.progress_every) {
                writeln!(progress, "{source}: {} documents annotated", out.read)?;
            }
            if !annotations.is_empty() {
                out.tagged += 1;
            } else if !config.keep_untagged {
                continue;
            }
            out.documents.push(doc.meta);
            out.annotations.extend(annotations);
        }
    }
    writeln!(progress, "{source}: {} documents read, {} tagged", out.read, out.tagged)?;
    Ok(out)
}

/// taxonomy → lexicon → ingest → annotate → graph → N-Triples file.
pub fn run_index(config: &PipelineConfig, progress: &mut dyn Write) -> Result<IndexSummary> {
    let vocab = Vocabulary::new(config.base_iri.as_str()).context("invalid base IRI")?;
    let taxonomy = parse_skos_file(&config.taxonomy, &SkosOptions { lenient: config.lenient })
        .with_context(|| format!("taxonomy {}", config.taxonomy.display()))?;
    let mut lexicon_options = LexiconOptions {
        min_tokens: config.min_tokens,
        include_alt_labels: config.alt_labels,
        ..LexiconOptions::default()
    };
    if let Some(path) = &config.stoplist {
        lexicon_options = lexicon_options.with_stoplist(read_stoplist(path)?);
    }
    let lexicon = build_lexicon(&taxonomy, &lexicon_options);
    let matcher = Matcher::compile(&lexicon);
    writeln!(
        progress,
        "taxonomy: {} concepts, {} phrases",
        taxonomy.len(),
        matcher.pattern_count()
    )?;

    let wiki_options = WikiDumpOptions {
        url_base: config.wiki_url_base.clone(),
    };
    let dump = read_wiki_dump(&config.wiki_dump, wiki_options)?;
    let wiki = annotate_stream(
        dump.map(|d| d.with_context(|| format!("wiki dump {}", config.wiki_dump.display()))),
        &matcher,
        config,
        Source::Wikipedia,
        progress,
    )?;

    let expert_options = ExpertDocOptions {
        team_component: config.team_component,
        url_base: config.expert_url_base.clone(),
    };
    let reports = read_expert_docs(&config.experts, expert_options)?;
    let experts = annotate_stream(reports.map(Ok), &matcher, config, Source::Expert, progress)?;

    let concepts_used = wiki
        .annotations
        .iter()
        .chain(&experts.annotations)
        .map(|a| a.concept_id.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    let documents: Vec<DocumentMeta> = wiki.documents.into_iter().chain(experts.documents).collect();
    let dataset = build_graph(&wiki.annotations, &experts.annotations, &documents, &taxonomy, &vocab)?;

    let text = serialize_ntriples(&dataset);
    let partial = config.output.with_extension("nt.partial");
    fs::write(&partial, text).with_context(|| format!("cannot write {}", partial.display()))?;
    fs::rename(&partial, &config.output).with_context(|| format!("cannot write {}", config.output.display()))?;

    Ok(IndexSummary {
        pages_tagged: wiki.tagged,
        expert_docs_tagged: experts.tagged,
        concepts_used,
        wiki_pages: wiki.read,
        expert_docs: experts.read,
        triples: dataset.len(),
    })
}
