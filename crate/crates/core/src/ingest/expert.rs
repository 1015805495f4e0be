//! Reader for a directory tree of expert report pages laid out as
//! `<root>/<team>/<file>.html`.

use std::path::{Component, Path, PathBuf};

use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};
use url::Url;
use walkdir::WalkDir;

use super::{Document, DocumentMeta, IngestError, IngestStats, Source};
use crate::textproc::{extract_html_title, strip_boilerplate, CleanText};

const EXTENSIONS: &[&str] = &["html", "htm", "xhtml"];

const SEGMENT_ESCAPES: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'<')
    .add(b'>')
    .add(b'?')
    .add(b'`')
    .add(b'{')
    .add(b'}');

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpertDocOptions {
    /// Index of the path component (relative to the root) naming the team.
    pub team_component: usize,
    /// When set, document URLs are this base followed by the relative path;
    /// otherwise they are `file://` URLs of the absolute path.
    pub url_base: Option<String>,
}

struct Candidate {
    path: PathBuf,
    relative: Vec<String>,
}

/// Iterator over readable report pages, in path order. Unreadable files are
/// skipped with a warning.
pub struct ExpertDocReader {
    candidates: std::vec::IntoIter<Candidate>,
    options: ExpertDocOptions,
    stats: IngestStats,
}

/// List the report pages under `root`. Fails if there are none.
pub fn read_expert_docs(root: &Path, options: ExpertDocOptions) -> Result<ExpertDocReader, IngestError> {
    if let Some(base) = &options.url_base {
        Url::parse(base).map_err(|e| IngestError::BadBase {
            base: base.clone(),
            message: e.to_string(),
        })?;
    }
    let root = root.canonicalize().map_err(|source| IngestError::Io {
        path: root.display().to_string(),
        source,
    })?;

    let mut stats = IngestStats::default();
    let mut candidates = Vec::new();
    for entry in WalkDir::new(&root).sort_by_file_name() {
        let entry = match entry {
            Ok(entry) => entry,
            Err(e) => {
                log::warn!("skipping unreadable entry: {e}");
                stats.seen += 1;
                stats.skipped += 1;
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        stats.seen += 1;
        let path = entry.into_path();
        let relative: Option<Vec<String>> = path
            .strip_prefix(&root)
            .expect("walkdir yields paths under the root")
            .components()
            .map(|c| match c {
                Component::Normal(s) => s.to_str().map(str::to_string),
                _ => None,
            })
            .collect();
        let is_page = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| EXTENSIONS.iter().any(|x| x.eq_ignore_ascii_case(e)));
        match relative {
            // the team component must be a directory above the file
            Some(relative) if is_page && relative.len() > options.team_component + 1 => {
                candidates.push(Candidate { path, relative });
            }
            _ => {
                log::debug!("not a report page: {}", path.display());
                stats.skipped += 1;
            }
        }
    }
    if candidates.is_empty() {
        return Err(IngestError::NoDocuments(root.display().to_string()));
    }
    Ok(ExpertDocReader {
        candidates: candidates.into_iter(),
        options,
        stats,
    })
}

impl ExpertDocReader {
    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    fn load(&self, candidate: &Candidate) -> std::io::Result<Document> {
        let bytes = std::fs::read(&candidate.path)?;
        let team = candidate.relative[self.options.team_component].clone();
        let within_team = candidate.relative[self.options.team_component + 1..].join("/");
        let url = match &self.options.url_base {
            Some(base) => {
                let encoded: Vec<String> = candidate
                    .relative
                    .iter()
                    .map(|s| utf8_percent_encode(s, SEGMENT_ESCAPES).to_string())
                    .collect();
                format!("{base}{}", encoded.join("/"))
            }
            None => Url::from_file_path(&candidate.path)
                .map(String::from)
                .unwrap_or_else(|()| format!("file://{}", candidate.path.display())),
        };
        let title = extract_html_title(&bytes).unwrap_or_else(|| {
            candidate
                .path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        Ok(Document {
            meta: DocumentMeta {
                doc_id: format!("ex:{team}/{within_team}"),
                source: Source::Expert,
                title,
                url,
                team: Some(team),
            },
            clean: CleanText::from_plain_text(&strip_boilerplate(&bytes)),
        })
    }
}

impl Iterator for ExpertDocReader {
    type Item = Document;

    fn next(&mut self) -> Option<Document> {
        while let Some(candidate) = self.candidates.next() {
            match self.load(&candidate) {
                Ok(doc) => {
                    self.stats.yielded += 1;
                    return Some(doc);
                }
                Err(e) => {
                    log::warn!("skipping {}: {e}", candidate.path.display());
                    self.stats.skipped += 1;
                }
            }
        }
        None
    }
}
