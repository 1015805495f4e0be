//! Streaming reader for MediaWiki `pages-articles` XML dumps.
//!
//! Only one page is held in memory at a time. `.gz` and `.bz2` files are
//! decompressed on the fly (multi-stream archives included).

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use bzip2::read::MultiBzDecoder;
use flate2::read::MultiGzDecoder;
use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};
use quick_xml::events::Event;
use quick_xml::Reader;

use super::{Document, DocumentMeta, IngestError, IngestStats, Source};
use crate::textproc::{strip_wikitext, CleanText};

pub const DEFAULT_WIKI_BASE: &str = "https://en.wikipedia.org/wiki/";

/// Characters escaped in article URLs. Slashes, colons and parentheses
/// stay literal, as on the live site.
const TITLE_ESCAPES: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'<')
    .add(b'>')
    .add(b'?')
    .add(b'[')
    .add(b'\\')
    .add(b']')
    .add(b'^')
    .add(b'`')
    .add(b'{')
    .add(b'|')
    .add(b'}');

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WikiDumpOptions {
    /// Prefix for article URLs; the underscore-encoded title is appended.
    pub url_base: String,
}

impl Default for WikiDumpOptions {
    fn default() -> Self {
        WikiDumpOptions {
            url_base: DEFAULT_WIKI_BASE.to_string(),
        }
    }
}

/// Open a dump file, picking a decompressor from the extension.
pub fn read_wiki_dump(
    path: &Path,
    options: WikiDumpOptions,
) -> Result<WikiDumpReader<Box<dyn BufRead + Send>>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader: Box<dyn BufRead + Send> = match path.extension().and_then(|e| e.to_str()) {
        Some("gz") => Box::new(BufReader::new(MultiGzDecoder::new(file))),
        Some("bz2") => Box::new(BufReader::new(MultiBzDecoder::new(file))),
        _ => Box::new(BufReader::new(file)),
    };
    Ok(WikiDumpReader::new(reader, options))
}

/// Iterator over the article pages of a dump: namespace 0, not redirects.
/// Ends after the first error.
pub struct WikiDumpReader<R: BufRead> {
    reader: Reader<R>,
    buf: Vec<u8>,
    options: WikiDumpOptions,
    stats: IngestStats,
    finished: bool,
}

#[derive(Default)]
struct RawPage {
    title: String,
    ns: String,
    text: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Other,
    Title,
    Ns,
    Text,
}

impl<R: BufRead> WikiDumpReader<R> {
    pub fn new(input: R, options: WikiDumpOptions) -> Self {
        WikiDumpReader {
            reader: Reader::from_reader(input),
            buf: Vec::new(),
            options,
            stats: IngestStats::default(),
            finished: false,
        }
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    fn xml_error(&self, message: impl ToString) -> IngestError {
        IngestError::Xml {
            pages: self.stats.seen,
            offset: self.reader.buffer_position(),
            message: message.to_string(),
        }
    }

    fn next_page(&mut self) -> Result<Option<RawPage>, IngestError> {
        let mut page: Option<RawPage> = None;
        let mut in_revision = false;
        let mut field = Field::Other;
        loop {
            self.buf.clear();
            let event = match self.reader.read_event_into(&mut self.buf) {
                Ok(event) => event.into_owned(),
                Err(e) => return Err(self.xml_error(e)),
            };
            match event {
                Event::Start(e) => match (e.local_name().as_ref(), page.is_some()) {
                    (b"page", _) => {
                        page = Some(RawPage::default());
                        in_revision = false;
                    }
                    (b"revision", true) => in_revision = true,
                    (b"title", true) if !in_revision => field = Field::Title,
                    (b"ns", true) if !in_revision => field = Field::Ns,
                    (b"text", true) if in_revision => {
                        field = Field::Text;
                        if let Some(p) = page.as_mut() {
                            p.text.clear();
                        }
                    }
                    _ => field = Field::Other,
                },
                Event::Empty(e) if e.local_name().as_ref() == b"text" && in_revision => {
                    if let Some(p) = page.as_mut() {
                        p.text.clear();
                    }
                }
                Event::End(e) => match e.local_name().as_ref() {
                    b"page" => {
                        if let Some(p) = page.take() {
                            return Ok(Some(p));
                        }
                    }
                    b"revision" => {
                        in_revision = false;
                        field = Field::Other;
                    }
                    _ => field = Field::Other,
                },
                Event::Text(t) => {
                    if let Some(p) = page.as_mut() {
                        let target = match field {
                            Field::Title => &mut p.title,
                            Field::Ns => &mut p.ns,
                            Field::Text => &mut p.text,
                            Field::Other => continue,
                        };
                        match t.unescape() {
                            Ok(s) => target.push_str(&s),
                            Err(e) => return Err(self.xml_error(e)),
                        }
                    }
                }
                Event::CData(c) => {
                    if let (Some(p), Field::Text) = (page.as_mut(), field) {
                        p.text.push_str(&String::from_utf8_lossy(&c));
                    }
                }
                Event::Eof => {
                    return match page {
                        Some(_) => Err(self.xml_error("unexpected end of file inside <page>")),
                        None => Ok(None),
                    };
                }
                _ => {}
            }
        }
    }

    fn to_document(&self, page: RawPage) -> Option<Document> {
        let title = page.title.trim();
        if page.ns.trim() != "0" || title.is_empty() || is_redirect(&page.text) {
            return None;
        }
        let clean = CleanText::from_plain_text(&strip_wikitext(&page.text));
        Some(Document {
            meta: DocumentMeta {
                doc_id: format!("wp:{title}"),
                source: Source::Wikipedia,
                title: title.to_string(),
                url: article_url(&self.options.url_base, title),
                team: None,
            },
            clean,
        })
    }
}

impl<R: BufRead> Iterator for WikiDumpReader<R> {
    type Item = Result<Document, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.finished {
            match self.next_page() {
                Ok(Some(page)) => {
                    self.stats.seen += 1;
                    match self.to_document(page) {
                        Some(doc) => {
                            self.stats.yielded += 1;
                            return Some(Ok(doc));
                        }
                        None => self.stats.skipped += 1,
                    }
                }
                Ok(None) => self.finished = true,
                Err(e) => {
                    self.finished = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}

fn is_redirect(text: &str) -> bool {
    let head = text.trim_start().as_bytes();
    head.len() >= 9 && head[..9].eq_ignore_ascii_case(b"#redirect")
}

/// `base` followed by the title with spaces as underscores, percent-encoded.
pub(crate) fn article_url(base: &str, title: &str) -> String {
    let underscored = title.replace(' ', "_");
    format!("{base}{}", utf8_percent_encode(&underscored, TITLE_ESCAPES))
}
