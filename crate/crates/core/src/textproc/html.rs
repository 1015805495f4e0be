//! Tolerant HTML to visible-text extraction.
//!
//! This is a single-pass scanner, not a DOM builder. It never fails: anything
//! that does not look like a tag is kept as text.

/// Elements whose raw content is never text.
const RAW_TEXT: &[&str] = &["script", "style"];

/// Elements dropped together with their subtree.
const DROP_SUBTREE: &[&str] = &[
    "nav", "header", "footer", "aside", "head", "noscript", "template", "select", "button",
];

/// `id` / `class` words marking page furniture.
const BOILERPLATE_WORDS: &[&str] = &[
    "menu",
    "menubar",
    "nav",
    "navbar",
    "navigation",
    "footer",
    "sidebar",
    "breadcrumb",
    "breadcrumbs",
    "banner",
    "topbar",
    "toolbar",
    "skiplinks",
];

const BLOCK: &[&str] = &[
    "address", "article", "blockquote", "body", "br", "caption", "dd", "div", "dl", "dt",
    "fieldset", "figcaption", "figure", "form", "h1", "h2", "h3", "h4", "h5", "h6", "hr",
    "html", "li", "main", "ol", "p", "pre", "section", "table", "tbody", "td", "th", "thead",
    "tr", "ul",
];

const VOID: &[&str] = &[
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param",
    "source", "track", "wbr",
];

#[derive(Debug)]
struct Tag<'a> {
    name: String,
    closing: bool,
    self_closing: bool,
    attrs: &'a str,
}

/// Extract the visible text of an HTML page.
///
/// Script and style contents are dropped, as are the subtrees of `nav`,
/// `header`, `footer`, `aside` (plus `head` and a few non-content elements)
/// and of any element whose `id` or `class` names page furniture such as a
/// menu or sidebar. Tags are removed, entities decoded, and block-level
/// element boundaries become blank lines. Input without markup is returned
/// unchanged apart from surrounding whitespace.
pub fn strip_boilerplate(html: &[u8]) -> String {
    let src = String::from_utf8_lossy(html);
    let src = src.as_ref();
    let bytes = src.as_bytes();

    let mut out = String::with_capacity(src.len() / 2);
    let mut text_start = 0;
    let mut pos = 0;
    // (element name, nesting depth) of the subtree currently being dropped
    let mut skipping: Option<(String, usize)> = None;

    while pos < bytes.len() {
        if bytes[pos] != b'<' {
            pos += 1;
            continue;
        }
        if src[pos..].starts_with("<!--") {
            flush_text(&mut out, &src[text_start..pos], skipping.is_some());
            pos = find_from(src, pos + 4, "-->").map_or(bytes.len(), |e| e + 3);
            text_start = pos;
            continue;
        }
        if matches!(bytes.get(pos + 1), Some(b'!') | Some(b'?')) {
            flush_text(&mut out, &src[text_start..pos], skipping.is_some());
            pos = find_from(src, pos + 2, ">").map_or(bytes.len(), |e| e + 1);
            text_start = pos;
            continue;
        }
        let Some((tag, end)) = parse_tag(src, pos) else {
            pos += 1;
            continue;
        };
        flush_text(&mut out, &src[text_start..pos], skipping.is_some());
        pos = end;
        text_start = end;

        if let Some((name, depth)) = skipping.as_mut() {
            if tag.name == *name && !tag.self_closing {
                if tag.closing {
                    *depth -= 1;
                    if *depth == 0 {
                        skipping = None;
                        push_break(&mut out);
                    }
                } else if !VOID.contains(&tag.name.as_str()) {
                    *depth += 1;
                }
            }
            continue;
        }

        if tag.closing {
            if BLOCK.contains(&tag.name.as_str()) {
                push_break(&mut out);
            }
            continue;
        }

        if RAW_TEXT.contains(&tag.name.as_str()) && !tag.self_closing {
            pos = skip_raw_text(src, end, &tag.name);
            text_start = pos;
            continue;
        }

        let void = tag.self_closing || VOID.contains(&tag.name.as_str());
        if !void && (DROP_SUBTREE.contains(&tag.name.as_str()) || is_boilerplate(tag.attrs)) {
            skipping = Some((tag.name, 1));
            continue;
        }
        if BLOCK.contains(&tag.name.as_str()) {
            push_break(&mut out);
        }
    }
    flush_text(&mut out, &src[text_start..], skipping.is_some());
    out.trim().to_string()
}

/// Text of the first `<title>` element, entity-decoded and whitespace-collapsed.
pub fn extract_html_title(html: &[u8]) -> Option<String> {
    let src = String::from_utf8_lossy(html);
    let lower = src.to_ascii_lowercase();
    let open = lower.find("<title")?;
    let content_start = open + lower[open..].find('>')? + 1;
    let content_end = content_start + lower[content_start..].find("</title")?;
    let raw = html_escape::decode_html_entities(&src[content_start..content_end]);
    let title = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    (!title.is_empty()).then_some(title)
}

fn flush_text(out: &mut String, text: &str, skipping: bool) {
    if skipping || text.is_empty() {
        return;
    }
    if text.contains('&') {
        out.push_str(&html_escape::decode_html_entities(text));
    } else {
        out.push_str(text);
    }
}

fn push_break(out: &mut String) {
    let trimmed_len = out.trim_end_matches([' ', '\t', '\r']).len();
    out.truncate(trimmed_len);
    if !out.is_empty() && !out.ends_with("\n\n") {
        if out.ends_with('\n') {
            out.push('\n');
        } else {
            out.push_str("\n\n");
        }
    }
}

fn find_from(src: &str, from: usize, needle: &str) -> Option<usize> {
    src.get(from..)?.find(needle).map(|i| i + from)
}

/// Parse a start or end tag at `pos` (which holds `<`). Returns the tag and
/// the offset just past its closing `>`.
fn parse_tag(src: &str, pos: usize) -> Option<(Tag<'_>, usize)> {
    let bytes = src.as_bytes();
    let mut i = pos + 1;
    let closing = bytes.get(i) == Some(&b'/');
    if closing {
        i += 1;
    }
    let name_start = i;
    if !bytes.get(i)?.is_ascii_alphabetic() {
        return None;
    }
    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'-' || bytes[i] == b':') {
        i += 1;
    }
    let name = src[name_start..i].to_ascii_lowercase();
    let attrs_start = i;

    let mut quote: Option<u8> = None;
    while i < bytes.len() {
        let b = bytes[i];
        match quote {
            Some(q) if b == q => quote = None,
            Some(_) => {}
            None if b == b'"' || b == b'\'' => quote = Some(b),
            None if b == b'>' => {
                let attrs = &src[attrs_start..i];
                let self_closing = attrs.trim_end().ends_with('/');
                return Some((
                    Tag {
                        name,
                        closing,
                        self_closing,
                        attrs,
                    },
                    i + 1,
                ));
            }
            None if b == b'<' => return None,
            None => {}
        }
        i += 1;
    }
    None
}

/// Offset just past `</name ...>`, or end of input if the element never closes.
fn skip_raw_text(src: &str, from: usize, name: &str) -> usize {
    let closing = format!("</{name}");
    let lower = src[from..].to_ascii_lowercase();
    match lower.find(&closing) {
        Some(rel) => {
            let tag_start = from + rel;
            find_from(src, tag_start, ">").map_or(src.len(), |e| e + 1)
        }
        None => src.len(),
    }
}

fn is_boilerplate(attrs: &str) -> bool {
    ["id", "class", "role"].iter().any(|attr| {
        attribute_value(attrs, attr).is_some_and(|value| {
            value
                .split(|c: char| !c.is_ascii_alphanumeric())
                .any(|word| BOILERPLATE_WORDS.contains(&word.to_ascii_lowercase().as_str()))
        })
    })
}

fn attribute_value<'a>(attrs: &'a str, wanted: &str) -> Option<&'a str> {
    let bytes = attrs.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'/') {
            i += 1;
        }
        let name_start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'=' && bytes[i] != b'/' {
            i += 1;
        }
        let name = &attrs[name_start..i];
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if bytes.get(i) != Some(&b'=') {
            if name.is_empty() {
                i += 1;
            }
            continue;
        }
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let value = match bytes.get(i) {
            Some(&q) if q == b'"' || q == b'\'' => {
                let start = i + 1;
                let end = attrs[start..].find(q as char).map_or(attrs.len(), |e| e + start);
                i = end + 1;
                &attrs[start..end]
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                &attrs[start..i]
            }
        };
        if name.eq_ignore_ascii_case(wanted) {
            return Some(value);
        }
    }
    None
}
