//! Wikitext to plain text.
//!
//! Enough of the markup is understood to recover running prose: templates,
//! references, comments and file/category links are removed, links keep
//! their visible surface, emphasis quotes go away and headings keep their
//! text. Tables and parser functions are not rendered.

/// Link namespaces whose links carry no prose.
const DROPPED_LINK_NAMESPACES: &[&str] = &["file", "image", "media", "category"];

/// Passes are repeated until the output stops changing, so that markup
/// exposed by an earlier removal is handled too. The bound guards against
/// pathological inputs.
const MAX_PASSES: usize = 8;

/// Convert article wikitext to plain text. Never fails; unbalanced `{{` or
/// `[[` openers are removed together with the rest of their line.
pub fn strip_wikitext(wikitext: &str) -> String {
    let mut current = single_pass(wikitext);
    for _ in 1..MAX_PASSES {
        let next = single_pass(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn single_pass(src: &str) -> String {
    let text = remove_comments(src);
    let text = remove_refs(&text);
    let text = remove_nested(&text, "{{", "}}");
    let text = replace_links(&text);
    let text = replace_external_links(&text);
    let text = strip_inline_tags(&text);
    let text = rewrite_lines(&text);
    let text = remove_emphasis(&text);
    if text.contains('&') {
        html_escape::decode_html_entities(&text).into_owned()
    } else {
        text
    }
}

fn remove_comments(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut rest = src;
    while let Some(start) = rest.find("<!--") {
        out.push_str(&rest[..start]);
        match rest[start + 4..].find("-->") {
            Some(end) => rest = &rest[start + 4 + end + 3..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}

/// Remove `<ref>...</ref>` and `<ref ... />`. An unclosed `<ref>` is removed
/// up to the end of its line.
fn remove_refs(src: &str) -> String {
    let lower = src.to_ascii_lowercase();
    let mut out = String::with_capacity(src.len());
    let mut pos = 0;
    while let Some(rel) = lower[pos..].find("<ref") {
        let start = pos + rel;
        let after_name = lower.as_bytes().get(start + 4).copied();
        if !matches!(after_name, Some(b'>') | Some(b'/') | Some(b' ') | Some(b'\t') | Some(b'\n')) {
            out.push_str(&src[pos..start + 4]);
            pos = start + 4;
            continue;
        }
        out.push_str(&src[pos..start]);
        let Some(tag_end) = lower[start..].find('>').map(|e| start + e) else {
            pos = line_end(src, start);
            continue;
        };
        if lower[start..tag_end].ends_with('/') {
            pos = tag_end + 1;
            continue;
        }
        pos = match lower[tag_end..].find("</ref") {
            Some(close) => {
                let close = tag_end + close;
                lower[close..].find('>').map_or(src.len(), |e| close + e + 1)
            }
            None => line_end(src, start),
        };
    }
    out.push_str(&src[pos..]);
    out
}

fn line_end(src: &str, from: usize) -> usize {
    src[from..].find('\n').map_or(src.len(), |e| from + e)
}

/// Offset just past the `close` matching the `open` at `start`, honouring nesting.
fn matching_close(src: &str, start: usize, open: &str, close: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut i = start;
    while i < src.len() {
        if src[i..].starts_with(open) {
            depth += 1;
            i += open.len();
        } else if src[i..].starts_with(close) {
            depth -= 1;
            i += close.len();
            if depth == 0 {
                return Some(i);
            }
        } else {
            i += src[i..].chars().next().map_or(1, char::len_utf8);
        }
    }
    None
}

/// Remove every balanced `open ... close` span. Stray closers are dropped.
fn remove_nested(src: &str, open: &str, close: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut pos = 0;
    loop {
        let next_open = src[pos..].find(open).map(|i| pos + i);
        let next_close = src[pos..].find(close).map(|i| pos + i);
        match (next_open, next_close) {
            (Some(o), c) if c.is_none_or(|c| o < c) => {
                out.push_str(&src[pos..o]);
                pos = matching_close(src, o, open, close).unwrap_or_else(|| line_end(src, o));
            }
            (_, Some(c)) => {
                out.push_str(&src[pos..c]);
                pos = c + close.len();
            }
            (None, None) => break,
            (Some(_), None) => unreachable!(),
        }
    }
    out.push_str(&src[pos..]);
    out
}

/// `[[A|B]]` becomes `B`, `[[A]]` becomes `A`; file, image and category links
/// are dropped, and link captions are processed recursively.
fn replace_links(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut pos = 0;
    loop {
        let next_open = src[pos..].find("[[").map(|i| pos + i);
        let next_close = src[pos..].find("]]").map(|i| pos + i);
        match (next_open, next_close) {
            (Some(o), c) if c.is_none_or(|c| o < c) => {
                out.push_str(&src[pos..o]);
                match matching_close(src, o, "[[", "]]") {
                    Some(end) => {
                        out.push_str(&link_surface(&src[o + 2..end - 2]));
                        pos = end;
                    }
                    None => pos = line_end(src, o),
                }
            }
            (_, Some(c)) => {
                out.push_str(&src[pos..c]);
                pos = c + 2;
            }
            (None, None) => break,
            (Some(_), None) => unreachable!(),
        }
    }
    out.push_str(&src[pos..]);
    out
}

fn link_surface(inner: &str) -> String {
    let (target, label) = match inner.find('|') {
        Some(bar) => (&inner[..bar], Some(&inner[bar + 1..])),
        None => (inner, None),
    };
    let target = target.trim();
    if let Some((namespace, _)) = target.split_once(':') {
        let namespace = namespace.trim().to_ascii_lowercase();
        if DROPPED_LINK_NAMESPACES.contains(&namespace.as_str()) {
            return String::new();
        }
    }
    match label {
        Some(label) if !label.trim().is_empty() => replace_links(label),
        _ => target.trim_start_matches(':').to_string(),
    }
}

/// `[http://x label]` becomes `label`; a bare `[http://x]` disappears.
fn replace_external_links(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut rest = src;
    while let Some(start) = rest.find('[') {
        let after = &rest[start + 1..];
        let is_url = ["http://", "https://", "ftp://", "//"]
            .iter()
            .any(|scheme| after.starts_with(scheme));
        let close = after.find(']');
        match (is_url, close) {
            (true, Some(close)) if !after[..close].contains('\n') => {
                out.push_str(&rest[..start]);
                let body = &after[..close];
                if let Some(space) = body.find(' ') {
                    out.push_str(body[space + 1..].trim());
                }
                rest = &after[close + 1..];
            }
            _ => {
                out.push_str(&rest[..start + 1]);
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Remove HTML-like tags, keeping their content.
fn strip_inline_tags(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut rest = src;
    while let Some(start) = rest.find('<') {
        let after = &rest[start + 1..];
        let looks_like_tag = after
            .trim_start_matches('/')
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic());
        match after.find('>') {
            Some(end) if looks_like_tag && !after[..end].contains(['<', '\n']) => {
                out.push_str(&rest[..start]);
                rest = &after[end + 1..];
            }
            _ => {
                out.push_str(&rest[..start + 1]);
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Line-level markup: headings, list markers, table syntax, magic words.
fn rewrite_lines(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    for (i, line) in src.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let trimmed = line.trim();
        if let Some(heading) = heading_text(trimmed) {
            out.push_str(heading);
            out.push('\n');
            continue;
        }
        if trimmed.starts_with("{|") || trimmed.starts_with("|}") || trimmed.starts_with("|-") {
            continue;
        }
        let body = line.trim_start_matches(['*', '#', ':', ';', '|', '!']);
        let body = if body.len() != line.len() { body.trim_start() } else { body };
        out.push_str(&strip_magic_words(body));
    }
    out
}

fn heading_text(line: &str) -> Option<&str> {
    let level = line.bytes().take_while(|&b| b == b'=').count();
    if level == 0 || line.len() < 2 * level + 1 {
        return None;
    }
    let trailing = line.bytes().rev().take_while(|&b| b == b'=').count();
    if trailing < level {
        return None;
    }
    let text = line[level..line.len() - level].trim_matches('=').trim();
    (!text.is_empty()).then_some(text)
}

fn strip_magic_words(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut rest = line;
    while let Some(start) = rest.find("__") {
        let after = &rest[start + 2..];
        match after.find("__") {
            Some(end) if end > 0 && after[..end].bytes().all(|b| b.is_ascii_uppercase()) => {
                out.push_str(&rest[..start]);
                rest = &after[end + 2..];
            }
            _ => {
                out.push_str(&rest[..start + 2]);
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Runs of two or more apostrophes are bold/italic markers.
fn remove_emphasis(src: &str) -> String {
    let mut out = String::with_capacity(src.len());
    let mut run = 0usize;
    for c in src.chars() {
        if c == '\'' {
            run += 1;
            continue;
        }
        if run == 1 {
            out.push('\'');
        }
        run = 0;
        out.push(c);
    }
    if run == 1 {
        out.push('\'');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn link_surfaces() {
        assert_eq!(
            strip_wikitext("[[Gaussian process|Gaussian processes]] are used"),
            "Gaussian processes are used"
        );
        assert_eq!(strip_wikitext("see [[Kriging]]."), "see Kriging.");
        assert_eq!(strip_wikitext("[[bus]]es"), "buses");
    }

    #[test]
    fn templates_removed() {
        assert_eq!(
            strip_wikitext("{{Infobox software}}Machine learning is"),
            "Machine learning is"
        );
        assert_eq!(
            strip_wikitext("a {{outer|{{inner|x}}|y}} b"),
            "a  b"
        );
    }

    #[test]
    fn emphasis_removed() {
        assert_eq!(strip_wikitext("''supervised'' learning"), "supervised learning");
        assert_eq!(strip_wikitext("'''''both''''' and Bayes' rule"), "both and Bayes' rule");
    }

    #[test]
    fn refs_removed() {
        assert_eq!(
            strip_wikitext("Kriging<ref name=\"a\">{{cite|x}} Smith</ref> works<ref name=b/>."),
            "Kriging works."
        );
    }

    #[test]
    fn headings_keep_text() {
        assert_eq!(strip_wikitext("== History ==\nText"), "History\n\nText");
        assert_eq!(strip_wikitext("=== See also ==="), "See also\n");
    }

    #[test]
    fn file_and_category_links_dropped() {
        assert_eq!(
            strip_wikitext("[[File:X.png|thumb|A [[neural network]]]]Body [[Category:AI]]"),
            "Body "
        );
    }

    #[test]
    fn external_links() {
        assert_eq!(strip_wikitext("[https://inria.fr Inria site] and [http://x.y]"), "Inria site and ");
    }

    #[test]
    fn unbalanced_braces_remove_to_line_end() {
        assert_eq!(
            strip_wikitext("before {{broken template\nnext line"),
            "before \nnext line"
        );
        assert_eq!(strip_wikitext("stray }} closer"), "stray  closer");
        assert_eq!(strip_wikitext("open [[link\nrest"), "open \nrest");
    }

    #[test]
    fn list_and_comment() {
        assert_eq!(strip_wikitext("* item <!-- hidden -->one\n# two"), "item one\ntwo");
    }

    fn wikitext_fragment() -> impl Strategy<Value = String> {
        "[a-z]{1,6}( [a-z]{1,6}){0,2}".prop_recursive(3, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| format!("[[{t}]]")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("[[{a}|{b}]]")),
                inner.clone().prop_map(|t| format!("{{{{{t}}}}}")),
                inner.clone().prop_map(|t| format!("''{t}''")),
                inner.clone().prop_map(|t| format!("== {t} ==\n")),
                inner.clone().prop_map(|t| format!("{t}<ref>{t}</ref>")),
                prop::collection::vec(inner, 1..4).prop_map(|v| v.join(" ")),
                Just("{{".to_string()),
                Just("]]".to_string()),
                Just("'".to_string()),
            ]
        })
    }

    proptest! {
        #[test]
        fn idempotent_on_own_output(text in wikitext_fragment()) {
            let once = strip_wikitext(&text);
            prop_assert_eq!(strip_wikitext(&once), once);
        }
    }
}
