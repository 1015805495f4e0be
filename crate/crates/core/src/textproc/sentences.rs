/// Split text into sentences.
///
/// A sentence ends after `.`, `!` or `?` when followed by whitespace, and at
/// every blank line (two newlines separated only by whitespace). Segments are
/// trimmed and empty ones dropped. There is no abbreviation list, so
/// "Dr. Smith" splits after "Dr.".
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();

    while let Some((i, c)) = chars.next() {
        let boundary = match c {
            '.' | '!' | '?' => match chars.peek() {
                Some(&(_, next)) if next.is_whitespace() => Some(i + c.len_utf8()),
                _ => None,
            },
            '\n' if next_line_blank(&text[i + 1..]) => Some(i),
            _ => None,
        };
        if let Some(end) = boundary {
            push_trimmed(&mut out, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

/// True if `rest` contains a newline before any non-whitespace character.
fn next_line_blank(rest: &str) -> bool {
    for c in rest.chars() {
        if c == '\n' {
            return true;
        }
        if !c.is_whitespace() {
            return false;
        }
    }
    false
}

fn push_trimmed(out: &mut Vec<String>, segment: &str) {
    let segment = segment.trim();
    if !segment.is_empty() {
        out.push(segment.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn terminators() {
        assert_eq!(
            split_sentences("Machine learning is fun. It works."),
            vec!["Machine learning is fun.", "It works."]
        );
        assert_eq!(split_sentences("no terminator"), vec!["no terminator"]);
        assert_eq!(
            split_sentences("Dr. Smith studies AI."),
            vec!["Dr.", "Smith studies AI."]
        );
    }

    #[test]
    fn blank_lines_split() {
        assert_eq!(
            split_sentences("Heading\n\nBody text\n  \n\nMore"),
            vec!["Heading", "Body text", "More"]
        );
        assert_eq!(split_sentences("one\nline"), vec!["one\nline"]);
    }

    #[test]
    fn no_split_inside_numbers_or_urls() {
        assert_eq!(split_sentences("Version 2.0 is out"), vec!["Version 2.0 is out"]);
        assert_eq!(split_sentences("What? Yes! Ok"), vec!["What?", "Yes!", "Ok"]);
    }

    #[test]
    fn empty_input() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences(" \n\n \t").is_empty());
    }

    proptest! {
        #[test]
        fn never_empty_and_alnum_preserved(text in "[a-zA-Z0-9 .!?\n\té-]{0,120}") {
            let sentences = split_sentences(&text);
            prop_assert!(sentences.iter().all(|s| !s.trim().is_empty()));
            let joined: String = sentences.concat();
            let alnum = |s: &str| s.chars().filter(|c| c.is_alphanumeric()).collect::<String>();
            prop_assert_eq!(alnum(&joined), alnum(&text));
        }
    }
}
