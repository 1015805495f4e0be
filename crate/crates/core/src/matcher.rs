//! Token-level multi-phrase matching.
//!
//! The lexicon is compiled into an Aho-Corasick automaton whose alphabet is
//! the set of tokens occurring in lexicon phrases. Tokens outside that
//! vocabulary send the automaton back to its root. Matching is token-aligned,
//! so "learning" never matches inside "unlearning".
//!
//! Match selection is leftmost-longest and non-overlapping within each
//! sentence: the earliest starting match wins, ties go to the longest, and
//! scanning resumes at its end.

use std::collections::HashMap;

use crate::taxonomy::PhraseLexicon;
use crate::textproc::CleanText;

const ROOT: u32 = 0;

/// Evidence that a document sentence contains a concept label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Annotation {
    pub doc_id: String,
    pub concept_id: String,
    /// Matched tokens joined by single spaces.
    pub phrase: String,
    pub sentence_index: usize,
    /// Half-open token range `[start, end)` within the sentence.
    pub start: usize,
    pub end: usize,
}

/// One selected phrase occurrence inside a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhraseMatch {
    pub pattern: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
struct Pattern {
    phrase: String,
    concepts: Vec<String>,
}

#[derive(Debug, Clone, Default)]
struct State {
    next: HashMap<u32, u32>,
    fail: u32,
    /// Number of tokens on the path from the root.
    depth: u32,
    /// Pattern ending exactly at this state.
    output: Option<u32>,
    /// Nearest proper suffix state that ends a pattern.
    dict_suffix: Option<u32>,
}

/// Compiled, immutable phrase matcher. Safe to share between threads.
#[derive(Debug, Clone)]
pub struct Matcher {
    vocabulary: HashMap<String, u32>,
    states: Vec<State>,
    patterns: Vec<Pattern>,
}

impl Matcher {
    /// Compile a lexicon. Construction is deterministic: patterns are added
    /// in lexicon order.
    pub fn compile(lexicon: &PhraseLexicon) -> Self {
        let mut matcher = Matcher {
            vocabulary: HashMap::new(),
            states: vec![State::default()],
            patterns: Vec::with_capacity(lexicon.len()),
        };
        for (phrase, concepts) in lexicon.iter() {
            let pattern_id = matcher.patterns.len() as u32;
            let mut state = ROOT;
            for token in phrase {
                let next_symbol = matcher.vocabulary.len() as u32;
                let symbol = *matcher.vocabulary.entry(token.clone()).or_insert(next_symbol);
                state = match matcher.states[state as usize].next.get(&symbol) {
                    Some(&s) => s,
                    None => {
                        let s = matcher.states.len() as u32;
                        let depth = matcher.states[state as usize].depth + 1;
                        matcher.states.push(State {
                            depth,
                            ..State::default()
                        });
                        matcher.states[state as usize].next.insert(symbol, s);
                        s
                    }
                };
            }
            matcher.states[state as usize].output = Some(pattern_id);
            matcher.patterns.push(Pattern {
                phrase: phrase.join(" "),
                concepts: concepts.iter().cloned().collect(),
            });
        }
        matcher.link_failures();
        matcher
    }

    /// Breadth-first computation of failure and dictionary-suffix links.
    fn link_failures(&mut self) {
        let mut queue = std::collections::VecDeque::new();
        let mut root_children: Vec<(u32, u32)> = self.states[ROOT as usize].next.iter().map(|(&k, &v)| (k, v)).collect();
        root_children.sort_unstable();
        for (_, child) in root_children {
            self.states[child as usize].fail = ROOT;
            queue.push_back(child);
        }
        while let Some(state) = queue.pop_front() {
            let mut edges: Vec<(u32, u32)> = self.states[state as usize].next.iter().map(|(&k, &v)| (k, v)).collect();
            edges.sort_unstable();
            for (symbol, child) in edges {
                let mut fallback = self.states[state as usize].fail;
                let fail = loop {
                    if let Some(&target) = self.states[fallback as usize].next.get(&symbol) {
                        break target;
                    }
                    if fallback == ROOT {
                        break ROOT;
                    }
                    fallback = self.states[fallback as usize].fail;
                };
                let fail_state = &self.states[fail as usize];
                let dict_suffix = if fail_state.output.is_some() {
                    Some(fail)
                } else {
                    fail_state.dict_suffix
                };
                let child_state = &mut self.states[child as usize];
                child_state.fail = fail;
                child_state.dict_suffix = dict_suffix;
                queue.push_back(child);
            }
        }
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    /// The normalized phrase of a pattern.
    pub fn phrase(&self, pattern: usize) -> &str {
        &self.patterns[pattern].phrase
    }

    /// Concepts labelled by a pattern, in IRI order.
    pub fn concepts(&self, pattern: usize) -> &[String] {
        &self.patterns[pattern].concepts
    }

    fn step(&self, mut state: u32, symbol: Option<u32>) -> u32 {
        let Some(symbol) = symbol else {
            return ROOT;
        };
        loop {
            if let Some(&next) = self.states[state as usize].next.get(&symbol) {
                return next;
            }
            if state == ROOT {
                return ROOT;
            }
            state = self.states[state as usize].fail;
        }
    }

    /// Leftmost-longest non-overlapping matches in one token sequence.
    pub fn find_matches<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<PhraseMatch> {
        if self.patterns.is_empty() || tokens.is_empty() {
            return Vec::new();
        }
        // longest[start] = (length, pattern) of the longest match starting there
        let mut longest: Vec<Option<(usize, u32)>> = vec![None; tokens.len()];
        let mut state = ROOT;
        for (i, token) in tokens.iter().enumerate() {
            state = self.step(state, self.vocabulary.get(token.as_ref()).copied());
            let mut cursor = if self.states[state as usize].output.is_some() {
                Some(state)
            } else {
                self.states[state as usize].dict_suffix
            };
            while let Some(s) = cursor {
                let found = &self.states[s as usize];
                let len = found.depth as usize;
                let start = i + 1 - len;
                let pattern = found.output.expect("dictionary links point at output states");
                if longest[start].is_none_or(|(best, _)| len > best) {
                    longest[start] = Some((len, pattern));
                }
                cursor = found.dict_suffix;
            }
        }

        let mut matches = Vec::new();
        let mut pos = 0;
        while pos < tokens.len() {
            match longest[pos] {
                Some((len, pattern)) => {
                    matches.push(PhraseMatch {
                        pattern: pattern as usize,
                        start: pos,
                        end: pos + len,
                    });
                    pos += len;
                }
                None => pos += 1,
            }
        }
        matches
    }

    /// Annotate a document. Each sentence is matched independently; every
    /// match yields one annotation per concept of its phrase. Output is
    /// ordered by sentence, then start, then concept IRI.
    pub fn annotate(&self, doc_id: &str, text: &CleanText) -> Vec<Annotation> {
        let mut out = Vec::new();
        for (sentence_index, sentence) in text.sentences().iter().enumerate() {
            for m in self.find_matches(sentence) {
                let pattern = &self.patterns[m.pattern];
                for concept in &pattern.concepts {
                    out.push(Annotation {
                        doc_id: doc_id.to_string(),
                        concept_id: concept.clone(),
                        phrase: pattern.phrase.clone(),
                        sentence_index,
                        start: m.start,
                        end: m.end,
                    });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon(entries: &[(&str, &[&str])]) -> PhraseLexicon {
        entries
            .iter()
            .flat_map(|(phrase, concepts)| {
                concepts
                    .iter()
                    .map(move |c| (phrase.split(' ').map(String::from).collect::<Vec<_>>(), c.to_string()))
            })
            .collect()
    }

    fn text(sentences: &[&str]) -> CleanText {
        CleanText::from_sentences(sentences.iter().map(|s| s.split(' ')))
    }

    #[test]
    fn empty_lexicon_matches_nothing() {
        let m = Matcher::compile(&PhraseLexicon::default());
        assert!(m.annotate("d", &text(&["supervised learning"])).is_empty());
    }

    #[test]
    fn supervised_learning_span() {
        let m = Matcher::compile(&lexicon(&[("supervised learning", &["c:sl"])]));
        let anns = m.annotate("wp:Artificial intelligence", &text(&["supervised learning improves"]));
        assert_eq!(
            anns,
            vec![Annotation {
                doc_id: "wp:Artificial intelligence".into(),
                concept_id: "c:sl".into(),
                phrase: "supervised learning".into(),
                sentence_index: 0,
                start: 0,
                end: 2,
            }]
        );
        // exactly the two-token sequence, not its parts
        assert!(m.annotate("d", &text(&["supervised"])).is_empty());
        assert!(m.annotate("d", &text(&["learning supervised"])).is_empty());
    }

    #[test]
    fn leftmost_wins_over_overlap() {
        // all matches: [machine learning]@0..2, [learning theory]@1..3; leftmost-longest keeps only the first
        let m = Matcher::compile(&lexicon(&[("machine learning", &["c:ml"]), ("learning theory", &["c:lt"])]));
        let matches = m.find_matches(&["machine", "learning", "theory"]);
        assert_eq!(matches.len(), 1);
        assert_eq!(m.phrase(matches[0].pattern), "machine learning");
        assert_eq!((matches[0].start, matches[0].end), (0, 2));
    }

    #[test]
    fn longest_at_same_start() {
        let m = Matcher::compile(&lexicon(&[
            ("neural", &["c:n"]),
            ("neural networks", &["c:nn"]),
            ("networks", &["c:net"]),
        ]));
        let matches = m.find_matches(&["deep", "neural", "networks", "and", "networks"]);
        let spans: Vec<_> = matches.iter().map(|x| (m.phrase(x.pattern), x.start, x.end)).collect();
        assert_eq!(spans, vec![("neural networks", 1, 3), ("networks", 4, 5)]);
    }

    #[test]
    fn shared_phrase_yields_one_annotation_per_concept() {
        let m = Matcher::compile(&lexicon(&[("networks", &["c:b", "c:a"])]));
        let anns = m.annotate("d", &text(&["networks networks"]));
        let ids: Vec<_> = anns.iter().map(|a| (a.concept_id.as_str(), a.start)).collect();
        assert_eq!(ids, vec![("c:a", 0), ("c:b", 0), ("c:a", 1), ("c:b", 1)]);
    }

    #[test]
    fn no_match_across_sentences() {
        let m = Matcher::compile(&lexicon(&[("supervised learning", &["c:sl"])]));
        assert!(m.annotate("d", &text(&["we study supervised", "learning is fun"])).is_empty());
    }

    #[test]
    fn failure_links_recover_suffix_matches() {
        // "a b c" fails at d, then "b c d" must still be found via the failure link
        let m = Matcher::compile(&lexicon(&[("a b c e", &["x"]), ("b c d", &["y"])]));
        let matches = m.find_matches(&["a", "b", "c", "d"]);
        assert_eq!(matches.len(), 1);
        assert_eq!((matches[0].start, matches[0].end), (1, 4));
    }

    #[test]
    fn unknown_tokens_reset() {
        let m = Matcher::compile(&lexicon(&[("gaussian processes", &["c:gp"])]));
        assert!(m.find_matches(&["gaussian", "random", "processes"]).is_empty());
        assert_eq!(m.find_matches(&["gaussian", "gaussian", "processes"]).len(), 1);
    }
}
