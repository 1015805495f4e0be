//! Reference implementations and random input generators shared by the
//! property tests and the acceptance suite.

#![allow(dead_code)]

use std::collections::BTreeSet;

use expert_pivot::matcher::{Annotation, Matcher};
use expert_pivot::store::{parse_sparql, Dataset, PatternTerm, Query, Term, Triple};
use expert_pivot::taxonomy::PhraseLexicon;
use expert_pivot::textproc::CleanText;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const WORDS: [&str; 20] = [
    "machine", "learning", "supervised", "gaussian", "processes", "theory", "networks", "real", "time",
    "systems", "deep", "neural", "graph", "search", "data", "mining", "logic", "security", "vision", "robotics",
];

// ---- matcher ----

/// A random lexicon of at most `max_phrases` phrases of 1 to 4 words.
pub fn random_lexicon(rng: &mut StdRng, max_phrases: usize) -> PhraseLexicon {
    let count = rng.gen_range(0..=max_phrases);
    let mut lexicon = PhraseLexicon::default();
    for _ in 0..count {
        let len = rng.gen_range(1..=4);
        let phrase: Vec<String> = (0..len).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
        lexicon.insert(phrase, format!("http://c.example/{}", rng.gen_range(0..12)));
    }
    lexicon
}

/// A random document of at most `max_tokens` tokens in random sentences.
pub fn random_document(rng: &mut StdRng, max_tokens: usize) -> CleanText {
    let total = rng.gen_range(0..=max_tokens);
    let mut sentences: Vec<Vec<&str>> = vec![Vec::new()];
    for _ in 0..total {
        if rng.gen_ratio(1, 15) {
            sentences.push(Vec::new());
        }
        sentences.last_mut().unwrap().push(WORDS.choose(rng).unwrap());
    }
    CleanText::from_sentences(sentences)
}

/// Plant a copy of every lexicon phrase, each in its own sentence.
pub fn planted_document(lexicon: &PhraseLexicon) -> CleanText {
    CleanText::from_sentences(lexicon.iter().map(|(phrase, _)| phrase.to_vec()))
}

/// Straightforward leftmost-longest scanner: at every position try every
/// phrase, keep the longest, jump past it.
pub fn naive_annotate(lexicon: &PhraseLexicon, doc_id: &str, text: &CleanText) -> Vec<Annotation> {
    let phrases: Vec<(&[String], &BTreeSet<String>)> = lexicon.iter().collect();
    let mut out = Vec::new();
    for (sentence_index, tokens) in text.sentences().iter().enumerate() {
        let mut i = 0;
        while i < tokens.len() {
            let mut best: Option<(&[String], &BTreeSet<String>)> = None;
            for &(phrase, concepts) in &phrases {
                let fits = i + phrase.len() <= tokens.len() && tokens[i..i + phrase.len()] == *phrase;
                if fits && best.is_none_or(|(b, _)| phrase.len() > b.len()) {
                    best = Some((phrase, concepts));
                }
            }
            match best {
                Some((phrase, concepts)) => {
                    for concept in concepts {
                        out.push(Annotation {
                            doc_id: doc_id.to_string(),
                            concept_id: concept.clone(),
                            phrase: phrase.join(" "),
                            sentence_index,
                            start: i,
                            end: i + phrase.len(),
                        });
                    }
                    i += phrase.len();
                }
                None => i += 1,
            }
        }
    }
    out
}

/// One randomized matcher case; returns the number of annotations. `Err`
/// describes the first disagreement.
pub fn matcher_case(rng: &mut StdRng) -> Result<usize, String> {
    let lexicon = random_lexicon(rng, 50);
    let doc = random_document(rng, 200);
    let matcher = Matcher::compile(&lexicon);
    let annotations = matcher.annotate("d", &doc);
    let fast = format!("{annotations:?}");
    let slow = format!("{:?}", naive_annotate(&lexicon, "d", &doc));
    if fast != slow {
        return Err(format!("lexicon {lexicon:?}\ndocument {doc:?}\nautomaton {fast}\nnaive {slow}"));
    }
    Ok(annotations.len())
}

// ---- store ----

fn iri(i: usize) -> Term {
    Term::iri(format!("http://e.org/n{i}")).unwrap()
}

fn predicate(i: usize) -> Term {
    Term::iri(format!("http://e.org/p{i}")).unwrap()
}

const SPARQL_LITERALS: [&str; 5] = ["kriging", "Gaussian processes", "say \"hi\"", "back\\slash", "tab\there"];

/// Random literal text including quotes, backslashes, newlines and other
/// control characters.
pub fn random_literal(rng: &mut StdRng) -> String {
    const PIECES: [&str; 12] = [
        "a", "Kriging", " ", "\"", "\\", "\n", "\r", "\t", "é", "\u{1}", "\u{7f}", "😀",
    ];
    let len = rng.gen_range(0..8);
    (0..len).map(|_| *PIECES.choose(rng).unwrap()).collect()
}

/// Dataset of up to `max_triples` triples over a small term pool, so that
/// joins hit often.
pub fn random_dataset(rng: &mut StdRng, max_triples: usize, wild_literals: bool) -> Dataset {
    let count = rng.gen_range(0..=max_triples);
    (0..count)
        .map(|_| {
            let object = if rng.gen_bool(0.6) {
                iri(rng.gen_range(0..8))
            } else if wild_literals {
                Term::literal(random_literal(rng))
            } else {
                Term::literal(*SPARQL_LITERALS.choose(rng).unwrap())
            };
            Triple::new(iri(rng.gen_range(0..8)), predicate(rng.gen_range(0..4)), object).unwrap()
        })
        .collect()
}

fn random_slot(rng: &mut StdRng, vars: &[&str], position: usize) -> String {
    if rng.gen_bool(0.55) {
        return format!("?{}", vars.choose(rng).unwrap());
    }
    match position {
        1 => format!("ex:p{}", rng.gen_range(0..5)),
        0 => format!("<http://e.org/n{}>", rng.gen_range(0..9)),
        _ if rng.gen_bool(0.7) => format!("ex:n{}", rng.gen_range(0..9)),
        _ => Term::literal(*SPARQL_LITERALS.choose(rng).unwrap()).to_string(),
    }
}

/// A random SELECT over at most 4 patterns and at most 3 variables, as
/// text. Most patterns are stored triples with some slots turned into
/// variables, so that a fair share of queries have answers.
pub fn random_query_text(rng: &mut StdRng, dataset: &Dataset) -> String {
    let all_vars = ["x", "y", "z"];
    let vars = &all_vars[..rng.gen_range(1..=3)];
    let stored: Vec<Triple> = dataset.iter().collect();
    let patterns: Vec<String> = (0..rng.gen_range(1..=4))
        .map(|_| match stored.choose(rng) {
            Some(t) if rng.gen_bool(0.7) => [t.subject(), t.predicate(), t.object()]
                .iter()
                .map(|term| match rng.gen_bool(0.5) {
                    true => format!("?{}", vars.choose(rng).unwrap()),
                    false => term.to_string(),
                })
                .collect::<Vec<_>>()
                .join(" "),
            _ => (0..3).map(|p| random_slot(rng, vars, p)).collect::<Vec<_>>().join(" "),
        })
        .collect();
    let body = patterns.join(" . ");
    let used: Vec<&str> = vars.iter().copied().filter(|v| body.contains(&format!("?{v}"))).collect();
    let projection = if used.is_empty() || rng.gen_bool(0.25) {
        "*".to_string()
    } else {
        let mut picked: Vec<&str> = used.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        if picked.is_empty() {
            picked.push(used[0]);
        }
        picked.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" ")
    };
    let distinct = if rng.gen_bool(0.5) { "DISTINCT " } else { "" };
    let mut text = format!("PREFIX ex: <http://e.org/>\nSELECT {distinct}{projection} WHERE {{ {body} }}");
    if rng.gen_bool(0.2) {
        text.push_str(&format!(" LIMIT {}", rng.gen_range(0..6)));
    }
    if rng.gen_bool(0.2) {
        text.push_str(&format!(" OFFSET {}", rng.gen_range(0..6)));
    }
    text
}

/// Try every assignment of pattern variables to candidate terms and keep
/// the ones under which every instantiated pattern is a stored triple.
pub fn brute_force(query: &Query, dataset: &Dataset) -> Vec<Vec<Term>> {
    let vars = query.pattern_variables();
    let pool: Vec<Term> = dataset.terms().to_vec();
    let mut rows = Vec::new();
    let mut assignment = vec![0usize; vars.len()];
    if vars.is_empty() || !pool.is_empty() {
        loop {
            let value = |slot: &PatternTerm| match slot {
                PatternTerm::Variable(v) => pool[assignment[vars.iter().position(|x| x == v).unwrap()]].clone(),
                PatternTerm::Term(t) => t.clone(),
            };
            let holds = query.patterns.iter().all(|p| {
                Triple::new(value(&p.subject), value(&p.predicate), value(&p.object)).is_ok_and(|t| dataset.contains(&t))
            });
            if holds {
                rows.push(
                    query
                        .variables
                        .iter()
                        .map(|v| pool[assignment[vars.iter().position(|x| x == v).unwrap()]].clone())
                        .collect::<Vec<Term>>(),
                );
            }
            // odometer increment
            let mut k = 0;
            while k < assignment.len() {
                assignment[k] += 1;
                if assignment[k] < pool.len() {
                    break;
                }
                assignment[k] = 0;
                k += 1;
            }
            if k == assignment.len() {
                break;
            }
        }
    }
    rows.sort();
    if query.distinct {
        rows.dedup();
    }
    rows.into_iter()
        .skip(query.offset.unwrap_or(0))
        .take(query.limit.unwrap_or(usize::MAX))
        .collect()
}

/// One randomized SPARQL case; returns the number of result rows. `Err`
/// describes the disagreement.
pub fn sparql_case(rng: &mut StdRng) -> Result<usize, String> {
    let dataset = random_dataset(rng, 200, false);
    let text = random_query_text(rng, &dataset);
    let query = parse_sparql(&text).map_err(|e| format!("{text}: {e}"))?;
    let expected = brute_force(&query, &dataset);
    let got = expert_pivot::store::evaluate(&query, &dataset).rows;
    if got != expected {
        return Err(format!("{text}\nevaluate {got:?}\nbrute force {expected:?}"));
    }
    Ok(got.len())
}

/// One randomized N-Triples round trip.
pub fn ntriples_case(rng: &mut StdRng) -> Result<(), String> {
    let dataset = random_dataset(rng, 60, true);
    let text = expert_pivot::store::serialize_ntriples(&dataset);
    let back = expert_pivot::store::parse_ntriples(&text).map_err(|e| format!("{e}\n{text}"))?;
    if back != dataset {
        return Err(format!("round trip changed the dataset:\n{text}"));
    }
    if expert_pivot::store::serialize_ntriples(&back) != text {
        return Err("re-serialization differs".into());
    }
    Ok(())
}
