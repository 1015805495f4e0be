use std::collections::{BTreeMap, BTreeSet};

use super::{normalize_label, Taxonomy};

/// Which labels become lexicon phrases.
#[derive(Debug, Clone)]
pub struct LexiconOptions {
    /// Labels with fewer tokens are ignored. Values below 1 are treated as 1.
    pub min_tokens: usize,
    /// Phrases never used for matching, compared after normalization.
    pub stoplist: BTreeSet<Vec<String>>,
    pub include_alt_labels: bool,
}

impl Default for LexiconOptions {
    fn default() -> Self {
        LexiconOptions {
            min_tokens: 1,
            stoplist: BTreeSet::new(),
            include_alt_labels: true,
        }
    }
}

impl LexiconOptions {
    /// Add stoplist phrases given as raw text; they are normalized like labels.
    pub fn with_stoplist<I, S>(mut self, phrases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stoplist.extend(
            phrases
                .into_iter()
                .map(|p| normalize_label(p.as_ref()))
                .filter(|p| !p.is_empty()),
        );
        self
    }
}

/// Normalized label phrase to the concepts carrying it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhraseLexicon {
    entries: BTreeMap<Vec<String>, BTreeSet<String>>,
}

impl PhraseLexicon {
    pub fn lookup(&self, phrase: &[String]) -> Option<&BTreeSet<String>> {
        self.entries.get(phrase)
    }

    /// Entries in phrase order.
    pub fn iter(&self) -> impl Iterator<Item = (&[String], &BTreeSet<String>)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Insert one phrase for one concept. Empty phrases and empty tokens are ignored.
    pub fn insert(&mut self, phrase: Vec<String>, concept: impl Into<String>) {
        if phrase.is_empty() || phrase.iter().any(String::is_empty) {
            return;
        }
        self.entries.entry(phrase).or_default().insert(concept.into());
    }
}

impl<P, C> FromIterator<(P, C)> for PhraseLexicon
where
    P: IntoIterator,
    P::Item: Into<String>,
    C: Into<String>,
{
    fn from_iter<T: IntoIterator<Item = (P, C)>>(iter: T) -> Self {
        let mut lexicon = PhraseLexicon::default();
        for (phrase, concept) in iter {
            lexicon.insert(phrase.into_iter().map(Into::into).collect(), concept);
        }
        lexicon
    }
}

/// Compile the labels of `taxonomy` into a phrase lexicon. Identical
/// normalized labels of different concepts share one entry.
pub fn build_lexicon(taxonomy: &Taxonomy, options: &LexiconOptions) -> PhraseLexicon {
    let min_tokens = options.min_tokens.max(1);
    let mut lexicon = PhraseLexicon::default();
    for concept in taxonomy.concepts() {
        let labels: Box<dyn Iterator<Item = &str>> = if options.include_alt_labels {
            Box::new(concept.labels())
        } else {
            Box::new(std::iter::once(concept.pref_label.as_str()))
        };
        for label in labels {
            let phrase = normalize_label(label);
            if phrase.len() < min_tokens || options.stoplist.contains(&phrase) {
                continue;
            }
            lexicon.insert(phrase, concept.id.clone());
        }
    }
    lexicon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::Concept;

    fn concept(id: &str, pref: &str, alts: &[&str]) -> Concept {
        Concept {
            id: id.into(),
            pref_label: pref.into(),
            alt_labels: alts.iter().map(|s| s.to_string()).collect(),
            broader: BTreeSet::new(),
        }
    }

    fn taxonomy(concepts: Vec<Concept>) -> Taxonomy {
        Taxonomy::from_concepts(concepts, "test", false).unwrap()
    }

    fn phrase(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_taxonomy_empty_lexicon() {
        assert!(build_lexicon(&Taxonomy::empty("x"), &LexiconOptions::default()).is_empty());
    }

    #[test]
    fn identical_labels_merge() {
        let t = taxonomy(vec![
            concept("http://e.org/a", "Networks", &[]),
            concept("http://e.org/b", "networks", &[]),
        ]);
        let lex = build_lexicon(&t, &LexiconOptions::default());
        assert_eq!(lex.len(), 1);
        let concepts = lex.lookup(&phrase(&["networks"])).unwrap();
        assert_eq!(concepts.len(), 2);
    }

    #[test]
    fn three_pref_two_alt_gives_five_entries() {
        // normalized by hand: [supervised learning] [gaussian processes] [real time systems]
        // [learning from labeled data] [kriging]
        let t = taxonomy(vec![
            concept("http://e.org/1", "Supervised learning", &["Learning from labeled data"]),
            concept("http://e.org/2", "Gaussian processes", &["Kriging"]),
            concept("http://e.org/3", "Real-time systems", &[]),
        ]);
        let lex = build_lexicon(&t, &LexiconOptions::default());
        assert_eq!(lex.len(), 5);
        assert!(lex.lookup(&phrase(&["real", "time", "systems"])).is_some());
        assert!(lex.lookup(&phrase(&["kriging"])).unwrap().contains("http://e.org/2"));
    }

    #[test]
    fn filters() {
        let t = taxonomy(vec![
            concept("http://e.org/1", "Security", &["Computer security"]),
            concept("http://e.org/2", "Gaussian processes", &["Kriging"]),
        ]);
        let opts = LexiconOptions {
            min_tokens: 2,
            ..LexiconOptions::default()
        };
        let lex = build_lexicon(&t, &opts);
        assert_eq!(lex.len(), 2);
        assert!(lex.lookup(&phrase(&["security"])).is_none());

        let opts = LexiconOptions::default().with_stoplist(["SECURITY", "Gaussian-processes"]);
        let lex = build_lexicon(&t, &opts);
        let keys: Vec<_> = lex.iter().map(|(k, _)| k.join(" ")).collect();
        assert_eq!(keys, vec!["computer security", "kriging"]);

        let opts = LexiconOptions {
            include_alt_labels: false,
            ..LexiconOptions::default()
        };
        assert_eq!(build_lexicon(&t, &opts).len(), 2);
    }

    #[test]
    fn every_label_findable() {
        let t = taxonomy(vec![
            concept("http://e.org/1", "Théorie des graphes", &["Graph theory", "Graph-theory"]),
            concept("http://e.org/2", "Graph theory", &[]),
        ]);
        let lex = build_lexicon(&t, &LexiconOptions::default());
        for c in t.concepts() {
            for label in c.labels() {
                assert!(lex.lookup(&normalize_label(label)).unwrap().contains(&c.id));
            }
        }
        assert_eq!(lex.len(), 2);
    }
}
