use std::collections::{BTreeSet, HashMap};

use super::term::{Term, Triple};

/// Which index serves a triple lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessPath {
    Subject,
    PredicateObject,
    Object,
    /// Full scan with filtering.
    Scan,
}

impl AccessPath {
    pub const ALL: [AccessPath; 4] = [
        AccessPath::Subject,
        AccessPath::PredicateObject,
        AccessPath::Object,
        AccessPath::Scan,
    ];
}

/// A frozen, deduplicated set of triples with three lookup indexes: by
/// subject, by predicate and object, and by object.
///
/// Terms are interned. Ids are assigned in term order, so comparing ids
/// compares terms.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    terms: Vec<Term>,
    ids: HashMap<Term, u32>,
    /// Sorted by (subject, predicate, object).
    triples: Vec<[u32; 3]>,
    by_subject: HashMap<u32, Vec<u32>>,
    by_predicate_object: HashMap<(u32, u32), Vec<u32>>,
    by_object: HashMap<u32, Vec<u32>>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.triples == other.triples
    }
}

impl Eq for Dataset {}

impl FromIterator<Triple> for Dataset {
    fn from_iter<T: IntoIterator<Item = Triple>>(iter: T) -> Self {
        let set: BTreeSet<Triple> = iter.into_iter().collect();
        Dataset::from_sorted_set(set)
    }
}

impl Dataset {
    pub fn new() -> Self {
        Dataset::default()
    }

    fn from_sorted_set(set: BTreeSet<Triple>) -> Self {
        let mut vocabulary = BTreeSet::new();
        for t in &set {
            vocabulary.insert(t.subject());
            vocabulary.insert(t.predicate());
            vocabulary.insert(t.object());
        }
        let terms: Vec<Term> = vocabulary.into_iter().cloned().collect();
        let ids: HashMap<Term, u32> = terms.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();

        let triples: Vec<[u32; 3]> = set
            .iter()
            .map(|t| [ids[t.subject()], ids[t.predicate()], ids[t.object()]])
            .collect();

        let mut by_subject: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut by_predicate_object: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        let mut by_object: HashMap<u32, Vec<u32>> = HashMap::new();
        for (i, &[s, p, o]) in triples.iter().enumerate() {
            let i = i as u32;
            by_subject.entry(s).or_default().push(i);
            by_predicate_object.entry((p, o)).or_default().push(i);
            by_object.entry(o).or_default().push(i);
        }

        Dataset {
            terms,
            ids,
            triples,
            by_subject,
            by_predicate_object,
            by_object,
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Triples in (subject, predicate, object) term order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples.iter().map(|&ids| self.triple(ids))
    }

    /// Distinct terms in term order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        let (Some(s), Some(p), Some(o)) = (
            self.term_id(triple.subject()),
            self.term_id(triple.predicate()),
            self.term_id(triple.object()),
        ) else {
            return false;
        };
        self.by_subject
            .get(&s)
            .is_some_and(|rows| rows.iter().any(|&i| self.triples[i as usize] == [s, p, o]))
    }

    /// Triples matching the given slots (`None` = any), served by the most
    /// selective applicable index.
    pub fn matching(&self, subject: Option<&Term>, predicate: Option<&Term>, object: Option<&Term>) -> Vec<Triple> {
        let Some(key) = self.resolve_key(subject, predicate, object) else {
            return Vec::new();
        };
        let path = self.best_path(key);
        self.scan_ids(path, key).map(|i| self.triple(self.triples[i as usize])).collect()
    }

    /// Like [`matching`](Self::matching) but through a specific index.
    /// Returns `None` when the index cannot serve the lookup (its key slots
    /// are not all given).
    pub fn matching_via(
        &self,
        path: AccessPath,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
    ) -> Option<Vec<Triple>> {
        if !path_applicable(path, [subject.is_some(), predicate.is_some(), object.is_some()]) {
            return None;
        }
        let Some(key) = self.resolve_key(subject, predicate, object) else {
            return Some(Vec::new());
        };
        Some(self.scan_ids(path, key).map(|i| self.triple(self.triples[i as usize])).collect())
    }

    /// True if every index covers exactly the stored triples.
    pub fn indexes_consistent(&self) -> bool {
        let covers = |lists: &mut dyn Iterator<Item = &Vec<u32>>| {
            let mut seen: Vec<u32> = lists.flatten().copied().collect();
            seen.sort_unstable();
            seen.len() == self.triples.len() && seen.iter().enumerate().all(|(i, &t)| i as u32 == t)
        };
        let keyed_right = self.by_subject.iter().all(|(s, rows)| rows.iter().all(|&i| self.triples[i as usize][0] == *s))
            && self
                .by_predicate_object
                .iter()
                .all(|((p, o), rows)| rows.iter().all(|&i| self.triples[i as usize][1..] == [*p, *o]))
            && self.by_object.iter().all(|(o, rows)| rows.iter().all(|&i| self.triples[i as usize][2] == *o));
        keyed_right
            && covers(&mut self.by_subject.values())
            && covers(&mut self.by_predicate_object.values())
            && covers(&mut self.by_object.values())
    }

    pub(crate) fn term_id(&self, term: &Term) -> Option<u32> {
        self.ids.get(term).copied()
    }

    pub(crate) fn term(&self, id: u32) -> &Term {
        &self.terms[id as usize]
    }

    pub(crate) fn triple_ids(&self, index: u32) -> [u32; 3] {
        self.triples[index as usize]
    }

    fn triple(&self, [s, p, o]: [u32; 3]) -> Triple {
        Triple::new(self.term(s).clone(), self.term(p).clone(), self.term(o).clone())
            .expect("stored triples are valid")
    }

    /// `None` if some given term does not occur in the dataset at all.
    fn resolve_key(&self, s: Option<&Term>, p: Option<&Term>, o: Option<&Term>) -> Option<[Option<u32>; 3]> {
        let lookup = |t: Option<&Term>| match t {
            Some(t) => self.term_id(t).map(Some),
            None => Some(None),
        };
        Some([lookup(s)?, lookup(p)?, lookup(o)?])
    }

    /// Number of index entries a lookup through `path` would visit.
    pub(crate) fn estimate(&self, path: AccessPath, [s, p, o]: [Option<u32>; 3]) -> usize {
        match (path, s, p, o) {
            (AccessPath::Subject, Some(s), _, _) => self.by_subject.get(&s).map_or(0, Vec::len),
            (AccessPath::PredicateObject, _, Some(p), Some(o)) => self.by_predicate_object.get(&(p, o)).map_or(0, Vec::len),
            (AccessPath::Object, _, _, Some(o)) => self.by_object.get(&o).map_or(0, Vec::len),
            _ => self.triples.len(),
        }
    }

    pub(crate) fn best_path(&self, key: [Option<u32>; 3]) -> AccessPath {
        let given = [key[0].is_some(), key[1].is_some(), key[2].is_some()];
        AccessPath::ALL
            .into_iter()
            .filter(|&path| path_applicable(path, given))
            .min_by_key(|&path| self.estimate(path, key))
            .unwrap_or(AccessPath::Scan)
    }

    /// Indices of triples matching `key`, read through `path` and filtered
    /// on every given slot.
    pub(crate) fn scan_ids(&self, path: AccessPath, key: [Option<u32>; 3]) -> impl Iterator<Item = u32> + '_ {
        const EMPTY: &[u32] = &[];
        let [s, p, o] = key;
        let rows: Box<dyn Iterator<Item = u32> + '_> = match (path, s, p, o) {
            (AccessPath::Subject, Some(s), _, _) => {
                Box::new(self.by_subject.get(&s).map_or(EMPTY, Vec::as_slice).iter().copied())
            }
            (AccessPath::PredicateObject, _, Some(p), Some(o)) => Box::new(
                self.by_predicate_object
                    .get(&(p, o))
                    .map_or(EMPTY, Vec::as_slice)
                    .iter()
                    .copied(),
            ),
            (AccessPath::Object, _, _, Some(o)) => {
                Box::new(self.by_object.get(&o).map_or(EMPTY, Vec::as_slice).iter().copied())
            }
            _ => Box::new(0..self.triples.len() as u32),
        };
        rows.filter(move |&i| {
            let t = self.triples[i as usize];
            key.iter().zip(t).all(|(want, have)| want.is_none_or(|w| w == have))
        })
    }
}

fn path_applicable(path: AccessPath, [s, p, o]: [bool; 3]) -> bool {
    match path {
        AccessPath::Subject => s,
        AccessPath::PredicateObject => p && o,
        AccessPath::Object => o,
        AccessPath::Scan => true,
    }
}
