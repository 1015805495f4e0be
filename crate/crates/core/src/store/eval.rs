//! Basic graph pattern evaluation.
//!
//! Patterns are joined by index nested loops. At every step the planner
//! picks the remaining pattern with the fewest candidate triples under the
//! bindings made so far, reading it through the most selective index.

use super::dataset::Dataset;
use super::sparql::{PatternTerm, Query};
use super::term::Term;

/// Rows of a SELECT, one value per projected variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResults {
    pub variables: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl QueryResults {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Value of `variable` in row `row`.
    pub fn get(&self, row: usize, variable: &str) -> Option<&Term> {
        let column = self.variables.iter().position(|v| v == variable)?;
        self.rows.get(row).map(|r| &r[column])
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Const(u32),
}

struct Plan<'d> {
    dataset: &'d Dataset,
    patterns: Vec<[Slot; 3]>,
    projection: Vec<usize>,
}

/// Evaluate a query. Rows are sorted by their values (IRIs before
/// literals, then lexicographically); DISTINCT removes duplicate rows; then
/// OFFSET and LIMIT apply.
pub fn evaluate(query: &Query, dataset: &Dataset) -> QueryResults {
    run(query, dataset, None)
}

/// Evaluate joining the patterns in exactly the given order instead of the
/// planner's choice. Results are identical to [`evaluate`].
///
/// # Panics
///
/// If `order` is not a permutation of the pattern indices.
pub fn evaluate_with_order(query: &Query, dataset: &Dataset, order: &[usize]) -> QueryResults {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    assert!(
        sorted.iter().copied().eq(0..query.patterns.len()),
        "join order must be a permutation of the pattern indices"
    );
    run(query, dataset, Some(order))
}

fn run(query: &Query, dataset: &Dataset, order: Option<&[usize]>) -> QueryResults {
    let variables = query.variables.clone();
    let Some(plan) = Plan::compile(query, dataset) else {
        return QueryResults {
            variables,
            rows: Vec::new(),
        };
    };

    let var_count = query.pattern_variables().len();
    let mut bindings = vec![None; var_count];
    let mut id_rows: Vec<Vec<u32>> = Vec::new();
    match order {
        Some(order) => plan.join_fixed(order, &mut bindings, &mut id_rows),
        None => {
            let mut remaining: Vec<usize> = (0..plan.patterns.len()).collect();
            plan.join_greedy(&mut remaining, &mut bindings, &mut id_rows);
        }
    }

    // ids are assigned in term order, so sorting ids sorts values
    id_rows.sort_unstable();
    if query.distinct {
        id_rows.dedup();
    }
    let offset = query.offset.unwrap_or(0);
    let limit = query.limit.unwrap_or(usize::MAX);
    let rows = id_rows
        .into_iter()
        .skip(offset)
        .take(limit)
        .map(|row| row.into_iter().map(|id| dataset.term(id).clone()).collect())
        .collect();
    QueryResults { variables, rows }
}

impl<'d> Plan<'d> {
    /// `None` when some constant term does not occur in the dataset, in
    /// which case nothing can match.
    fn compile(query: &Query, dataset: &'d Dataset) -> Option<Self> {
        let vars = query.pattern_variables();
        let index_of = |name: &str| vars.iter().position(|v| v == name).expect("variable collected from patterns");
        let mut patterns = Vec::with_capacity(query.patterns.len());
        for pattern in &query.patterns {
            let mut slots = [Slot::Const(0); 3];
            for (slot, term) in slots.iter_mut().zip(pattern.slots()) {
                *slot = match term {
                    PatternTerm::Variable(v) => Slot::Var(index_of(v)),
                    PatternTerm::Term(t) => Slot::Const(dataset.term_id(t)?),
                };
            }
            patterns.push(slots);
        }
        let projection = query.variables.iter().map(|v| index_of(v)).collect();
        Some(Plan {
            dataset,
            patterns,
            projection,
        })
    }

    fn key(&self, pattern: usize, bindings: &[Option<u32>]) -> [Option<u32>; 3] {
        self.patterns[pattern].map(|slot| match slot {
            Slot::Const(id) => Some(id),
            Slot::Var(v) => bindings[v],
        })
    }

    fn join_greedy(&self, remaining: &mut Vec<usize>, bindings: &mut Vec<Option<u32>>, out: &mut Vec<Vec<u32>>) {
        if remaining.is_empty() {
            out.push(self.project(bindings));
            return;
        }
        let (position, _) = remaining
            .iter()
            .enumerate()
            .map(|(pos, &p)| {
                let key = self.key(p, bindings);
                (pos, self.dataset.estimate(self.dataset.best_path(key), key))
            })
            .min_by_key(|&(pos, cost)| (cost, pos))
            .expect("remaining is not empty");
        let pattern = remaining.remove(position);
        self.extend(pattern, bindings, &mut |bindings| self.join_greedy(remaining, bindings, out));
        remaining.insert(position, pattern);
    }

    fn join_fixed(&self, order: &[usize], bindings: &mut Vec<Option<u32>>, out: &mut Vec<Vec<u32>>) {
        let Some((&pattern, rest)) = order.split_first() else {
            out.push(self.project(bindings));
            return;
        };
        self.extend(pattern, bindings, &mut |bindings| self.join_fixed(rest, bindings, out));
    }

    /// Call `next` once for every triple matching `pattern` under `bindings`,
    /// with the pattern's variables bound accordingly.
    fn extend(&self, pattern: usize, bindings: &mut Vec<Option<u32>>, next: &mut dyn FnMut(&mut Vec<Option<u32>>)) {
        let key = self.key(pattern, bindings);
        let path = self.dataset.best_path(key);
        let slots = self.patterns[pattern];
        for index in self.dataset.scan_ids(path, key) {
            let triple = self.dataset.triple_ids(index);
            let mut newly_bound = [None; 3];
            let mut consistent = true;
            for (i, (slot, value)) in slots.iter().zip(triple).enumerate() {
                if let Slot::Var(v) = *slot {
                    match bindings[v] {
                        Some(bound) if bound != value => {
                            consistent = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            bindings[v] = Some(value);
                            newly_bound[i] = Some(v);
                        }
                    }
                }
            }
            if consistent {
                next(bindings);
            }
            for v in newly_bound.into_iter().flatten() {
                bindings[v] = None;
            }
        }
    }

    fn project(&self, bindings: &[Option<u32>]) -> Vec<u32> {
        self.projection
            .iter()
            .map(|&v| bindings[v].expect("every pattern variable is bound in a solution"))
            .collect()
    }
}
