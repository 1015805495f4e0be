use std::collections::BTreeMap;

use expert_pivot::store::{evaluate, experts_query, parse_sparql, Dataset, Term, Vocabulary};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TeamLink {
    pub team: String,
    pub doc_url: String,
}

/// One concept of the article, with the teams whose documents mention it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpertHit {
    pub concept: String,
    pub label: String,
    /// Sorted by team, then document URL; never empty.
    pub teams: Vec<TeamLink>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpertsResponse {
    pub title: String,
    pub hits: Vec<ExpertHit>,
}

/// Article titles arrive in URL form; underscores stand for spaces.
pub fn normalize_title(raw: &str) -> String {
    raw.replace('_', " ").trim().to_string()
}

/// Run the experts query for `title` and group the rows by concept. Hits
/// are sorted by label.
pub fn find_experts(dataset: &Dataset, vocab: &Vocabulary, title: &str) -> ExpertsResponse {
    let query = parse_sparql(&experts_query(title, vocab)).expect("the experts query is well-formed");
    let results = evaluate(&query, dataset);

    let mut grouped: BTreeMap<(&str, &str), Vec<TeamLink>> = BTreeMap::new();
    for row in &results.rows {
        let [concept, label, team, doc] = [&row[0], &row[1], &row[2], &row[3]];
        if !concept.is_iri() || !doc.is_iri() || !matches!(label, Term::Literal(_)) || !matches!(team, Term::Literal(_)) {
            continue;
        }
        grouped.entry((concept.value(), label.value())).or_default().push(TeamLink {
            team: team.value().to_string(),
            doc_url: doc.value().to_string(),
        });
    }

    let mut hits: Vec<ExpertHit> = grouped
        .into_iter()
        .map(|((concept, label), mut teams)| {
            teams.sort();
            teams.dedup();
            ExpertHit {
                concept: concept.to_string(),
                label: label.to_string(),
                teams,
            }
        })
        .collect();
    hits.sort_by(|a, b| (&a.label, &a.concept).cmp(&(&b.label, &b.concept)));
    ExpertsResponse {
        title: title.to_string(),
        hits,
    }
}
