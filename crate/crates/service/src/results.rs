use expert_pivot::store::{QueryResults, Term};
use serde_json::{json, Map, Value};

pub const SPARQL_RESULTS_JSON: &str = "application/sparql-results+json";

/// Encode rows in the SPARQL 1.1 query results JSON format.
pub fn results_json(results: &QueryResults) -> Value {
    let bindings: Vec<Value> = results
        .rows
        .iter()
        .map(|row| {
            let binding: Map<String, Value> = results
                .variables
                .iter()
                .zip(row)
                .map(|(var, term)| {
                    let kind = match term {
                        Term::Iri(_) => "uri",
                        Term::Literal(_) => "literal",
                    };
                    (var.clone(), json!({"type": kind, "value": term.value()}))
                })
                .collect();
            Value::Object(binding)
        })
        .collect();
    json!({
        "head": {"vars": results.variables},
        "results": {"bindings": bindings},
    })
}
