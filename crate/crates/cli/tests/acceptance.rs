//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero if any criterion fails.
//!
//! The official ACM CCS 2012 SKOS file is checked when `EPL_CCS_SKOS` names
//! it; otherwise that criterion is skipped.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use expert_pivot::store::{Term, Vocabulary};
use expert_pivot::taxonomy::{parse_skos_file, SkosOptions};
use expert_pivot_service::{load_dataset, router, AppState, DEFAULT_MAX_QUERY_BYTES};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::Value;
use tower::ServiceExt;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

const GAUSSIAN_PROCESSES: &str = "http://dl.acm.org/ccs/ccs.cfm#10010075.10010296";

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn index(output: &Path) -> Result<(String, String), String> {
    let f = fixtures();
    let result = Command::new(env!("CARGO_BIN_EXE_expert-pivot"))
        .arg("index")
        .arg("--taxonomy")
        .arg(f.join("taxonomy.xml"))
        .arg("--wiki-dump")
        .arg(f.join("wiki.xml"))
        .arg("--experts")
        .arg(f.join("experts"))
        .arg("--output")
        .arg(output)
        .output()
        .map_err(|e| format!("cannot run the binary: {e}"))?;
    let stdout = String::from_utf8_lossy(&result.stdout).into_owned();
    let stderr = String::from_utf8_lossy(&result.stderr).into_owned();
    if !result.status.success() {
        return Err(format!("index exited with {}: {stderr}", result.status));
    }
    Ok((stdout, stderr))
}

fn check(condition: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if condition {
        Ok(())
    } else {
        Err(message())
    }
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let nt = dir.path().join("links.nt");
    let (stdout, _) = index(&nt)?;
    let summary = "pages tagged: 2, expert docs tagged: 3, concepts used: 2";
    check(stdout.lines().next() == Some(summary), || format!("summary was {stdout:?}"))?;
    let json: Value = serde_json::from_str(stdout.lines().last().unwrap_or(""))
        .map_err(|e| format!("last stdout line is not JSON: {e}"))?;
    check(json["pages_tagged"] == 2 && json["expert_docs_tagged"] == 3 && json["concepts_used"] == 2, || {
        format!("JSON summary {json}")
    })?;

    let dataset = load_dataset(&nt).map_err(|e| e.to_string())?;
    let app = router(AppState::new(dataset, Vocabulary::default(), DEFAULT_MAX_QUERY_BYTES));
    let runtime = tokio::runtime::Builder::new_current_thread().build().map_err(|e| e.to_string())?;
    let (status, cors, body) = runtime.block_on(async {
        let response = app
            .oneshot(Request::get("/experts?title=Kriging").body(Body::empty()).unwrap())
            .await
            .unwrap();
        let cors = response.headers().get("access-control-allow-origin").cloned();
        let status = response.status();
        (status, cors, to_bytes(response.into_body(), usize::MAX).await.unwrap())
    });
    check(status == StatusCode::OK, || format!("status {status}"))?;
    check(cors.is_some_and(|v| v == "*"), || "missing CORS header".into())?;
    let body: Value = serde_json::from_slice(&body).map_err(|e| e.to_string())?;
    let hits = body["hits"].as_array().ok_or("no hits array")?;
    check(hits.len() == 1, || format!("expected 1 hit, got {body}"))?;
    let hit = &hits[0];
    check(hit["concept"] == GAUSSIAN_PROCESSES && hit["label"] == "Gaussian processes", || {
        format!("unexpected hit {hit}")
    })?;
    let teams: Vec<(&str, &str)> = hit["teams"]
        .as_array()
        .ok_or("no teams")?
        .iter()
        .map(|t| (t["team"].as_str().unwrap_or(""), t["doc_url"].as_str().unwrap_or("")))
        .collect();
    let expected = [("aspi", "aspi/uid1.html"), ("athena", "athena/uid5.html"), ("bigs", "bigs/uid9.html")];
    check(
        teams.len() == 3 && teams.iter().zip(expected).all(|((t, u), (et, eu))| *t == et && u.ends_with(eu)),
        || format!("teams {teams:?}"),
    )?;
    Ok("1 concept, teams aspi/athena/bigs".into())
}

fn matcher_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACCE_0001);
    let mut annotations = 0;
    for case in 0..1000 {
        annotations += support::matcher_case(&mut rng).map_err(|e| format!("case {case}: {e}"))?;
    }
    Ok(format!("1000 cases, {annotations} annotations"))
}

fn sparql_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACCE_0002);
    let mut rows = 0;
    for case in 0..500 {
        rows += support::sparql_case(&mut rng).map_err(|e| format!("case {case}: {e}"))?;
    }
    Ok(format!("500 cases, {rows} rows"))
}

fn ntriples_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xACCE_0003);
    let mut tricky = 0;
    for case in 0..200 {
        let mut probe = rng.clone();
        let dataset = support::random_dataset(&mut probe, 60, true);
        tricky += usize::from(dataset.iter().any(|t| match t.object() {
            Term::Literal(v) => v.contains(['"', '\\', '\n']),
            Term::Iri(_) => false,
        }));
        support::ntriples_case(&mut rng).map_err(|e| format!("case {case}: {e}"))?;
    }
    check(tricky > 100, || format!("only {tricky} datasets had quotes, backslashes or newlines"))?;
    Ok(format!("200 datasets, {tricky} with escaped literals"))
}

/// Count `skos:Concept` open tags in the raw text, excluding longer names
/// such as `skos:ConceptScheme`.
fn concept_tag_count(raw: &str) -> usize {
    raw.match_indices("<skos:Concept")
        .filter(|(i, m)| {
            raw[i + m.len()..]
                .chars()
                .next()
                .is_some_and(|c| c.is_whitespace() || c == '>' || c == '/')
        })
        .count()
}

fn skos_file_check(path: &Path) -> Result<usize, String> {
    let raw = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let taxonomy = parse_skos_file(path, &SkosOptions::default()).map_err(|e| e.to_string())?;
    let expected = concept_tag_count(&raw);
    check(taxonomy.len() == expected, || {
        format!("parsed {} concepts, raw text has {expected}", taxonomy.len())
    })?;
    let dangling = taxonomy
        .concepts()
        .flat_map(|c| c.broader.iter())
        .filter(|b| !taxonomy.contains(b))
        .count();
    check(dangling == 0, || format!("{dangling} dangling broader edges"))?;
    check(taxonomy.topological_order().is_some(), || "broader relation has a cycle".into())?;
    Ok(taxonomy.len())
}

/// `Ok(None)` means skipped.
fn official_ccs() -> Result<Option<String>, String> {
    skos_file_check(&fixtures().join("taxonomy.xml"))?;
    match std::env::var_os("EPL_CCS_SKOS") {
        Some(path) => {
            let n = skos_file_check(Path::new(&path))?;
            Ok(Some(format!("{n} concepts, no dangling edges, acyclic")))
        }
        None => Ok(None),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = dir.path().join("a.nt");
    let b = dir.path().join("b.nt");
    index(&a)?;
    index(&b)?;
    let a = std::fs::read(a).map_err(|e| e.to_string())?;
    let b = std::fs::read(b).map_err(|e| e.to_string())?;
    check(!a.is_empty() && a == b, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() {
    let criteria: [Criterion; 5] = [
        ("end-to-end fixture: index then /experts?title=Kriging", Duration::from_secs(5), end_to_end),
        ("matcher oracle", Duration::from_secs(30), matcher_oracle),
        ("SPARQL oracle", Duration::from_secs(60), sparql_oracle),
        ("N-Triples round trip", Duration::from_secs(60), ntriples_round_trip),
        ("index determinism", Duration::from_secs(60), determinism),
    ];
    let mut failed = 0;
    for (name, budget, criterion) in criteria {
        let start = Instant::now();
        let outcome = criterion();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) if elapsed <= budget => println!("PASS {name}: {detail} ({:.2} s)", elapsed.as_secs_f64()),
            Ok(_) => {
                failed += 1;
                println!("FAIL {name}: took {:.2} s, budget {} s", elapsed.as_secs_f64(), budget.as_secs());
            }
            Err(reason) => {
                failed += 1;
                println!("FAIL {name}: {reason}");
            }
        }
    }
    match official_ccs() {
        Ok(Some(detail)) => println!("PASS official ACM CCS 2012 SKOS check: {detail}"),
        Ok(None) => println!("SKIP official ACM CCS 2012 SKOS check: EPL_CCS_SKOS not set (checker verified on fixture)"),
        Err(reason) => {
            failed += 1;
            println!("FAIL official ACM CCS 2012 SKOS check: {reason}");
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
