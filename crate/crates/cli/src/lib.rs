//! `expert-pivot` command line.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors.

mod index;

pub use index::{run_index, IndexSummary, PipelineConfig};

use std::ffi::OsString;
use std::io::{Read, Write};
use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use expert_pivot::store::{evaluate, parse_sparql, Vocabulary, DEFAULT_BASE};
use expert_pivot::taxonomy::{parse_skos_file, SkosOptions};
use expert_pivot_service::{load_dataset, results_json, AppState, DEFAULT_MAX_QUERY_BYTES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "expert-pivot", version, about = "Find local experts for Wikipedia articles through a shared taxonomy")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a SKOS taxonomy and print its size.
    TaxonomyCheck(TaxonomyCheckArgs),
    /// Annotate both corpora and write the link graph as N-Triples.
    Index(IndexArgs),
    /// Serve a link graph over HTTP.
    Serve(ServeArgs),
    /// Run a SPARQL query file against a link graph.
    Query(QueryArgs),
}

#[derive(Debug, Args)]
struct TaxonomyCheckArgs {
    /// SKOS RDF/XML file.
    #[arg(env = "EPL_TAXONOMY")]
    taxonomy: PathBuf,
    /// Drop dangling broader edges with a warning instead of failing.
    #[arg(long, env = "EPL_LENIENT")]
    lenient: bool,
}

#[derive(Debug, Args)]
struct IndexArgs {
    /// SKOS RDF/XML taxonomy file.
    #[arg(long, env = "EPL_TAXONOMY")]
    taxonomy: PathBuf,
    /// MediaWiki XML dump (.xml, .xml.gz or .xml.bz2).
    #[arg(long, env = "EPL_WIKI_DUMP")]
    wiki_dump: PathBuf,
    /// Root of the report pages, laid out as <root>/<team>/<page>.html.
    #[arg(long, env = "EPL_EXPERTS")]
    experts: PathBuf,
    /// Output N-Triples file.
    #[arg(long, short, env = "EPL_OUTPUT")]
    output: PathBuf,
    /// Ignore labels with fewer tokens.
    #[arg(long, env = "EPL_MIN_TOKENS", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    min_tokens: u32,
    /// File of labels never to match, one per line.
    #[arg(long, env = "EPL_STOPLIST")]
    stoplist: Option<PathBuf>,
    /// Match preferred labels only.
    #[arg(long, env = "EPL_NO_ALT_LABELS")]
    no_alt_labels: bool,
    /// Drop dangling broader edges with a warning instead of failing.
    #[arg(long, env = "EPL_LENIENT")]
    lenient: bool,
    /// Base IRI of the link vocabulary.
    #[arg(long, env = "EPL_BASE_IRI", default_value = DEFAULT_BASE)]
    base_iri: String,
    /// Prefix of article URLs.
    #[arg(long, env = "EPL_WIKI_URL_BASE", default_value = expert_pivot::ingest::DEFAULT_WIKI_BASE)]
    wiki_url_base: String,
    /// Prefix of report page URLs; file URLs when absent.
    #[arg(long, env = "EPL_EXPERT_URL_BASE")]
    expert_url_base: Option<String>,
    /// Which directory level below the root names the team.
    #[arg(long, env = "EPL_TEAM_COMPONENT", default_value_t = 0)]
    team_component: usize,
    /// Also record documents that mention no concept.
    #[arg(long, env = "EPL_KEEP_UNTAGGED")]
    keep_untagged: bool,
    /// Report progress every N documents (0 disables).
    #[arg(long, env = "EPL_PROGRESS_EVERY", default_value_t = 10_000)]
    progress_every: usize,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// N-Triples file produced by `index`.
    #[arg(long, env = "EPL_DATASET")]
    dataset: PathBuf,
    #[arg(long, env = "EPL_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Base IRI of the link vocabulary.
    #[arg(long, env = "EPL_BASE_IRI", default_value = DEFAULT_BASE)]
    base_iri: String,
    #[arg(long, env = "EPL_MAX_QUERY_BYTES", default_value_t = DEFAULT_MAX_QUERY_BYTES)]
    max_query_bytes: usize,
}

#[derive(Debug, Args)]
struct QueryArgs {
    /// N-Triples file produced by `index`.
    #[arg(long, env = "EPL_DATASET")]
    dataset: PathBuf,
    /// SPARQL query file, `-` for standard input.
    query: PathBuf,
    /// Print SPARQL results JSON instead of tab-separated rows.
    #[arg(long)]
    json: bool,
}

/// Entry point used by the binary.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Like [`run`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().ansi().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::TaxonomyCheck(args) => taxonomy_check(args, out),
        Command::Index(args) => index(args, out, err),
        Command::Serve(args) => serve(args, err),
        Command::Query(args) => query(args, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_DATA
        }
    }
}

fn taxonomy_check(args: TaxonomyCheckArgs, out: &mut dyn Write) -> Result<()> {
    let taxonomy = parse_skos_file(&args.taxonomy, &SkosOptions { lenient: args.lenient })
        .with_context(|| format!("taxonomy {}", args.taxonomy.display()))?;
    let stats = taxonomy.stats();
    let roots = taxonomy.concepts().filter(|c| c.broader.is_empty()).count();
    writeln!(out, "concepts: {}", stats.concepts)?;
    writeln!(out, "labels: {}", stats.labels)?;
    writeln!(out, "broader edges: {}", stats.broader_edges)?;
    writeln!(out, "roots: {roots}")?;
    Ok(())
}

fn index(args: IndexArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let config = PipelineConfig {
        taxonomy: args.taxonomy,
        wiki_dump: args.wiki_dump,
        experts: args.experts,
        output: args.output,
        min_tokens: args.min_tokens as usize,
        stoplist: args.stoplist,
        alt_labels: !args.no_alt_labels,
        lenient: args.lenient,
        base_iri: args.base_iri,
        wiki_url_base: args.wiki_url_base,
        expert_url_base: args.expert_url_base,
        team_component: args.team_component,
        keep_untagged: args.keep_untagged,
        progress_every: args.progress_every,
    };
    let summary = run_index(&config, err)?;
    writeln!(out, "{}", summary.line())?;
    writeln!(out, "{}", summary.json(&config.output))?;
    Ok(())
}

fn serve(args: ServeArgs, err: &mut dyn Write) -> Result<()> {
    let vocab = Vocabulary::new(args.base_iri.as_str()).context("invalid base IRI")?;
    let dataset = load_dataset(&args.dataset)?;
    let triples = dataset.len();
    let state = AppState::new(dataset, vocab, args.max_query_bytes);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("cannot start runtime")?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.listen)
            .await
            .with_context(|| format!("cannot listen on {}", args.listen))?;
        let addr = listener.local_addr()?;
        writeln!(err, "serving {triples} triples on http://{addr}")?;
        err.flush()?;
        expert_pivot_service::serve(listener, state, expert_pivot_service::shutdown_signal()).await?;
        Ok(())
    })
}

fn query(args: QueryArgs, out: &mut dyn Write) -> Result<()> {
    let text = if args.query.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        text
    } else {
        std::fs::read_to_string(&args.query).with_context(|| format!("cannot read {}", args.query.display()))?
    };
    let query = parse_sparql(&text).context("query")?;
    let dataset = load_dataset(&args.dataset)?;
    let results = evaluate(&query, &dataset);
    if args.json {
        writeln!(out, "{}", results_json(&results))?;
        return Ok(());
    }
    let header: Vec<String> = results.variables.iter().map(|v| format!("?{v}")).collect();
    writeln!(out, "{}", header.join("\t"))?;
    for row in &results.rows {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        writeln!(out, "{}", cells.join("\t"))?;
    }
    Ok(())
}
