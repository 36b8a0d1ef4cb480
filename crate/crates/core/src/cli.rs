//! `rdfstar2pg` command line.
//!
//! Exit codes: 0 clean, 1 parse/input/output error (or failing conformance
//! rows), 2 bad flags, 3 conversion succeeded but lost information.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};

use clap::{Args, Parser, Subcommand};

use crate::conformance::{conformance_config, run_conformance};
use crate::export::{export, ExportFormat};
use crate::rdf::{classify, Dataset, StatementKind};
use crate::transform::{
    transform, Approach, DatatypePolicy, ListPolicy, MultiValuePolicy, NamedGraphPolicy, RdfTypePolicy,
    TransformConfig,
};
use crate::turtle::parse_turtle_star;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LOSSY: i32 = 3;

/// Set to any value to disable ANSI color in tables.
pub const NO_COLOR_ENV: &str = "RDFSTAR2PG_NO_COLOR";

#[derive(Debug, Parser)]
#[command(name = "rdfstar2pg", version, about = "Convert RDF-star (Turtle-star / TriG-star) into property graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transform a document and export the property graph.
    Convert(ConvertArgs),
    /// Run the built-in corpus against the expected shapes.
    Conformance(ConformanceArgs),
    /// Print statement statistics for a document.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// Input file, or '-' for standard input.
    input: String,
    /// rpt, pgt or hybrid.
    #[arg(long, default_value = "hybrid")]
    approach: Approach,
    /// Hybrid only: edge or property.
    #[arg(long, default_value = "property")]
    datatype_policy: DatatypePolicy,
    /// edge or label (default depends on the approach).
    #[arg(long)]
    rdf_type_policy: Option<RdfTypePolicy>,
    /// merge, partition or edge-property.
    #[arg(long, default_value = "edge-property")]
    named_graph_policy: NamedGraphPolicy,
    /// expand or collapse.
    #[arg(long, default_value = "expand")]
    list_policy: ListPolicy,
    /// list-merge or last-wins (default: list-merge on nodes, last-wins on edges).
    #[arg(long)]
    multi_value_policy: Option<MultiValuePolicy>,
    /// Leave out the ObjectProperty/DatatypeProperty edge labels.
    #[arg(long)]
    no_kind_labels: bool,
    /// json, graphml or cypher.
    #[arg(long, default_value = "json")]
    format: ExportFormat,
    /// Output file, or '-' for standard output.
    #[arg(long, short, default_value = "-")]
    output: String,
    /// Write the transformation report as JSON to this file ('-' for standard output).
    #[arg(long)]
    report: Option<String>,
}

#[derive(Debug, Args)]
struct ConformanceArgs {
    /// Comma-separated approaches to run.
    #[arg(long, value_delimiter = ',', default_value = "rpt,pgt,hybrid")]
    approaches: Vec<Approach>,
    /// Also write the report as JSON to this file ('-' for standard output).
    #[arg(long)]
    json: Option<String>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    /// Input file, or '-' for standard input.
    input: String,
}

/// Process streams, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    pub color: bool,
}

/// Color only when writing to a terminal and not disabled through
/// [`NO_COLOR_ENV`].
pub fn color_enabled() -> bool {
    use std::io::IsTerminal;
    std::env::var_os(NO_COLOR_ENV).is_none() && io::stdout().is_terminal()
}

pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = io.stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = io.stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Convert(args) => convert(args, io),
        Command::Conformance(args) => conformance(args, io),
        Command::Inspect(args) => inspect(args, io),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(io.stderr, "error: {message}");
            EXIT_FAILURE
        }
    }
}

fn read_input(path: &str, io: &mut Io<'_>) -> Result<String, String> {
    if path == "-" {
        let mut text = String::new();
        io.stdin.read_to_string(&mut text).map_err(|e| format!("reading standard input: {e}"))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
    }
}

fn write_output(path: &str, text: &str, io: &mut Io<'_>) -> Result<(), String> {
    if path == "-" {
        io.stdout.write_all(text.as_bytes()).map_err(|e| format!("writing standard output: {e}"))
    } else {
        fs::write(path, text).map_err(|e| format!("writing {path}: {e}"))
    }
}

fn load(path: &str, io: &mut Io<'_>) -> Result<Dataset, String> {
    let text = read_input(path, io)?;
    let name = if path == "-" { "<stdin>" } else { path };
    parse_turtle_star(&text).map_err(|e| format!("{name}:{e}"))
}

fn convert(args: ConvertArgs, io: &mut Io<'_>) -> Result<i32, String> {
    let dataset = load(&args.input, io)?;
    let cfg = TransformConfig {
        approach: args.approach,
        hybrid_datatype_policy: args.datatype_policy,
        rdf_type_policy: args.rdf_type_policy,
        named_graph_policy: args.named_graph_policy,
        list_policy: args.list_policy,
        multi_value_policy: args.multi_value_policy,
        edge_kind_tags: args.no_kind_labels.then_some(false),
    };
    let (graph, report) = transform(&dataset, &cfg);
    let text = export(&graph, args.format).map_err(|e| e.to_string())?;
    write_output(&args.output, &text, io)?;
    if let Some(path) = &args.report {
        write_output(path, &report.to_json(), io)?;
    }
    if report.is_lossless() {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(
            io.stderr,
            "lossy conversion: {} of {} statements converted ({} partial, {} ignored, {} errors)",
            report.converted,
            report.total_statements,
            report.partial.len(),
            report.ignored.len(),
            report.errors.len()
        );
        Ok(EXIT_LOSSY)
    }
}

fn conformance(args: ConformanceArgs, io: &mut Io<'_>) -> Result<i32, String> {
    let report = run_conformance(&args.approaches, &conformance_config(Approach::Hybrid));
    write_output("-", &report.render_table(io.color), io)?;
    if let Some(path) = &args.json {
        write_output(path, &report.to_json(), io)?;
    }
    Ok(if report.all_passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

/// Statistics over the statements as written; collection cells are counted
/// separately.
pub fn describe(dataset: &Dataset) -> String {
    let mut counts = [0usize; 5];
    let mut written = 0;
    let mut derived = 0;
    let mut max_depth = 0;
    for (_, graph) in dataset.graphs() {
        for stmt in graph.iter() {
            if graph.is_derived(stmt) {
                derived += 1;
                continue;
            }
            written += 1;
            max_depth = max_depth.max(stmt.depth());
            let kind = classify(stmt);
            counts[StatementKind::ALL.iter().position(|k| *k == kind).expect("kind listed")] += 1;
        }
    }
    let kinds: Vec<String> = StatementKind::ALL
        .iter()
        .zip(counts)
        .filter(|(_, n)| *n > 0)
        .map(|(k, n)| format!("{n} {k}"))
        .collect();
    let names: Vec<_> = dataset.named_graphs().collect();
    let mut out = format!("{}, {}\n", plural(written, "statement"), plural(names.len(), "named graph"));
    if !kinds.is_empty() {
        out.push_str(&format!("kinds: {}\n", kinds.join(", ")));
    }
    out.push_str(&format!("max depth: {max_depth}\n"));
    if derived > 0 {
        out.push_str(&format!("collection statements: {derived}\n"));
    }
    for (name, graph) in names {
        out.push_str(&format!("graph {name}: {}\n", plural(graph.len(), "statement")));
    }
    out
}

fn inspect(args: InspectArgs, io: &mut Io<'_>) -> Result<i32, String> {
    let dataset = load(&args.input, io)?;
    write_output("-", &describe(&dataset), io)?;
    Ok(EXIT_OK)
}
