//! Built-in test corpus and the harness that runs it through every approach.
//!
//! Each (case, approach) pair is parsed, transformed and reduced to a
//! [`Shape`] (element counts plus the worst statement status), which is then
//! compared with the golden table in `data/expected_shapes.json`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::pg::PropertyGraph;
use crate::rdf::{Dataset, Iri, Term};
use crate::transform::{
    is_bookkeeping_key, transform, Approach, MultiValuePolicy, NamedGraphPolicy, ListPolicy, TransformConfig,
    TransformReport, UnitStatus,
};
use crate::turtle::{ParseError, TurtleStarParser};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TestCase {
    pub id: &'static str,
    pub title: &'static str,
    pub source: &'static str,
    pub statement_count: usize,
}

impl TestCase {
    /// Parses the source with the case id as blank-node scope.
    pub fn parse(&self) -> Result<Dataset, ParseError> {
        TurtleStarParser::new().with_scope(format!("case{}", self.id)).parse(self.source)
    }

    /// File name the source is shipped under.
    pub fn file_name(&self) -> String {
        let ext = if self.id == "6" { "trigs" } else { "ttls" };
        format!("case{}.{ext}", self.id)
    }
}

macro_rules! corpus {
    ($(($id:literal, $file:literal, $count:literal, $title:literal)),+ $(,)?) => {
        [$(TestCase {
            id: $id,
            title: $title,
            source: include_str!(concat!("../data/corpus/", $file)),
            statement_count: $count,
        }),+]
    };
}

static CORPUS: [TestCase; 23] = corpus![
    ("1", "case1.ttls", 1, "Standard RDF statement"),
    ("2.1", "case2.1.ttls", 3, "Predicate as subject and literal as object"),
    ("2.2", "case2.2.ttls", 2, "Predicate as subject and RDF resource as object"),
    ("2.3", "case2.3.ttls", 2, "Predicate as subject and RDF property as object (rdfs:subPropertyOf)"),
    ("2.4", "case2.4.ttls", 2, "Predicate as subject and RDF class as object (rdf:type)"),
    ("3.1", "case3.1.ttls", 4, "Datatype property statements with different data types"),
    ("3.2", "case3.2.ttls", 2, "Datatype property statements with different language tags"),
    ("4", "case4.ttls", 1, "RDF list"),
    ("5", "case5.ttls", 2, "Blank nodes"),
    ("6", "case6.trigs", 5, "Named graphs"),
    ("7", "case7.ttls", 2, "Multiple types for one resource"),
    ("8", "case8.ttls", 1, "Quoted object property statement in subject position"),
    ("9", "case9.ttls", 1, "Quoted datatype property statement in subject position"),
    ("10", "case10.ttls", 1, "Quoted object property statement in object position"),
    ("11.1", "case11.1.ttls", 1, "Asserted statement with non-literal object"),
    ("11.2", "case11.2.ttls", 2, "Asserted non-literal object that is the subject of another statement"),
    ("12.1", "case12.1.ttls", 1, "Asserted statement with rdf:type as predicate"),
    ("12.2", "case12.2.ttls", 1, "Quoted statement with rdf:type as predicate"),
    ("13", "case13.ttls", 2, "Doubly nested quoted statement in subject position"),
    ("14.1", "case14.1.ttls", 2, "Same subject and predicate with different objects"),
    ("14.2", "case14.2.ttls", 2, "Same quoted subject and predicate with different objects"),
    ("15.1", "case15.1.ttls", 2, "Identical quoted statements with different asserted statements"),
    ("15.2", "case15.2.ttls", 2, "Statement both quoted and asserted in the same graph"),
];

pub fn builtin_corpus() -> &'static [TestCase] {
    &CORPUS
}

pub fn find_case(id: &str) -> Option<&'static TestCase> {
    CORPUS.iter().find(|c| c.id == id)
}

/// Sort key for dotted case ids: "2.1" < "2.4" < "10".
pub fn case_order(id: &str) -> Vec<u32> {
    id.split('.').map(|p| p.parse().unwrap_or(u32::MAX)).collect()
}

/// Observed or expected result of one (case, approach) run. Property counts
/// skip bookkeeping keys (see [`is_bookkeeping_key`]); a list value counts
/// once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub nodes: usize,
    pub edges: usize,
    pub node_properties: usize,
    pub edge_properties: usize,
    pub status: UnitStatus,
}

impl Shape {
    pub fn observe(graph: &PropertyGraph, report: &TransformReport) -> Shape {
        let content = |props: &crate::pg::Properties| props.keys().filter(|k| !is_bookkeeping_key(k)).count();
        Shape {
            nodes: graph.node_count(),
            edges: graph.edge_count(),
            node_properties: graph.nodes().map(|n| content(&n.properties)).sum(),
            edge_properties: graph.edges().map(|e| content(&e.properties)).sum(),
            status: worst_status(report),
        }
    }
}

pub fn worst_status(report: &TransformReport) -> UnitStatus {
    if !report.errors.is_empty() {
        UnitStatus::Error
    } else if !report.ignored.is_empty() {
        UnitStatus::Ignored
    } else if !report.partial.is_empty() {
        UnitStatus::Partial
    } else {
        UnitStatus::Converted
    }
}

/// Where a golden shape comes from: read off a published rendering, or
/// worked out by hand from the algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Figure,
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedShape {
    pub case: String,
    pub approach: Approach,
    pub nodes: usize,
    pub edges: usize,
    pub node_properties: usize,
    pub edge_properties: usize,
    pub status: UnitStatus,
    pub basis: Basis,
}

impl ExpectedShape {
    pub fn shape(&self) -> Shape {
        Shape {
            nodes: self.nodes,
            edges: self.edges,
            node_properties: self.node_properties,
            edge_properties: self.edge_properties,
            status: self.status,
        }
    }
}

pub const EXPECTED_SHAPES_JSON: &str = include_str!("../data/expected_shapes.json");

/// The golden table keyed by (case id, approach).
pub fn expected_shape_table() -> &'static BTreeMap<(String, Approach), ExpectedShape> {
    static TABLE: OnceLock<BTreeMap<(String, Approach), ExpectedShape>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let rows: Vec<ExpectedShape> = serde_json::from_str(EXPECTED_SHAPES_JSON).expect("expected shape table is valid");
        rows.into_iter().map(|r| ((r.case.clone(), r.approach), r)).collect()
    })
}

/// The configuration the golden table was worked out for: approach defaults
/// for rdf:type and edge tags, graph names as edge properties, expanded
/// lists, and repeated values merged into lists.
pub fn conformance_config(approach: Approach) -> TransformConfig {
    TransformConfig {
        named_graph_policy: NamedGraphPolicy::EdgeProperty,
        list_policy: ListPolicy::Expand,
        multi_value_policy: Some(MultiValuePolicy::ListMerge),
        ..TransformConfig::new(approach)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformanceRow {
    pub case: String,
    pub approach: Approach,
    pub observed: Option<Shape>,
    pub expected: Option<Shape>,
    pub passed: bool,
    /// Human-readable reasons for a failing row.
    pub failures: Vec<String>,
    /// Statements reported partial, ignored or in error, with reasons.
    pub losses: Vec<String>,
    pub total_statements: usize,
    pub converted_statements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachAggregate {
    pub approach: Approach,
    pub total: usize,
    pub converted: usize,
    pub partial: usize,
    pub ignored: usize,
    pub errors: usize,
    pub converted_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformanceReport {
    pub rows: Vec<ConformanceRow>,
    pub aggregates: Vec<ApproachAggregate>,
}

impl ConformanceReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn aggregate(&self, approach: Approach) -> Option<&ApproachAggregate> {
        self.aggregates.iter().find(|a| a.approach == approach)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Fixed-width table, one line per row, then one aggregate line per
    /// approach. `color` wraps PASS/FAIL in ANSI codes.
    pub fn render_table(&self, color: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<6} {:<7} {:>5} {:>5} {:>6} {:>6}  {:<10} result",
            "case", "approach", "nodes", "edges", "nprops", "eprops", "status"
        );
        for row in &self.rows {
            let (n, e, np, ep, st) = match &row.observed {
                Some(s) => (
                    s.nodes.to_string(),
                    s.edges.to_string(),
                    s.node_properties.to_string(),
                    s.edge_properties.to_string(),
                    format!("{:?}", s.status),
                ),
                None => ("-".into(), "-".into(), "-".into(), "-".into(), "Error".into()),
            };
            let verdict = match (row.passed, color) {
                (true, true) => "\x1b[32mPASS\x1b[0m",
                (true, false) => "PASS",
                (false, true) => "\x1b[31mFAIL\x1b[0m",
                (false, false) => "FAIL",
            };
            let _ = write!(
                out,
                "{:<6} {:<8} {:>5} {:>5} {:>6} {:>6}  {:<10} {verdict}",
                row.case,
                row.approach.as_str(),
                n,
                e,
                np,
                ep,
                st
            );
            if !row.failures.is_empty() {
                let _ = write!(out, "  ({})", row.failures.join("; "));
            }
            out.push('\n');
        }
        for agg in &self.aggregates {
            let _ = writeln!(
                out,
                "{:<7} converted {}/{} ({:.3}), partial {}, ignored {}, errors {}",
                agg.approach.as_str(),
                agg.converted,
                agg.total,
                agg.converted_fraction,
                agg.partial,
                agg.ignored,
                agg.errors
            );
        }
        let passed = self.rows.iter().filter(|r| r.passed).count();
        let _ = writeln!(out, "{passed}/{} rows passed", self.rows.len());
        out
    }
}

/// Predicates that are also used as subjects, which makes them show up as
/// both an edge label and a node.
pub fn predicates_used_as_subjects(dataset: &Dataset) -> BTreeSet<Iri> {
    let predicates: BTreeSet<&Iri> = dataset.statements().map(|(_, s)| s.predicate()).collect();
    dataset
        .statements()
        .filter_map(|(_, s)| match s.subject() {
            Term::Iri(i) if predicates.contains(i) => Some(i.clone()),
            _ => None,
        })
        .collect()
}

/// Checks that `predicate` appears as a node (by `iri`) and as an edge (by
/// the edge's `iri`) and that the node is not connected to that edge's
/// endpoints.
pub fn check_predicate_split(graph: &PropertyGraph, predicate: &Iri) -> Result<(), String> {
    let iri = predicate.as_str();
    let node = graph
        .nodes()
        .find(|n| n.properties.get("iri").is_some_and(|v| v.lexical() == iri))
        .ok_or_else(|| format!("no node for {iri}"))?;
    let edge = graph
        .edges()
        .find(|e| e.properties.get("iri").is_some_and(|v| v.lexical() == iri))
        .ok_or_else(|| format!("no edge for {iri}"))?;
    let mut adjacency: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in graph.edges() {
        adjacency.entry(&e.source).or_default().push(&e.target);
        adjacency.entry(&e.target).or_default().push(&e.source);
    }
    let mut seen = BTreeSet::from([node.id.as_str()]);
    let mut stack = vec![node.id.as_str()];
    while let Some(cur) = stack.pop() {
        for next in adjacency.get(cur).into_iter().flatten() {
            if seen.insert(next) {
                stack.push(next);
            }
        }
    }
    if seen.contains(edge.source.as_str()) || seen.contains(edge.target.as_str()) {
        return Err(format!("node for {iri} is connected to the {iri} edge"));
    }
    Ok(())
}

fn run_one(case: &TestCase, approach: Approach, base: &TransformConfig) -> ConformanceRow {
    let expected = expected_shape_table().get(&(case.id.to_owned(), approach)).map(ExpectedShape::shape);
    let mut row = ConformanceRow {
        case: case.id.to_owned(),
        approach,
        observed: None,
        expected,
        passed: false,
        failures: Vec::new(),
        losses: Vec::new(),
        total_statements: case.statement_count,
        converted_statements: 0,
    };
    let dataset = match case.parse() {
        Ok(d) => d,
        Err(e) => {
            row.failures.push(format!("parse error: {e}"));
            row.losses.push(format!("parse error: {e}"));
            return row;
        }
    };
    let cfg = TransformConfig { approach, ..base.clone() };
    let (graph, report) = transform(&dataset, &cfg);
    let observed = Shape::observe(&graph, &report);
    row.observed = Some(observed);
    row.total_statements = report.total_statements;
    row.converted_statements = report.converted;
    for (status, entries) in [("partial", &report.partial), ("ignored", &report.ignored), ("error", &report.errors)] {
        row.losses.extend(entries.iter().map(|e| format!("{status}: {} ({})", e.statement, e.reason)));
    }

    if report.total_statements != case.statement_count {
        row.failures.push(format!(
            "{} statements counted, {} declared",
            report.total_statements, case.statement_count
        ));
    }
    match expected {
        None => row.failures.push("no expected shape".into()),
        Some(exp) => {
            let pairs = [
                ("nodes", observed.nodes, exp.nodes),
                ("edges", observed.edges, exp.edges),
                ("node properties", observed.node_properties, exp.node_properties),
                ("edge properties", observed.edge_properties, exp.edge_properties),
            ];
            for (what, got, want) in pairs {
                if got != want {
                    row.failures.push(format!("{what} {got}, expected {want}"));
                }
            }
            if observed.status != exp.status {
                row.failures.push(format!("status {:?}, expected {:?}", observed.status, exp.status));
            }
        }
    }
    if case.id.starts_with("2.") {
        let split = predicates_used_as_subjects(&dataset);
        if split.is_empty() {
            row.failures.push("no predicate is used as a subject".into());
        }
        for p in &split {
            if let Err(e) = check_predicate_split(&graph, p) {
                row.failures.push(e);
            }
        }
    }
    row.passed = row.failures.is_empty();
    row
}

/// Runs every corpus case under each approach. `base` supplies the policy
/// knobs; its `approach` field is replaced per run. Rows come back sorted by
/// case id, then approach.
pub fn run_conformance(approaches: &[Approach], base: &TransformConfig) -> ConformanceReport {
    run_cases(builtin_corpus(), approaches, base)
}

pub fn run_cases(cases: &[TestCase], approaches: &[Approach], base: &TransformConfig) -> ConformanceReport {
    let approaches: BTreeSet<Approach> = approaches.iter().copied().collect();
    let jobs: Vec<(&TestCase, Approach)> = cases
        .iter()
        .flat_map(|c| approaches.iter().map(move |a| (c, *a)))
        .collect();
    let mut rows: Vec<ConformanceRow> = jobs.par_iter().map(|(c, a)| run_one(c, *a, base)).collect();
    rows.sort_by_key(|r| (case_order(&r.case), r.approach));

    let aggregates = approaches
        .iter()
        .map(|&approach| {
            let mine: Vec<&ConformanceRow> = rows.iter().filter(|r| r.approach == approach).collect();
            let count = |prefix: &str| {
                mine.iter()
                    .flat_map(|r| &r.losses)
                    .filter(|l| l.starts_with(prefix))
                    .count()
            };
            let total: usize = mine.iter().map(|r| r.total_statements).sum();
            let converted: usize = mine.iter().map(|r| r.converted_statements).sum();
            ApproachAggregate {
                approach,
                total,
                converted,
                partial: count("partial:"),
                ignored: count("ignored:"),
                errors: count("error:") + count("parse error:"),
                converted_fraction: if total == 0 { 1.0 } else { converted as f64 / total as f64 },
            }
        })
        .collect();
    ConformanceReport { rows, aggregates }
}
