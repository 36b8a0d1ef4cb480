//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::io::Write as _;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rdfstar2pg::conformance::{builtin_corpus, conformance_config, find_case, run_conformance, worst_status};
use rdfstar2pg::export::{from_json, to_cypher, to_json};
use rdfstar2pg::isomorphism::is_isomorphic;
use rdfstar2pg::pg::PropertyGraph;
use rdfstar2pg::rdf::{classify, Dataset, Iri, Statement, StatementKind, Term};
use rdfstar2pg::transform::{
    is_bookkeeping_key, transform, Approach, MultiValuePolicy, RdfTypePolicy, TransformConfig, UnitStatus,
};
use rdfstar2pg::turtle::{write_turtle_star, TurtleStarParser};

use common::*;

const CORPUS_CASES: usize = 23;
const CORPUS_STATEMENTS: usize = 44;
const CORPUS_TIME_LIMIT: Duration = Duration::from_secs(1);
const PERMUTATIONS: usize = 100;
const PERMUTATION_TIME_LIMIT: Duration = Duration::from_secs(10);
const PROPERTY_CASES: u32 = 1000;
const MAX_GENERATED_STATEMENTS: usize = 10;
const PROPERTY_TIME_LIMIT: Duration = Duration::from_secs(60);
const CYPHER_CMD_ENV: &str = "RDFSTAR2PG_CYPHER_CMD";

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = Result<String, String>;
type Criterion = (&'static str, Box<dyn FnOnce() -> Verdict>);

fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}

fn timed(limit: Option<Duration>, body: impl FnOnce() -> Check) -> Verdict {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    match (result, limit) {
        (Err(e), _) => Verdict::Fail(e),
        (Ok(detail), Some(limit)) if elapsed >= limit => {
            Verdict::Fail(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
        }
        (Ok(detail), Some(limit)) => Verdict::Pass(format!("{detail}; {elapsed:.2?} < {limit:?}")),
        (Ok(detail), None) => Verdict::Pass(detail),
    }
}

fn run_case(id: &str, approach: Approach) -> (PropertyGraph, rdfstar2pg::transform::TransformReport) {
    let dataset = find_case(id).unwrap().parse().unwrap();
    transform(&dataset, &conformance_config(approach))
}

fn content_keys(props: &rdfstar2pg::pg::Properties) -> Vec<&String> {
    props.keys().filter(|k| !is_bookkeeping_key(k)).collect()
}

fn corpus_integrity() -> Check {
    let corpus = builtin_corpus();
    ensure(corpus.len() == CORPUS_CASES, || format!("{} cases", corpus.len()))?;
    let mut total = 0;
    for case in corpus {
        let d = case.parse().map_err(|e| format!("case {}: {e}", case.id))?;
        ensure(d.unit_count() == case.statement_count, || {
            format!("case {}: parsed {} statements, declared {}", case.id, d.unit_count(), case.statement_count)
        })?;
        total += d.unit_count();
    }
    ensure(total == CORPUS_STATEMENTS, || format!("{total} statements"))?;
    Ok(format!("{} cases, {total} statements, all parse", corpus.len()))
}

fn figure_shapes() -> Check {
    let (g, _) = run_case("1", Approach::Rpt);
    ensure((g.node_count(), g.edge_count()) == (2, 1), || format!("case 1 RPT: {}/{}", g.node_count(), g.edge_count()))?;

    let (g, _) = run_case("3.1", Approach::Rpt);
    ensure((g.node_count(), g.edge_count()) == (5, 4), || {
        format!("case 3.1 RPT: {}/{}", g.node_count(), g.edge_count())
    })?;

    let (g, _) = run_case("3.1", Approach::Pgt);
    let props: usize = g.nodes().map(|n| content_keys(&n.properties).len()).sum();
    ensure((g.node_count(), g.edge_count(), props) == (1, 0, 4), || {
        format!("case 3.1 PGT: {}/{}/{props}", g.node_count(), g.edge_count())
    })?;

    let (g, _) = run_case("9", Approach::Rpt);
    let edge = g.edges().find(|e| e.labels.contains("age")).ok_or("case 9 RPT: no age edge")?;
    ensure(edge.properties.contains_key("certainty"), || "case 9 RPT: age edge lacks certainty".into())?;

    let (g, report) = run_case("9", Approach::Pgt);
    ensure(g.node_count() == 1 && g.edge_count() == 0, || "case 9 PGT: not a single node".into())?;
    let node = g.nodes().next().unwrap();
    ensure(node.properties.contains_key("age"), || "case 9 PGT: no age property".into())?;
    ensure(worst_status(&report) == UnitStatus::Partial && report.partial.len() == 1, || {
        format!("case 9 PGT: status {:?}", worst_status(&report))
    })?;
    Ok("cases 1, 3.1 and 9 match exactly".into())
}

fn hybrid_totality() -> Check {
    let report = run_conformance(&[Approach::Hybrid], &conformance_config(Approach::Hybrid));
    let agg = report.aggregate(Approach::Hybrid).unwrap();
    ensure(agg.converted_fraction == 1.0, || format!("fraction {}", agg.converted_fraction))?;
    ensure(agg.partial == 0 && agg.ignored == 0 && agg.errors == 0, || {
        format!("partial {} ignored {} errors {}", agg.partial, agg.ignored, agg.errors)
    })?;
    ensure(report.all_passed(), || "a hybrid row failed its expected shape".into())?;
    Ok(format!("converted {}/{} = 1.0", agg.converted, agg.total))
}

/// The statements a quoted statement ultimately rests on.
fn grounds(stmt: &Statement) -> Vec<&Statement> {
    let mut out = Vec::new();
    for side in [stmt.subject(), stmt.object()] {
        if let Term::Quoted(q) = side {
            if q.is_star() {
                out.extend(grounds(q));
            } else {
                out.push(&**q);
            }
        }
    }
    out
}

/// (case, statement) pairs expected to lose information under PGT: RDF-star
/// statements resting on a quoted datatype statement.
fn predicted_pgt_losses() -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for case in builtin_corpus() {
        let d = case.parse().unwrap();
        for (_, g) in d.graphs() {
            for stmt in g.iter().filter(|s| !g.is_derived(s)) {
                for unit in stmt.star_units() {
                    if unit.is_star() && grounds(unit).iter().any(|q| classify(q) == StatementKind::DatatypeProperty) {
                        out.insert((case.id.to_owned(), unit.to_string()));
                    }
                }
            }
        }
    }
    out
}

fn observed_pgt(kind: fn(&rdfstar2pg::transform::TransformReport) -> Vec<String>) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for case in builtin_corpus() {
        let (_, report) = run_case(case.id, Approach::Pgt);
        out.extend(kind(&report).into_iter().map(|s| (case.id.to_owned(), s)));
    }
    out
}

fn loss_characterization() -> Check {
    let predicted = predicted_pgt_losses();
    let observed = observed_pgt(|r| r.partial.iter().map(|e| e.statement.clone()).collect());
    ensure(predicted == observed, || format!("predicted {predicted:?}, observed {observed:?}"))?;
    let cases: BTreeSet<&str> = observed.iter().map(|(c, _)| c.as_str()).collect();
    Ok(format!("{} partial statements in cases {cases:?}, equal to prediction", observed.len()))
}

fn coverage_fractions() -> Check {
    let report = run_conformance(&[Approach::Rpt, Approach::Pgt], &conformance_config(Approach::Hybrid));
    let rpt = report.aggregate(Approach::Rpt).unwrap();
    let pgt = report.aggregate(Approach::Pgt).unwrap();
    ensure(rpt.converted_fraction == 1.0, || format!("RPT fraction {}", rpt.converted_fraction))?;
    ensure(pgt.converted_fraction < 1.0, || format!("PGT fraction {}", pgt.converted_fraction))?;
    let shortfall = observed_pgt(|r| {
        r.partial.iter().chain(&r.ignored).chain(&r.errors).map(|e| e.statement.clone()).collect()
    });
    ensure(shortfall == predicted_pgt_losses(), || format!("PGT shortfall {shortfall:?}"))?;
    ensure(pgt.total - pgt.converted == shortfall.len(), || "shortfall count mismatch".into())?;
    Ok(format!(
        "RPT {}/{} = 1.0, PGT {}/{} = {:.3}, shortfall = predicted losses",
        rpt.converted, rpt.total, pgt.converted, pgt.total, pgt.converted_fraction
    ))
}

fn shuffled(dataset: &Dataset, rng: &mut ChaCha8Rng) -> Dataset {
    let mut items: Vec<(Option<Iri>, Statement, bool)> = dataset
        .graphs()
        .flat_map(|(name, g)| g.iter().map(move |s| (name.cloned(), s.clone(), g.is_derived(s))))
        .collect();
    items.shuffle(rng);
    let mut out = Dataset::with_scope(dataset.scope());
    for (name, stmt, derived) in items {
        if derived {
            out.insert_derived(name.as_ref(), stmt);
        } else {
            out.insert(name.as_ref(), stmt);
        }
    }
    out
}

fn determinism() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut runs = 0;
    for case in builtin_corpus() {
        let dataset = case.parse().unwrap();
        for approach in Approach::ALL {
            let cfg = conformance_config(approach);
            let baseline = to_json(&transform(&dataset, &cfg).0);
            for i in 0..PERMUTATIONS {
                let permuted = shuffled(&dataset, &mut rng);
                let out = to_json(&transform(&permuted, &cfg).0);
                ensure(out == baseline, || format!("case {} {approach} permutation {i} differs", case.id))?;
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} permuted runs byte-identical"))
}

fn property(runner: &mut TestRunner, name: &str, strategy: impl Strategy<Value = Dataset>, test: impl Fn(&Dataset) -> Result<(), String>) -> Result<(), String> {
    runner
        .run(&strategy, |d| test(&d).map_err(TestCaseError::fail))
        .map_err(|e| format!("{name}: {e}"))
}

fn plain_dataset(with_type: bool, literals: bool) -> BoxedStrategy<Dataset> {
    let stmt = if literals { plain_statement(with_type).boxed() } else { object_statement(with_type).boxed() };
    proptest::collection::vec(stmt, 0..=MAX_GENERATED_STATEMENTS)
        .prop_map(|v| dataset_of(&v))
        .boxed()
}

/// Two disjoint components: statements among r0..r2 that use ex:link, and
/// statements about ex:link itself pointing at r3/r4 or literals.
fn split_dataset() -> impl Strategy<Value = Dataset> {
    let link = ex("link");
    let left = (0..3usize, 0..3usize).prop_map(|(a, b)| (a, b));
    let right = (0..3usize, prop_oneof![(3..5usize).prop_map(Some), Just(None)], 0..7usize);
    (proptest::collection::vec(left, 1..=5), proptest::collection::vec(right, 1..=5)).prop_map(move |(l, r)| {
        let mut d = Dataset::with_scope("gen");
        for (a, b) in l {
            let s = Statement::new(ex(&format!("r{a}")), link.clone(), ex(&format!("r{b}"))).unwrap();
            d.insert(None, s);
        }
        for (p, target, lit) in r {
            let object: Term = match target {
                Some(t) => ex(&format!("r{t}")).into(),
                None => literal(lit).into(),
            };
            let s = Statement::new(link.clone(), ex(&format!("q{p}")), object).unwrap();
            d.insert(None, s);
        }
        d
    })
}

fn invariant_suite() -> Check {
    let config = Config { cases: PROPERTY_CASES, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));

    property(&mut runner, "RPT edge-count bijection", plain_dataset(true, true), |d| {
        let cfg = TransformConfig { rdf_type_policy: Some(RdfTypePolicy::AsEdge), ..TransformConfig::new(Approach::Rpt) };
        let (g, _) = transform(d, &cfg);
        ensure(g.edge_count() == d.len(), || format!("{} edges for {} statements", g.edge_count(), d.len()))
    })?;

    property(&mut runner, "PGT decomposition", plain_dataset(true, true), |d| {
        let cfg = TransformConfig {
            rdf_type_policy: Some(RdfTypePolicy::AsEdge),
            multi_value_policy: Some(MultiValuePolicy::ListMerge),
            ..TransformConfig::new(Approach::Pgt)
        };
        let (g, _) = transform(d, &cfg);
        let objects = d.statements().filter(|(_, s)| classify(s) == StatementKind::ObjectProperty).count();
        let datatypes = d.len() - objects;
        let props: usize = g
            .nodes()
            .flat_map(|n| n.properties.iter().filter(|(k, _)| !is_bookkeeping_key(k)).map(|(_, v)| v.arity()))
            .sum();
        ensure(g.edge_count() == objects, || format!("{} edges for {objects} object statements", g.edge_count()))?;
        ensure(props == datatypes, || format!("{props} property values for {datatypes} datatype statements"))
    })?;

    let link = ex("link");
    property(&mut runner, "predicate split", split_dataset(), |d| {
        for approach in Approach::ALL {
            let (g, _) = transform(d, &conformance_config(approach));
            rdfstar2pg::conformance::check_predicate_split(&g, &link).map_err(|e| format!("{approach}: {e}"))?;
        }
        Ok(())
    })?;

    property(&mut runner, "approach agreement", plain_dataset(true, false), |d| {
        for (policy, tags) in [(RdfTypePolicy::AsEdge, true), (RdfTypePolicy::AsLabel, false), (RdfTypePolicy::AsLabel, true)] {
            let out: Vec<String> = Approach::ALL
                .iter()
                .map(|&a| {
                    let cfg = TransformConfig { rdf_type_policy: Some(policy), edge_kind_tags: Some(tags), ..TransformConfig::new(a) };
                    to_json(&transform(d, &cfg).0)
                })
                .collect();
            ensure(out[0] == out[1] && out[1] == out[2], || format!("approaches disagree under {policy:?}/{tags}"))?;
        }
        Ok(())
    })?;

    property(&mut runner, "report algebra on RDF-star data", star_dataset(), |d| {
        for approach in Approach::ALL {
            let (_, r) = transform(d, &conformance_config(approach));
            ensure(r.total_statements == d.unit_count(), || format!("{approach}: total {}", r.total_statements))?;
            let sum = r.converted + r.partial.len() + r.ignored.len() + r.errors.len();
            ensure(sum == r.total_statements, || format!("{approach}: statuses sum to {sum}"))?;
            if approach == Approach::Hybrid {
                ensure(r.is_lossless(), || format!("hybrid lost information: {:?}", r.partial))?;
            }
        }
        Ok(())
    })?;

    Ok(format!("5 properties x {PROPERTY_CASES} generated datasets (<= {MAX_GENERATED_STATEMENTS} statements, depth <= 2)"))
}

fn round_trips() -> Check {
    let mut graphs = 0;
    for case in builtin_corpus() {
        let dataset = case.parse().unwrap();
        for approach in Approach::ALL {
            let (g, _) = transform(&dataset, &conformance_config(approach));
            let json = to_json(&g);
            let back = from_json(&json).map_err(|e| format!("case {} {approach}: {e}", case.id))?;
            ensure(back.canonical_form() == g.canonical_form(), || format!("case {} {approach}: graph changed", case.id))?;
            ensure(to_json(&back) == json, || format!("case {} {approach}: JSON changed", case.id))?;
            graphs += 1;
        }
        let written = write_turtle_star(&dataset);
        let reparsed = TurtleStarParser::new()
            .with_scope(dataset.scope())
            .parse(&written)
            .map_err(|e| format!("case {}: re-parse failed: {e}\n{written}", case.id))?;
        ensure(is_isomorphic(&dataset, &reparsed), || format!("case {}: not isomorphic after round-trip", case.id))?;
    }
    Ok(format!("{graphs} JSON round-trips, {} parser round-trips", builtin_corpus().len()))
}

fn cypher_smoke() -> Verdict {
    let Ok(cmd) = std::env::var(CYPHER_CMD_ENV) else {
        return Verdict::Skip(format!("set {CYPHER_CMD_ENV} to a command that loads a script from stdin and prints \"<nodes> <relationships>\""));
    };
    let (g, _) = run_case("1", Approach::Rpt);
    let script = match to_cypher(&g) {
        Ok(s) => s,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let child = Command::new("sh").arg("-c").arg(&cmd).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn();
    let mut child = match child {
        Ok(c) => c,
        Err(e) => return Verdict::Fail(format!("{cmd}: {e}")),
    };
    let _ = child.stdin.take().unwrap().write_all(script.as_bytes());
    let out = match child.wait_with_output() {
        Ok(o) => o,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let text = String::from_utf8_lossy(&out.stdout);
    let counts: Vec<usize> = text
        .lines()
        .last()
        .unwrap_or("")
        .split_whitespace()
        .filter_map(|w| w.parse().ok())
        .collect();
    if counts == [2, 1] {
        Verdict::Pass("engine reports 2 nodes, 1 relationship".into())
    } else {
        Verdict::Fail(format!("engine output {text:?}"))
    }
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("corpus integrity", Box::new(|| timed(Some(CORPUS_TIME_LIMIT), corpus_integrity))),
        ("figure-backed shapes", Box::new(|| timed(None, figure_shapes))),
        ("hybrid totality", Box::new(|| timed(None, hybrid_totality))),
        ("PGT loss characterization", Box::new(|| timed(None, loss_characterization))),
        ("coverage fractions", Box::new(|| timed(None, coverage_fractions))),
        ("permutation determinism", Box::new(|| timed(Some(PERMUTATION_TIME_LIMIT), determinism))),
        ("invariant suite", Box::new(|| timed(Some(PROPERTY_TIME_LIMIT), invariant_suite))),
        ("round-trips", Box::new(|| timed(None, round_trips))),
        ("Cypher engine smoke", Box::new(cypher_smoke)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let line = match check() {
            Verdict::Pass(d) => format!("PASS  criterion {} {name}: {d}", i + 1),
            Verdict::Skip(d) => format!("SKIP  criterion {} {name}: {d}", i + 1),
            Verdict::Fail(d) => {
                failed += 1;
                format!("FAIL  criterion {} {name}: {d}", i + 1)
            }
        };
        println!("{line}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
