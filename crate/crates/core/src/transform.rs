//! RDF-star → property graph transformations.
//!
//! Three approaches share one engine:
//!
//! * **RPT** keeps the RDF topology: every statement becomes an edge and
//!   literals become nodes.
//! * **PGT** turns datatype statements into node properties and only object
//!   statements into edges.
//! * **Hybrid** treats plain datatype statements per
//!   [`TransformConfig::hybrid_datatype_policy`] and handles quoted triples
//!   the RPT way.
//!
//! A quoted statement is materialized as an edge; statements about it become
//! properties of that edge. Under PGT a quoted datatype statement becomes a
//! node property instead, and the statement about it is dropped and reported.
//!
//! Statements are processed in sorted order, so the output does not depend on
//! the order in which a dataset was built.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::pg::{edge_id, node_id, Decimal, Edge, Node, Properties, PropertyGraph, PropertyValue};
use crate::rdf::{classify, local_name, vocab, Dataset, Iri, Literal, Statement, StatementKind, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Approach {
    #[serde(rename = "RPT")]
    Rpt,
    #[serde(rename = "PGT")]
    Pgt,
    Hybrid,
}

impl Approach {
    pub const ALL: [Approach; 3] = [Approach::Rpt, Approach::Pgt, Approach::Hybrid];

    pub fn as_str(self) -> &'static str {
        match self {
            Approach::Rpt => "RPT",
            Approach::Pgt => "PGT",
            Approach::Hybrid => "Hybrid",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DatatypePolicy {
    AsEdge,
    AsProperty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RdfTypePolicy {
    AsEdge,
    AsLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum NamedGraphPolicy {
    /// Union of all graphs; graph names are dropped (and reported).
    Merge,
    /// Each named graph gets its own node id space.
    Partition,
    /// Union of all graphs; elements remember their graph in a property.
    EdgeProperty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ListPolicy {
    Expand,
    CollapseLiterals,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MultiValuePolicy {
    ListMerge,
    LastWins,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {what} {value:?} (expected one of: {expected})")]
pub struct UnknownVariant {
    pub what: &'static str,
    pub value: String,
    pub expected: &'static str,
}

macro_rules! parse_variants {
    ($ty:ty, $what:literal, $expected:literal, { $($name:literal => $variant:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = UnknownVariant;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($variant),)+
                    _ => Err(UnknownVariant { what: $what, value: s.to_owned(), expected: $expected }),
                }
            }
        }
    };
}

parse_variants!(Approach, "approach", "rpt, pgt, hybrid", {
    "rpt" => Approach::Rpt,
    "pgt" => Approach::Pgt,
    "hybrid" => Approach::Hybrid,
});
parse_variants!(DatatypePolicy, "datatype policy", "edge, property", {
    "edge" => DatatypePolicy::AsEdge,
    "property" => DatatypePolicy::AsProperty,
});
parse_variants!(RdfTypePolicy, "rdf:type policy", "edge, label", {
    "edge" => RdfTypePolicy::AsEdge,
    "label" => RdfTypePolicy::AsLabel,
});
parse_variants!(NamedGraphPolicy, "named graph policy", "merge, partition, edge-property", {
    "merge" => NamedGraphPolicy::Merge,
    "partition" => NamedGraphPolicy::Partition,
    "edge-property" => NamedGraphPolicy::EdgeProperty,
});
parse_variants!(ListPolicy, "list policy", "expand, collapse", {
    "expand" => ListPolicy::Expand,
    "collapse" => ListPolicy::CollapseLiterals,
});
parse_variants!(MultiValuePolicy, "multi-value policy", "list-merge, last-wins", {
    "list-merge" => MultiValuePolicy::ListMerge,
    "last-wins" => MultiValuePolicy::LastWins,
});

/// Approach selection and policy knobs. `None` fields fall back to the
/// approach-specific defaults documented on each accessor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformConfig {
    pub approach: Approach,
    /// Only consulted by [`Approach::Hybrid`].
    pub hybrid_datatype_policy: DatatypePolicy,
    pub rdf_type_policy: Option<RdfTypePolicy>,
    pub named_graph_policy: NamedGraphPolicy,
    pub list_policy: ListPolicy,
    pub multi_value_policy: Option<MultiValuePolicy>,
    /// Tag edges with "ObjectProperty"/"DatatypeProperty".
    pub edge_kind_tags: Option<bool>,
}

impl TransformConfig {
    pub fn new(approach: Approach) -> Self {
        TransformConfig {
            approach,
            hybrid_datatype_policy: DatatypePolicy::AsProperty,
            rdf_type_policy: None,
            named_graph_policy: NamedGraphPolicy::EdgeProperty,
            list_policy: ListPolicy::Expand,
            multi_value_policy: None,
            edge_kind_tags: None,
        }
    }

    /// Whether plain datatype statements become node properties.
    pub fn datatype_as_property(&self) -> bool {
        match self.approach {
            Approach::Rpt => false,
            Approach::Pgt => true,
            Approach::Hybrid => self.hybrid_datatype_policy == DatatypePolicy::AsProperty,
        }
    }

    /// Default: edges for RPT, labels for PGT; Hybrid follows its datatype
    /// policy (edges with `AsEdge`, labels with `AsProperty`).
    pub fn effective_rdf_type_policy(&self) -> RdfTypePolicy {
        self.rdf_type_policy.unwrap_or(if self.datatype_as_property() {
            RdfTypePolicy::AsLabel
        } else {
            RdfTypePolicy::AsEdge
        })
    }

    /// Default: on for RPT and Hybrid, off for PGT.
    pub fn effective_edge_kind_tags(&self) -> bool {
        self.edge_kind_tags.unwrap_or(self.approach != Approach::Pgt)
    }

    /// Default: list merge for node properties, last wins for edge
    /// properties.
    pub fn effective_multi_value_policy(&self, on_edge: bool) -> MultiValuePolicy {
        self.multi_value_policy.unwrap_or(if on_edge {
            MultiValuePolicy::LastWins
        } else {
            MultiValuePolicy::ListMerge
        })
    }
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self::new(Approach::Hybrid)
    }
}

/// Per-statement outcome, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UnitStatus {
    Converted,
    Partial,
    Ignored,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub statement: String,
    pub graph: Option<String>,
    pub reason: String,
}

/// Statement-level outcome of one transformation. Every source statement
/// (including nested RDF-star statements) is counted once, at its worst
/// status; `notes` lists converted statements whose mapping needed a
/// convention worth knowing about.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TransformReport {
    pub total_statements: usize,
    pub converted: usize,
    pub notes: Vec<ReportEntry>,
    pub partial: Vec<ReportEntry>,
    pub ignored: Vec<ReportEntry>,
    pub errors: Vec<ReportEntry>,
}

impl TransformReport {
    /// `converted / total`; 1.0 for an empty input.
    pub fn converted_fraction(&self) -> f64 {
        if self.total_statements == 0 {
            1.0
        } else {
            self.converted as f64 / self.total_statements as f64
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.partial.is_empty() && self.ignored.is_empty() && self.errors.is_empty()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}

pub const REASON_PROPERTY_OF_PROPERTY: &str = "properties over other properties";
pub const REASON_GRAPH_DISCARDED: &str = "graph names discarded";
pub const REASON_OVERWRITTEN: &str = "value overwritten by another statement (last wins)";

const RESERVED_KEYS: [&str; 8] = ["iri", "bnode", "value", "datatype", "lang", "graph", "id", "_labels"];
const COMPANION_SUFFIXES: [&str; 3] = [".lang", ".datatype", ".graph"];

/// True for keys that record RDF bookkeeping rather than statement content:
/// identity (`iri`, `bnode`), literal node fields (`value`, `datatype`,
/// `lang`), graph origin, and the companion keys attached to content keys.
pub fn is_bookkeeping_key(key: &str) -> bool {
    RESERVED_KEYS.contains(&key)
        || COMPANION_SUFFIXES.iter().any(|s| key.ends_with(s))
        || key.starts_with("label.")
}

pub fn transform(dataset: &Dataset, cfg: &TransformConfig) -> (PropertyGraph, TransformReport) {
    let mut t = Transformer::new(cfg, dataset.scope());
    t.add_dataset(dataset);
    t.finish()
}

pub fn rpt(dataset: &Dataset, cfg: &TransformConfig) -> (PropertyGraph, TransformReport) {
    transform(dataset, &TransformConfig { approach: Approach::Rpt, ..cfg.clone() })
}

pub fn pgt(dataset: &Dataset, cfg: &TransformConfig) -> (PropertyGraph, TransformReport) {
    transform(dataset, &TransformConfig { approach: Approach::Pgt, ..cfg.clone() })
}

pub fn hybrid(dataset: &Dataset, cfg: &TransformConfig) -> (PropertyGraph, TransformReport) {
    transform(dataset, &TransformConfig { approach: Approach::Hybrid, ..cfg.clone() })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Step {
    predicate: Iri,
    inverse: bool,
}

type SlotId = Vec<Step>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct EdgeKey {
    scope: Option<Iri>,
    statement: Statement,
}

#[derive(Debug, Clone)]
enum Val {
    Plain(PropertyValue),
    EdgeRef(EdgeKey),
}

#[derive(Debug, Clone)]
struct Contribution {
    source: (Option<Iri>, Statement),
    value: Val,
    lang: Option<PropertyValue>,
    datatype: Option<PropertyValue>,
    graph: Option<Iri>,
    unit: Option<usize>,
}

#[derive(Debug, Default)]
struct Slots(BTreeMap<SlotId, Vec<Contribution>>);

impl Slots {
    fn add(&mut self, slot: SlotId, c: Contribution) {
        let entries = self.0.entry(slot).or_default();
        if !entries.iter().any(|e| e.source == c.source) {
            entries.push(c);
        }
    }

    fn has_ref(&self, slot: &SlotId) -> bool {
        self.0[slot].iter().any(|c| matches!(c.value, Val::EdgeRef(_)))
    }
}

#[derive(Debug)]
struct NodeAcc {
    base_labels: BTreeSet<String>,
    /// Label → graphs it was asserted in (`None` = default graph).
    labels: BTreeMap<String, BTreeSet<Option<Iri>>>,
    base: Properties,
    slots: Slots,
}

#[derive(Debug)]
struct EdgeAcc {
    source: String,
    target: String,
    labels: BTreeSet<String>,
    base: Properties,
    slots: Slots,
}

#[derive(Debug)]
struct Unit {
    statement: String,
    graph: Option<Iri>,
    status: UnitStatus,
    reasons: Vec<String>,
    notes: Vec<String>,
}

/// Incremental transformation state. Feed statements with
/// [`Transformer::add_dataset`] (or the per-statement methods), then call
/// [`Transformer::finish`].
pub struct Transformer<'c> {
    cfg: &'c TransformConfig,
    scope: String,
    nodes: BTreeMap<String, NodeAcc>,
    edges: BTreeMap<EdgeKey, EdgeAcc>,
    units: Vec<Unit>,
}

impl<'c> Transformer<'c> {
    /// `scope` qualifies blank node identities (see [`Dataset::scope`]).
    pub fn new(cfg: &'c TransformConfig, scope: &str) -> Self {
        Transformer {
            cfg,
            scope: scope.to_owned(),
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            units: Vec::new(),
        }
    }

    pub fn add_dataset(&mut self, dataset: &Dataset) {
        let quoted_blanks = quoted_blank_nodes(dataset);
        for (graph, g) in dataset.graphs() {
            let mut statements: Vec<&Statement> = g.iter().collect();
            statements.sort();
            let lists = if self.cfg.list_policy == ListPolicy::CollapseLiterals && self.cfg.datatype_as_property() {
                collapsible_lists(dataset, &statements, &quoted_blanks)
            } else {
                CollapsibleLists::default()
            };
            for stmt in statements {
                let derived = g.is_derived(stmt);
                if lists.chain.contains(stmt) {
                    if !derived {
                        let unit = self.open_unit(stmt, graph);
                        self.note(unit, "list cell folded into a list property");
                    }
                    continue;
                }
                if let Some(items) = lists.heads.get(stmt) {
                    let unit = (!derived).then(|| self.open_unit(stmt, graph));
                    self.collapsed_list(stmt, items, graph, unit);
                    continue;
                }
                if derived {
                    self.plain(stmt, graph, None);
                } else {
                    self.add_statement(stmt, graph);
                }
            }
        }
    }

    /// Processes one asserted (non-derived) statement and every nested
    /// RDF-star statement inside it, innermost first.
    pub fn add_statement(&mut self, stmt: &Statement, graph: Option<&Iri>) {
        if !stmt.is_star() {
            let unit = self.open_unit(stmt, graph);
            self.plain(stmt, graph, Some(unit));
        } else if self.cfg.approach == Approach::Pgt {
            self.pgt_star(stmt, graph);
        } else {
            self.rpt_star(stmt, graph);
        }
    }

    /// RDF-star statement, RPT style: the quoted statement becomes an edge
    /// and the asserted pair a property of it.
    pub fn rpt_star(&mut self, stmt: &Statement, graph: Option<&Iri>) {
        for inner in stmt.star_units().into_iter().rev() {
            let unit = self.open_unit(inner, graph);
            self.annotate(inner, graph, unit);
        }
    }

    /// RDF-star statement, PGT style: as [`Transformer::rpt_star`] unless the
    /// quoted statement is a datatype statement, which becomes a property of
    /// its subject node; the asserted pair is then dropped.
    pub fn pgt_star(&mut self, stmt: &Statement, graph: Option<&Iri>) {
        for inner in stmt.star_units().into_iter().rev() {
            let unit = self.open_unit(inner, graph);
            let grounds = datatype_grounds(inner);
            if grounds.is_empty() {
                self.annotate(inner, graph, unit);
                continue;
            }
            for side in [inner.subject(), inner.object()] {
                if let Term::Quoted(q) = side {
                    let ground = ground_of(q);
                    if classify(ground) == StatementKind::DatatypeProperty {
                        self.node_property(ground, graph, None);
                    } else {
                        self.anchor(q, graph);
                    }
                }
            }
            self.degrade(unit, UnitStatus::Partial, REASON_PROPERTY_OF_PROPERTY);
        }
    }

    fn open_unit(&mut self, stmt: &Statement, graph: Option<&Iri>) -> usize {
        let mut unit = Unit {
            statement: stmt.to_string(),
            graph: graph.cloned(),
            status: UnitStatus::Converted,
            reasons: Vec::new(),
            notes: Vec::new(),
        };
        if graph.is_some() && self.cfg.named_graph_policy == NamedGraphPolicy::Merge {
            unit.status = UnitStatus::Partial;
            unit.reasons.push(REASON_GRAPH_DISCARDED.to_owned());
        }
        self.units.push(unit);
        self.units.len() - 1
    }

    fn degrade(&mut self, unit: usize, status: UnitStatus, reason: &str) {
        let u = &mut self.units[unit];
        u.status = u.status.max(status);
        if !u.reasons.iter().any(|r| r == reason) {
            u.reasons.push(reason.to_owned());
        }
    }

    fn note(&mut self, unit: usize, note: impl Into<String>) {
        let note = note.into();
        let u = &mut self.units[unit];
        if !u.notes.contains(&note) {
            u.notes.push(note);
        }
    }

    fn scope_of(&self, graph: Option<&Iri>) -> Option<Iri> {
        match self.cfg.named_graph_policy {
            NamedGraphPolicy::Merge => None,
            _ => graph.cloned(),
        }
    }

    fn graph_tag(&self, graph: Option<&Iri>) -> Option<Iri> {
        match self.cfg.named_graph_policy {
            NamedGraphPolicy::EdgeProperty => graph.cloned(),
            _ => None,
        }
    }

    /// Identity key of the node for a non-quoted term.
    fn node_key(&self, term: &Term, graph: Option<&Iri>) -> String {
        let mut key = match term {
            Term::Iri(i) => format!("iri:{}", i.as_str()),
            Term::BlankNode(b) => format!("bn:{}:{}", self.scope, b.label()),
            Term::Literal(l) => format!(
                "lit:{}:{}:{}",
                l.datatype().as_str(),
                l.language().unwrap_or(""),
                l.lexical()
            ),
            Term::Quoted(_) => unreachable!("quoted triples are never nodes"),
        };
        if self.cfg.named_graph_policy == NamedGraphPolicy::Partition {
            if let Some(g) = graph {
                key.push_str("|g:");
                key.push_str(g.as_str());
            }
        }
        key
    }

    fn ensure_node(&mut self, term: &Term, graph: Option<&Iri>) -> String {
        let key = self.node_key(term, graph);
        if !self.nodes.contains_key(&key) {
            let mut base = Properties::new();
            let label = match term {
                Term::Iri(i) => {
                    base.insert("iri".into(), i.as_str().into());
                    "Resource"
                }
                Term::BlankNode(b) => {
                    base.insert("bnode".into(), b.label().into());
                    "Resource"
                }
                Term::Literal(l) => {
                    base.insert("value".into(), literal_value(l).0);
                    base.insert("datatype".into(), l.datatype().as_str().into());
                    if let Some(lang) = l.language() {
                        base.insert("lang".into(), lang.into());
                    }
                    "Literal"
                }
                Term::Quoted(_) => unreachable!("quoted triples are never nodes"),
            };
            if let (Some(g), NamedGraphPolicy::Partition) = (graph, self.cfg.named_graph_policy) {
                base.insert("graph".into(), g.as_str().into());
            }
            self.nodes.insert(
                key.clone(),
                NodeAcc {
                    base_labels: [label.to_owned()].into(),
                    labels: BTreeMap::new(),
                    base,
                    slots: Slots::default(),
                },
            );
        }
        key
    }

    /// A statement without quoted triples.
    fn plain(&mut self, stmt: &Statement, graph: Option<&Iri>, unit: Option<usize>) {
        if stmt.predicate().as_str() == vocab::RDF_TYPE
            && self.cfg.effective_rdf_type_policy() == RdfTypePolicy::AsLabel
        {
            if let Term::Iri(class) = stmt.object() {
                let key = self.ensure_node(stmt.subject(), graph);
                let tag = self.graph_tag(graph);
                self.nodes
                    .get_mut(&key)
                    .expect("node just ensured")
                    .labels
                    .entry(local_name(class).to_owned())
                    .or_default()
                    .insert(tag);
                return;
            }
        }
        if matches!(stmt.object(), Term::Literal(_)) && self.cfg.datatype_as_property() {
            self.node_property(stmt, graph, unit);
            return;
        }
        self.edge_for(stmt, graph);
    }

    /// Datatype statement as a property of its subject node.
    fn node_property(&mut self, stmt: &Statement, graph: Option<&Iri>, unit: Option<usize>) {
        let Term::Literal(lit) = stmt.object() else {
            unreachable!("datatype statement")
        };
        let key = self.ensure_node(stmt.subject(), graph);
        let (value, datatype) = literal_value(lit);
        let c = Contribution {
            source: (graph.cloned(), stmt.clone()),
            value: Val::Plain(value),
            lang: lit.language().map(PropertyValue::from),
            datatype: datatype.map(PropertyValue::from),
            graph: self.graph_tag(graph),
            unit,
        };
        let slot = vec![Step {
            predicate: stmt.predicate().clone(),
            inverse: false,
        }];
        self.nodes.get_mut(&key).expect("node just ensured").slots.add(slot, c);
    }

    /// The edge materializing a plain statement, created on first use.
    fn edge_for(&mut self, stmt: &Statement, graph: Option<&Iri>) -> EdgeKey {
        let key = EdgeKey {
            scope: self.scope_of(graph),
            statement: stmt.clone(),
        };
        if self.edges.contains_key(&key) {
            return key;
        }
        let source = self.ensure_node(stmt.subject(), graph);
        let target = self.ensure_node(stmt.object(), graph);
        let mut labels: BTreeSet<String> = [local_name(stmt.predicate()).to_owned()].into();
        if self.cfg.effective_edge_kind_tags() {
            labels.insert(classify(stmt).as_str().to_owned());
        }
        let mut base = Properties::new();
        base.insert("iri".into(), stmt.predicate().as_str().into());
        if let Some(g) = self.scope_of(graph) {
            base.insert("graph".into(), g.as_str().into());
        }
        self.edges.insert(
            key.clone(),
            EdgeAcc {
                source,
                target,
                labels,
                base,
                slots: Slots::default(),
            },
        );
        key
    }

    /// The edge that statements about `stmt` attach to, and the key path
    /// leading to it from that edge.
    fn anchor(&mut self, stmt: &Statement, graph: Option<&Iri>) -> (EdgeKey, SlotId) {
        match (stmt.subject(), stmt.object()) {
            (Term::Quoted(inner), _) => {
                let (edge, mut path) = self.anchor(inner, graph);
                path.push(Step {
                    predicate: stmt.predicate().clone(),
                    inverse: false,
                });
                (edge, path)
            }
            (_, Term::Quoted(inner)) => {
                let (edge, mut path) = self.anchor(inner, graph);
                path.push(Step {
                    predicate: stmt.predicate().clone(),
                    inverse: true,
                });
                (edge, path)
            }
            _ => (self.edge_for(stmt, graph), Vec::new()),
        }
    }

    /// Attaches the asserted pair of an RDF-star statement to the edge of
    /// the statement it quotes.
    fn annotate(&mut self, stmt: &Statement, graph: Option<&Iri>, unit: usize) {
        let p = stmt.predicate().clone();
        let source = (graph.cloned(), stmt.clone());
        let tag = self.graph_tag(graph);
        match (stmt.subject(), stmt.object()) {
            (Term::Quoted(s), Term::Quoted(o)) => {
                let (se, mut spath) = self.anchor(s, graph);
                let (oe, mut opath) = self.anchor(o, graph);
                if !spath.is_empty() || !opath.is_empty() {
                    self.note(unit, "nested annotation flattened into a dotted key");
                }
                spath.push(Step { predicate: p.clone(), inverse: false });
                opath.push(Step { predicate: p, inverse: true });
                let forward = Contribution {
                    source: source.clone(),
                    value: Val::EdgeRef(oe.clone()),
                    lang: None,
                    datatype: None,
                    graph: None,
                    unit: Some(unit),
                };
                let backward = Contribution {
                    value: Val::EdgeRef(se.clone()),
                    ..forward.clone()
                };
                self.edges.get_mut(&se).expect("anchored").slots.add(spath, forward);
                self.edges.get_mut(&oe).expect("anchored").slots.add(opath, backward);
                self.note(unit, "quoted triples on both sides linked by edge id references");
            }
            (Term::Quoted(s), object) => {
                let (edge, mut path) = self.anchor(s, graph);
                if !path.is_empty() {
                    self.note(unit, "nested annotation flattened into a dotted key");
                }
                path.push(Step { predicate: p, inverse: false });
                let (value, lang, datatype) = match object {
                    Term::Literal(l) => {
                        let (v, dt) = literal_value(l);
                        (v, l.language().map(PropertyValue::from), dt.map(PropertyValue::from))
                    }
                    Term::Iri(i) => {
                        self.note(unit, "IRI object stored as a string property");
                        (i.as_str().into(), None, None)
                    }
                    Term::BlankNode(b) => {
                        self.note(unit, "blank node object stored as a string property");
                        (format!("_:{}", b.label()).into(), None, None)
                    }
                    Term::Quoted(_) => unreachable!("handled above"),
                };
                let c = Contribution {
                    source,
                    value: Val::Plain(value),
                    lang,
                    datatype,
                    graph: None,
                    unit: Some(unit),
                };
                self.edges.get_mut(&edge).expect("anchored").slots.add(path, c);
            }
            (subject, Term::Quoted(o)) => {
                let (edge, mut path) = self.anchor(o, graph);
                path.push(Step {
                    predicate: p.clone(),
                    inverse: true,
                });
                let subject_value: PropertyValue = match subject {
                    Term::Iri(i) => i.as_str().into(),
                    Term::BlankNode(b) => format!("_:{}", b.label()).into(),
                    _ => unreachable!("subject is a resource"),
                };
                let back = Contribution {
                    source: source.clone(),
                    value: Val::Plain(subject_value),
                    lang: None,
                    datatype: None,
                    graph: None,
                    unit: Some(unit),
                };
                self.edges.get_mut(&edge).expect("anchored").slots.add(path, back);
                let node = self.ensure_node(subject, graph);
                let forward = Contribution {
                    source,
                    value: Val::EdgeRef(edge),
                    lang: None,
                    datatype: None,
                    graph: tag,
                    unit: Some(unit),
                };
                let slot = vec![Step { predicate: p, inverse: false }];
                self.nodes.get_mut(&node).expect("node just ensured").slots.add(slot, forward);
                self.note(unit, "quoted triple in object position stored under an inverse key");
            }
            _ => unreachable!("annotate is only called for RDF-star statements"),
        }
    }

    fn collapsed_list(&mut self, stmt: &Statement, items: &[Literal], graph: Option<&Iri>, unit: Option<usize>) {
        let key = self.ensure_node(stmt.subject(), graph);
        let mut values = Vec::new();
        let mut langs = Vec::new();
        let mut datatypes = Vec::new();
        for lit in items {
            let (v, dt) = literal_value(lit);
            values.push(v);
            langs.push(lit.language().map(str::to_owned));
            datatypes.push(dt);
        }
        let companion = |entries: Vec<Option<String>>| {
            entries.iter().any(Option::is_some).then(|| {
                PropertyValue::List(entries.into_iter().map(|e| e.unwrap_or_default().into()).collect())
            })
        };
        let c = Contribution {
            source: (graph.cloned(), stmt.clone()),
            value: Val::Plain(PropertyValue::homogeneous_list(values)),
            lang: companion(langs),
            datatype: companion(datatypes),
            graph: self.graph_tag(graph),
            unit,
        };
        let slot = vec![Step {
            predicate: stmt.predicate().clone(),
            inverse: false,
        }];
        self.nodes.get_mut(&key).expect("node just ensured").slots.add(slot, c);
        if let Some(unit) = unit {
            self.note(unit, "literal list collapsed into a list property");
        }
    }

    pub fn finish(mut self) -> (PropertyGraph, TransformReport) {
        // Edge ids hash everything except reference-valued slots, which may
        // point at each other.
        let mut edge_ids: HashMap<EdgeKey, String> = HashMap::new();
        for (key, acc) in &self.edges {
            let keys = slot_keys(&acc.slots);
            let mut props = acc.base.clone();
            for slot in acc.slots.0.keys() {
                if !acc.slots.has_ref(slot) {
                    let policy = self.cfg.effective_multi_value_policy(true);
                    let (rendered, _) = render_slot(&keys[slot], &acc.slots.0[slot], policy, &HashMap::new());
                    props.extend(rendered);
                }
            }
            let source = node_id(&acc.source);
            let target = node_id(&acc.target);
            edge_ids.insert(key.clone(), edge_id(&source, &target, &acc.labels, &props));
        }

        let mut graph = PropertyGraph::new();
        let mut overwritten: Vec<usize> = Vec::new();
        for (key, acc) in &self.nodes {
            let mut properties = acc.base.clone();
            let keys = slot_keys(&acc.slots);
            let policy = self.cfg.effective_multi_value_policy(false);
            for (slot, contributions) in &acc.slots.0 {
                let (rendered, lost) = render_slot(&keys[slot], contributions, policy, &edge_ids);
                properties.extend(rendered);
                overwritten.extend(lost);
            }
            let mut labels = acc.base_labels.clone();
            for (label, graphs) in &acc.labels {
                labels.insert(label.clone());
                if graphs.iter().any(Option::is_some) {
                    properties.insert(format!("label.{label}.graph"), graph_companion(graphs.iter()));
                }
            }
            graph.insert_node(Node {
                id: node_id(key),
                labels,
                properties,
            });
        }
        for (key, acc) in &self.edges {
            let mut properties = acc.base.clone();
            let keys = slot_keys(&acc.slots);
            let policy = self.cfg.effective_multi_value_policy(true);
            for (slot, contributions) in &acc.slots.0 {
                let (rendered, lost) = render_slot(&keys[slot], contributions, policy, &edge_ids);
                properties.extend(rendered);
                overwritten.extend(lost);
            }
            let edge = Edge {
                id: edge_ids[key].clone(),
                source: node_id(&acc.source),
                target: node_id(&acc.target),
                labels: acc.labels.clone(),
                properties,
            };
            graph.insert_edge(edge).expect("endpoints are created before edges");
        }
        for unit in overwritten {
            self.degrade(unit, UnitStatus::Partial, REASON_OVERWRITTEN);
        }

        let mut report = TransformReport {
            total_statements: self.units.len(),
            ..TransformReport::default()
        };
        for unit in self.units {
            let entry = |reasons: &[String]| ReportEntry {
                statement: unit.statement.clone(),
                graph: unit.graph.as_ref().map(|g| g.as_str().to_owned()),
                reason: reasons.join("; "),
            };
            match unit.status {
                UnitStatus::Converted => {
                    report.converted += 1;
                    if !unit.notes.is_empty() {
                        report.notes.push(entry(&unit.notes));
                    }
                }
                UnitStatus::Partial => report.partial.push(entry(&unit.reasons)),
                UnitStatus::Ignored => report.ignored.push(entry(&unit.reasons)),
                UnitStatus::Error => report.errors.push(entry(&unit.reasons)),
            }
        }
        (graph, report)
    }
}

/// Property value for a literal, plus a datatype companion when the value
/// kind alone does not determine the literal's datatype.
fn literal_value(lit: &Literal) -> (PropertyValue, Option<String>) {
    let dt = lit.datatype().as_str();
    let lex = lit.lexical();
    let value = match dt {
        vocab::XSD_STRING | vocab::RDF_LANG_STRING => return (lex.into(), None),
        vocab::XSD_INTEGER => lex
            .parse::<i64>()
            .ok()
            .filter(|_| !lex.starts_with('+'))
            .map(PropertyValue::Integer)
            .or_else(|| Decimal::parse(lex).filter(|d| d.scale() == 0).map(PropertyValue::Decimal)),
        vocab::XSD_DECIMAL | vocab::XSD_DOUBLE | vocab::XSD_FLOAT => Decimal::parse(lex).map(PropertyValue::Decimal),
        vocab::XSD_BOOLEAN => match lex {
            "true" => Some(PropertyValue::Boolean(true)),
            "false" => Some(PropertyValue::Boolean(false)),
            _ => None,
        },
        vocab::XSD_DATE if is_iso_date(lex) => Some(PropertyValue::Date(lex.to_owned())),
        _ => None,
    };
    match value {
        Some(v) => {
            let canonical = match v {
                PropertyValue::Integer(_) => vocab::XSD_INTEGER,
                PropertyValue::Decimal(_) => vocab::XSD_DECIMAL,
                PropertyValue::Boolean(_) => vocab::XSD_BOOLEAN,
                PropertyValue::Date(_) => vocab::XSD_DATE,
                _ => vocab::XSD_STRING,
            };
            let companion = (canonical != dt).then(|| dt.to_owned());
            (v, companion)
        }
        None => (lex.into(), Some(dt.to_owned())),
    }
}

/// `YYYY-MM-DD` with an optional `Z` or `±hh:mm` zone; years may be longer
/// than four digits and negative.
fn is_iso_date(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let (date, zone) = if let Some(d) = body.strip_suffix('Z') {
        (d, "")
    } else if body.len() > 6
        && matches!(body.as_bytes()[body.len() - 6], b'+' | b'-')
        && body.as_bytes()[body.len() - 3] == b':'
    {
        body.split_at(body.len() - 6)
    } else {
        (body, "")
    };
    let parts: Vec<&str> = date.split('-').collect();
    let digits = |p: &str, n: usize| p.len() >= n && p.bytes().all(|b| b.is_ascii_digit());
    let date_ok = parts.len() == 3
        && digits(parts[0], 4)
        && (parts[0].len() == 4 || !parts[0].starts_with('0'))
        && parts[1].len() == 2
        && digits(parts[1], 2)
        && parts[2].len() == 2
        && digits(parts[2], 2)
        && (1..=12).contains(&parts[1].parse::<u32>().unwrap_or(0))
        && (1..=31).contains(&parts[2].parse::<u32>().unwrap_or(0));
    let zone_ok = zone.is_empty() || {
        let z = &zone[1..];
        z.len() == 5 && z.as_bytes()[2] == b':' && digits(&z[..2], 2) && digits(&z[3..], 2)
    };
    date_ok && zone_ok
}

fn short_key(slot: &SlotId) -> String {
    slot.iter()
        .map(|s| format!("{}{}", if s.inverse { "inv:" } else { "" }, local_name(&s.predicate)))
        .collect::<Vec<_>>()
        .join(".")
}

fn long_key(slot: &SlotId) -> String {
    slot.iter()
        .map(|s| format!("{}{}", if s.inverse { "inv:" } else { "" }, s.predicate.as_str()))
        .collect::<Vec<_>>()
        .join(".")
}

/// Property key per slot: the local-name form unless that is reserved or
/// shared with another slot on the same element.
fn slot_keys(slots: &Slots) -> HashMap<SlotId, String> {
    let mut count: HashMap<String, usize> = HashMap::new();
    for slot in slots.0.keys() {
        *count.entry(short_key(slot)).or_default() += 1;
    }
    slots
        .0
        .keys()
        .map(|slot| {
            let short = short_key(slot);
            let key = if count[&short] > 1 || is_bookkeeping_key(&short) {
                long_key(slot)
            } else {
                short
            };
            (slot.clone(), key)
        })
        .collect()
}

fn resolve(value: &Val, edge_ids: &HashMap<EdgeKey, String>) -> PropertyValue {
    match value {
        Val::Plain(v) => v.clone(),
        Val::EdgeRef(k) => edge_ids.get(k).cloned().unwrap_or_default().into(),
    }
}

fn graph_companion<'a>(graphs: impl Iterator<Item = &'a Option<Iri>>) -> PropertyValue {
    let names: Vec<PropertyValue> = graphs
        .map(|g| g.as_ref().map(|g| g.as_str().to_owned()).unwrap_or_default().into())
        .collect();
    if names.len() == 1 {
        names.into_iter().next().expect("one element")
    } else {
        PropertyValue::List(names)
    }
}

/// Renders one slot into its property and companion keys. Returns the units
/// whose values were dropped by the last-wins policy.
fn render_slot(
    key: &str,
    contributions: &[Contribution],
    policy: MultiValuePolicy,
    edge_ids: &HashMap<EdgeKey, String>,
) -> (Properties, Vec<usize>) {
    let (chosen, lost): (&[Contribution], Vec<usize>) = match policy {
        MultiValuePolicy::LastWins if contributions.len() > 1 => {
            let (winner, rest) = contributions.split_last().expect("non-empty");
            (std::slice::from_ref(winner), rest.iter().filter_map(|c| c.unit).collect())
        }
        _ => (contributions, Vec::new()),
    };
    let mut props = Properties::new();
    if let [single] = chosen {
        props.insert(key.to_owned(), resolve(&single.value, edge_ids));
        if let Some(lang) = &single.lang {
            props.insert(format!("{key}.lang"), lang.clone());
        }
        if let Some(dt) = &single.datatype {
            props.insert(format!("{key}.datatype"), dt.clone());
        }
        if let Some(g) = &single.graph {
            props.insert(format!("{key}.graph"), g.as_str().into());
        }
        return (props, lost);
    }
    let values = chosen.iter().map(|c| resolve(&c.value, edge_ids)).collect();
    props.insert(key.to_owned(), PropertyValue::homogeneous_list(values));
    let companion = |get: &dyn Fn(&Contribution) -> Option<String>| {
        let entries: Vec<Option<String>> = chosen.iter().map(get).collect();
        entries
            .iter()
            .any(Option::is_some)
            .then(|| PropertyValue::List(entries.into_iter().map(|e| e.unwrap_or_default().into()).collect()))
    };
    if let Some(v) = companion(&|c| c.lang.as_ref().map(PropertyValue::lexical)) {
        props.insert(format!("{key}.lang"), v);
    }
    if let Some(v) = companion(&|c| c.datatype.as_ref().map(PropertyValue::lexical)) {
        props.insert(format!("{key}.datatype"), v);
    }
    if let Some(v) = companion(&|c| c.graph.as_ref().map(|g| g.as_str().to_owned())) {
        props.insert(format!("{key}.graph"), v);
    }
    (props, lost)
}

/// The plain statement at the bottom of a chain of quoted subjects (or
/// objects, when the subject is not quoted).
fn ground_of(stmt: &Statement) -> &Statement {
    match (stmt.subject(), stmt.object()) {
        (Term::Quoted(inner), _) | (_, Term::Quoted(inner)) => ground_of(inner),
        _ => stmt,
    }
}

/// Datatype statements quoted (transitively) by `stmt`.
fn datatype_grounds(stmt: &Statement) -> Vec<&Statement> {
    [stmt.subject(), stmt.object()]
        .into_iter()
        .filter_map(Term::as_quoted)
        .map(ground_of)
        .filter(|g| classify(g) == StatementKind::DatatypeProperty)
        .collect()
}

/// Blank nodes occurring inside any quoted triple of the dataset.
fn quoted_blank_nodes(dataset: &Dataset) -> HashSet<Term> {
    fn walk(term: &Term, inside: bool, out: &mut HashSet<Term>) {
        match term {
            Term::BlankNode(_) if inside => {
                out.insert(term.clone());
            }
            Term::Quoted(s) => {
                walk(s.subject(), true, out);
                walk(s.object(), true, out);
            }
            _ => {}
        }
    }
    let mut out = HashSet::new();
    for (_, stmt) in dataset.statements() {
        walk(stmt.subject(), false, &mut out);
        walk(stmt.object(), false, &mut out);
    }
    out
}

#[derive(Default)]
struct CollapsibleLists {
    /// `(s p head)` → list items.
    heads: HashMap<Statement, Vec<Literal>>,
    /// rdf:first / rdf:rest statements folded into a head.
    chain: HashSet<Statement>,
}

/// Finds well-formed all-literal lists in one graph whose cells are not
/// referenced anywhere else and whose (subject, predicate) pair is unique in
/// the dataset, so that the list can become a single property value.
fn collapsible_lists(dataset: &Dataset, statements: &[&Statement], quoted: &HashSet<Term>) -> CollapsibleLists {
    let first = vocab::RDF_FIRST;
    let rest = vocab::RDF_REST;
    let mut by_subject: HashMap<&Term, Vec<&Statement>> = HashMap::new();
    let mut by_object: HashMap<&Term, Vec<&Statement>> = HashMap::new();
    for &s in statements {
        by_subject.entry(s.subject()).or_default().push(s);
        by_object.entry(s.object()).or_default().push(s);
    }
    let mut pair_count: HashMap<(&Term, &Iri), usize> = HashMap::new();
    for (_, s) in dataset.statements() {
        *pair_count.entry((s.subject(), s.predicate())).or_default() += 1;
    }
    let mut out = CollapsibleLists::default();
    for &head_stmt in statements {
        let head = head_stmt.object();
        if !matches!(head, Term::BlankNode(_))
            || head_stmt.is_star()
            || matches!(head_stmt.predicate().as_str(), vocab::RDF_FIRST | vocab::RDF_REST)
            || pair_count.get(&(head_stmt.subject(), head_stmt.predicate())) != Some(&1)
        {
            continue;
        }
        let mut items = Vec::new();
        let mut chain = Vec::new();
        let mut seen = HashSet::new();
        let mut cell = head;
        let ok = loop {
            if !seen.insert(cell) || quoted.contains(cell) {
                break false;
            }
            let incoming = by_object.get(cell).map(Vec::len).unwrap_or(0);
            let outgoing = by_subject.get(cell).map(Vec::as_slice).unwrap_or(&[]);
            if incoming != 1 || outgoing.len() != 2 {
                break false;
            }
            let f = outgoing.iter().find(|s| s.predicate().as_str() == first);
            let r = outgoing.iter().find(|s| s.predicate().as_str() == rest);
            let (Some(f), Some(r)) = (f, r) else { break false };
            let Term::Literal(lit) = f.object() else { break false };
            items.push(lit.clone());
            chain.push((*f).clone());
            chain.push((*r).clone());
            match r.object() {
                Term::Iri(i) if i.as_str() == vocab::RDF_NIL => break true,
                next @ Term::BlankNode(_) => cell = next,
                _ => break false,
            }
        };
        if ok {
            out.heads.insert(head_stmt.clone(), items);
            out.chain.extend(chain);
        }
    }
    out
}
