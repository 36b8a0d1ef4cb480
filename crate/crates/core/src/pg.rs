//! Labeled property graphs: nodes and edges with label sets and key/value
//! properties, identified by deterministic string ids.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgError {
    #[error("identity key must not be empty")]
    EmptyIdentityKey,
    #[error("property {key:?} of {id} would change from {existing} to {new}")]
    PropertyConflict {
        id: String,
        key: String,
        existing: PropertyValue,
        new: PropertyValue,
    },
    #[error("edge endpoint {0} does not exist")]
    DanglingEndpoint(String),
    #[error("list properties cannot contain lists")]
    NestedList,
    #[error("list elements must share one kind (found {0} and {1})")]
    MixedList(ValueKind, ValueKind),
    #[error("invalid {kind} value {value:?}")]
    InvalidValue { kind: ValueKind, value: String },
}

/// An exact decimal number kept as a canonical lexical form.
///
/// Canonical means: no exponent, no leading zeros in the integer part, no
/// trailing zeros in the fraction, no `+` sign and no negative zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decimal {
    lexical: String,
    scale: u32,
}

impl Decimal {
    /// Accepts `[+-]? digits ('.' digits)? ([eE] [+-]? digits)?` with at least
    /// one digit in the mantissa.
    pub fn parse(input: &str) -> Option<Decimal> {
        let (negative, rest) = match input.as_bytes().first()? {
            b'-' => (true, &input[1..]),
            b'+' => (false, &input[1..]),
            _ => (false, input),
        };
        let (mantissa, exponent) = match rest.find(['e', 'E']) {
            Some(i) => {
                let exp: i64 = rest[i + 1..].parse().ok()?;
                if !rest[i + 1..].trim_start_matches(['+', '-']).bytes().all(|b| b.is_ascii_digit()) {
                    return None;
                }
                (&rest[..i], exp)
            }
            None => (rest, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return None;
        }
        // keep pathological exponents from allocating huge strings
        if exponent.unsigned_abs() > 4096 {
            return None;
        }
        let digits: String = format!("{int_part}{frac_part}");
        let point = int_part.len() as i64 + exponent;
        let (int_digits, frac_digits) = if point <= 0 {
            (String::new(), format!("{}{}", "0".repeat((-point) as usize), digits))
        } else if point as usize >= digits.len() {
            (format!("{}{}", digits, "0".repeat(point as usize - digits.len())), String::new())
        } else {
            (digits[..point as usize].to_owned(), digits[point as usize..].to_owned())
        };
        let int_digits = int_digits.trim_start_matches('0');
        let frac_digits = frac_digits.trim_end_matches('0');
        let int_digits = if int_digits.is_empty() { "0" } else { int_digits };
        let zero = int_digits == "0" && frac_digits.is_empty();
        let mut lexical = String::new();
        if negative && !zero {
            lexical.push('-');
        }
        lexical.push_str(int_digits);
        if !frac_digits.is_empty() {
            lexical.push('.');
            lexical.push_str(frac_digits);
        }
        Some(Decimal {
            lexical,
            scale: frac_digits.len() as u32,
        })
    }

    pub fn from_i64(value: i64) -> Decimal {
        Decimal {
            lexical: value.to_string(),
            scale: 0,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.lexical
    }

    /// Number of digits after the decimal point.
    pub fn scale(&self) -> u32 {
        self.scale
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    String,
    Integer,
    Decimal,
    Boolean,
    Date,
    List,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ValueKind::String => "string",
            ValueKind::Integer => "integer",
            ValueKind::Decimal => "decimal",
            ValueKind::Boolean => "boolean",
            ValueKind::Date => "date",
            ValueKind::List => "list",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropertyValue {
    String(String),
    Integer(i64),
    Decimal(Decimal),
    Boolean(bool),
    /// ISO-8601 calendar date, optionally with a timezone.
    Date(String),
    /// Homogeneous, never nested.
    List(Vec<PropertyValue>),
}

impl PropertyValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            PropertyValue::String(_) => ValueKind::String,
            PropertyValue::Integer(_) => ValueKind::Integer,
            PropertyValue::Decimal(_) => ValueKind::Decimal,
            PropertyValue::Boolean(_) => ValueKind::Boolean,
            PropertyValue::Date(_) => ValueKind::Date,
            PropertyValue::List(_) => ValueKind::List,
        }
    }

    /// Validates list invariants.
    pub fn list(items: Vec<PropertyValue>) -> Result<PropertyValue, PgError> {
        let mut kind = None;
        for item in &items {
            let k = item.kind();
            if k == ValueKind::List {
                return Err(PgError::NestedList);
            }
            match kind {
                None => kind = Some(k),
                Some(first) if first != k => return Err(PgError::MixedList(first, k)),
                _ => {}
            }
        }
        Ok(PropertyValue::List(items))
    }

    /// Builds a list from scalars of possibly different kinds. Integers mixed
    /// with decimals become decimals; any other mix becomes strings.
    pub fn homogeneous_list(items: Vec<PropertyValue>) -> PropertyValue {
        let kinds: BTreeSet<ValueKind> = items.iter().map(PropertyValue::kind).collect();
        if kinds.len() <= 1 {
            return PropertyValue::List(items);
        }
        let numeric = kinds.iter().all(|k| matches!(k, ValueKind::Integer | ValueKind::Decimal));
        let items = items
            .into_iter()
            .map(|v| match (numeric, v) {
                (true, PropertyValue::Integer(i)) => PropertyValue::Decimal(Decimal::from_i64(i)),
                (true, v) => v,
                (false, v) => PropertyValue::String(v.lexical()),
            })
            .collect();
        PropertyValue::List(items)
    }

    /// Lexical rendering of a scalar; list elements joined with spaces.
    pub fn lexical(&self) -> String {
        match self {
            PropertyValue::String(s) | PropertyValue::Date(s) => s.clone(),
            PropertyValue::Integer(i) => i.to_string(),
            PropertyValue::Decimal(d) => d.as_str().to_owned(),
            PropertyValue::Boolean(b) => b.to_string(),
            PropertyValue::List(items) => items.iter().map(PropertyValue::lexical).collect::<Vec<_>>().join(" "),
        }
    }

    /// Number of scalar values: list length for lists, else 1.
    pub fn arity(&self) -> usize {
        match self {
            PropertyValue::List(items) => items.len(),
            _ => 1,
        }
    }

    /// Unambiguous encoding used for edge id hashing.
    fn write_canonical(&self, out: &mut String) {
        use fmt::Write;
        match self {
            PropertyValue::List(items) => {
                let _ = write!(out, "l{}[", items.len());
                for item in items {
                    item.write_canonical(out);
                }
                out.push(']');
            }
            scalar => {
                let tag = match scalar.kind() {
                    ValueKind::String => 's',
                    ValueKind::Integer => 'i',
                    ValueKind::Decimal => 'd',
                    ValueKind::Boolean => 'b',
                    ValueKind::Date => 't',
                    ValueKind::List => unreachable!(),
                };
                let lex = scalar.lexical();
                let _ = write!(out, "{tag}{}:{lex}", lex.len());
            }
        }
    }
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::String(s) => write!(f, "{s:?}"),
            PropertyValue::Date(s) => write!(f, "date({s})"),
            PropertyValue::List(items) => {
                f.write_str("[")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    item.fmt(f)?;
                }
                f.write_str("]")
            }
            other => f.write_str(&other.lexical()),
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(value: &str) -> Self {
        PropertyValue::String(value.to_owned())
    }
}

impl From<String> for PropertyValue {
    fn from(value: String) -> Self {
        PropertyValue::String(value)
    }
}

impl From<i64> for PropertyValue {
    fn from(value: i64) -> Self {
        PropertyValue::Integer(value)
    }
}

impl From<bool> for PropertyValue {
    fn from(value: bool) -> Self {
        PropertyValue::Boolean(value)
    }
}

impl From<Decimal> for PropertyValue {
    fn from(value: Decimal) -> Self {
        PropertyValue::Decimal(value)
    }
}

pub type Properties = BTreeMap<String, PropertyValue>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub labels: BTreeSet<String>,
    pub properties: Properties,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub source: String,
    pub target: String,
    pub labels: BTreeSet<String>,
    pub properties: Properties,
}

/// Node id for an identity key.
pub fn node_id(identity_key: &str) -> String {
    format!("n:{identity_key}")
}

/// Edge id: a digest of endpoints, sorted labels and sorted properties.
pub fn edge_id(source: &str, target: &str, labels: &BTreeSet<String>, properties: &Properties) -> String {
    let mut buf = String::new();
    for part in [source, target] {
        buf.push_str(&part.len().to_string());
        buf.push(':');
        buf.push_str(part);
    }
    buf.push_str(&format!("L{}", labels.len()));
    for label in labels {
        buf.push_str(&format!("{}:{label}", label.len()));
    }
    buf.push_str(&format!("P{}", properties.len()));
    for (key, value) in properties {
        buf.push_str(&format!("{}:{key}", key.len()));
        value.write_canonical(&mut buf);
    }
    let digest = Sha256::digest(buf.as_bytes());
    let hex: String = digest[..16].iter().map(|b| format!("{b:02x}")).collect();
    format!("e:{hex}")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PropertyGraph {
    nodes: BTreeMap<String, Node>,
    edges: BTreeMap<String, Edge>,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts the node for `identity_key` or merges labels and properties
    /// into the existing one. An existing property is never overwritten with
    /// a different value.
    pub fn upsert_node(
        &mut self,
        identity_key: &str,
        labels: impl IntoIterator<Item = String>,
        properties: Properties,
    ) -> Result<String, PgError> {
        if identity_key.is_empty() {
            return Err(PgError::EmptyIdentityKey);
        }
        let id = node_id(identity_key);
        if let Some(node) = self.nodes.get(&id) {
            for (key, value) in &properties {
                if let Some(existing) = node.properties.get(key) {
                    if existing != value {
                        return Err(PgError::PropertyConflict {
                            id,
                            key: key.clone(),
                            existing: existing.clone(),
                            new: value.clone(),
                        });
                    }
                }
            }
        }
        let node = self.nodes.entry(id.clone()).or_insert_with(|| Node {
            id: id.clone(),
            labels: BTreeSet::new(),
            properties: Properties::new(),
        });
        node.labels.extend(labels);
        node.properties.extend(properties);
        Ok(id)
    }

    /// Adds an edge; an identical edge (same endpoints, labels and
    /// properties) is only stored once.
    pub fn add_edge(
        &mut self,
        source: &str,
        target: &str,
        labels: impl IntoIterator<Item = String>,
        properties: Properties,
    ) -> Result<String, PgError> {
        let labels: BTreeSet<String> = labels.into_iter().collect();
        let id = edge_id(source, target, &labels, &properties);
        self.insert_edge(Edge {
            id: id.clone(),
            source: source.to_owned(),
            target: target.to_owned(),
            labels,
            properties,
        })?;
        Ok(id)
    }

    /// Inserts an edge with a caller-chosen id. Re-inserting an id replaces
    /// nothing and is not an error.
    pub fn insert_edge(&mut self, edge: Edge) -> Result<(), PgError> {
        for end in [&edge.source, &edge.target] {
            if !self.nodes.contains_key(end) {
                return Err(PgError::DanglingEndpoint(end.clone()));
            }
        }
        self.edges.entry(edge.id.clone()).or_insert(edge);
        Ok(())
    }

    /// Inserts a fully built node, replacing any node with the same id.
    pub fn insert_node(&mut self, node: Node) {
        self.nodes.insert(node.id.clone(), node);
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.get(id)
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    /// Edges in id order (see [`PropertyGraph::canonical_form`] for the
    /// serialization order).
    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.values()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    /// Nodes by id, edges by (source, labels, target, id).
    pub fn canonical_form(&self) -> CanonicalForm<'_> {
        let nodes: Vec<&Node> = self.nodes.values().collect();
        let mut edges: Vec<&Edge> = self.edges.values().collect();
        edges.sort_by(|a, b| {
            (&a.source, &a.labels, &a.target, &a.id).cmp(&(&b.source, &b.labels, &b.target, &b.id))
        });
        CanonicalForm { nodes, edges }
    }
}

/// Ordered view of a graph used by every serializer. Property maps are
/// already key-sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm<'a> {
    pub nodes: Vec<&'a Node>,
    pub edges: Vec<&'a Edge>,
}
