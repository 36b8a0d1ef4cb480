//! RDF-star terms, statements and datasets.
//!
//! Terms are immutable values; a [`Statement`] may quote other statements in
//! its subject or object position to arbitrary (finite) depth. A [`Dataset`]
//! holds a default graph and any number of named graphs, each with set
//! semantics and insertion order preserved for display.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

/// Well-known vocabulary IRIs.
pub mod vocab {
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

    pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
    pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
    pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
    pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

    pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const XSD_FLOAT: &str = "http://www.w3.org/2001/XMLSchema#float";
    pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const XSD_DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("not an absolute IRI: {0:?}")]
    InvalidIri(String),
    #[error("a literal cannot be the subject of a statement")]
    LiteralSubject,
    #[error("language tag requires datatype rdf:langString (got {0})")]
    LanguageMismatch(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguage(String),
}

/// An absolute IRI. Equality is exact string equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if has_scheme(&value) && !value.chars().any(is_forbidden_iri_char) {
            Ok(Iri(value))
        } else {
            Err(RdfError::InvalidIri(value))
        }
    }

    /// Builds an IRI from one of the `vocab` constants.
    pub(crate) fn known(value: &'static str) -> Self {
        debug_assert!(has_scheme(value));
        Iri(value.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// Returns true when `value` starts with `scheme ":"`.
pub fn has_scheme(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

fn is_forbidden_iri_char(c: char) -> bool {
    c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

/// The display name of a resource: the fragment after the last `#`, else the
/// last path segment after `/`. Falls back to the whole IRI when that part is
/// empty or there is no separator at all.
pub fn local_name(iri: &Iri) -> &str {
    let value = iri.as_str();
    let tail = match value.rfind('#') {
        Some(i) => &value[i + 1..],
        None => match value.rfind('/') {
            Some(i) => &value[i + 1..],
            None => return value,
        },
    };
    if tail.is_empty() {
        value
    } else {
        tail
    }
}

/// A blank node, identified by a document-scoped label (without `_:`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Self {
        BlankNode(label.into())
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_:{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri::known(vocab::XSD_STRING),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, RdfError> {
        if datatype.as_str() == vocab::RDF_LANG_STRING {
            return Err(RdfError::LanguageMismatch(datatype.to_string()));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        })
    }

    /// A language-tagged string. Tags are lower-cased.
    pub fn language_tagged(
        lexical: impl Into<String>,
        language: impl Into<String>,
    ) -> Result<Self, RdfError> {
        let language = language.into();
        let valid = !language.is_empty()
            && language.split('-').all(|part| {
                !part.is_empty() && part.len() <= 8 && part.chars().all(|c| c.is_ascii_alphanumeric())
            })
            && language.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        if !valid {
            return Err(RdfError::InvalidLanguage(language));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri::known(vocab::RDF_LANG_STRING),
            language: Some(language.to_ascii_lowercase()),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        write_escaped(f, &self.lexical)?;
        f.write_str("\"")?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if self.datatype.as_str() != vocab::XSD_STRING {
            write!(f, "^^{}", self.datatype)
        } else {
            Ok(())
        }
    }
}

pub(crate) fn write_escaped(out: &mut impl fmt::Write, value: &str) -> fmt::Result {
    for c in value.chars() {
        match c {
            '"' => out.write_str("\\\"")?,
            '\\' => out.write_str("\\\\")?,
            '\n' => out.write_str("\\n")?,
            '\r' => out.write_str("\\r")?,
            '\t' => out.write_str("\\t")?,
            c if (c as u32) < 0x20 || c == '\u{7f}' => write!(out, "\\u{:04X}", c as u32)?,
            c => out.write_char(c)?,
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
    Quoted(Box<Statement>),
}

impl Term {
    pub fn is_resource(&self) -> bool {
        matches!(self, Term::Iri(_) | Term::BlankNode(_))
    }

    pub fn as_quoted(&self) -> Option<&Statement> {
        match self {
            Term::Quoted(s) => Some(s),
            _ => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(value: Iri) -> Self {
        Term::Iri(value)
    }
}

impl From<BlankNode> for Term {
    fn from(value: BlankNode) -> Self {
        Term::BlankNode(value)
    }
}

impl From<Literal> for Term {
    fn from(value: Literal) -> Self {
        Term::Literal(value)
    }
}

impl From<Statement> for Term {
    fn from(value: Statement) -> Self {
        Term::Quoted(Box::new(value))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::BlankNode(b) => b.fmt(f),
            Term::Literal(l) => l.fmt(f),
            Term::Quoted(s) => write!(f, "<< {} {} {} >>", s.subject, s.predicate, s.object),
        }
    }
}

/// Nesting depth of quoted triples inside a term; 0 for non-quoted terms.
pub fn quote_depth(term: &Term) -> usize {
    match term {
        Term::Quoted(s) => 1 + quote_depth(&s.subject).max(quote_depth(&s.object)),
        _ => 0,
    }
}

/// A subject-predicate-object triple. The subject is never a literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Statement {
    subject: Term,
    predicate: Iri,
    object: Term,
}

impl Statement {
    pub fn new(subject: impl Into<Term>, predicate: Iri, object: impl Into<Term>) -> Result<Self, RdfError> {
        let subject = subject.into();
        if matches!(subject, Term::Literal(_)) {
            return Err(RdfError::LiteralSubject);
        }
        Ok(Statement {
            subject,
            predicate,
            object: object.into(),
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    /// True when a quoted triple occurs in subject or object position.
    pub fn is_star(&self) -> bool {
        matches!(self.subject, Term::Quoted(_)) || matches!(self.object, Term::Quoted(_))
    }

    /// Maximum quote depth of subject and object.
    pub fn depth(&self) -> usize {
        quote_depth(&self.subject).max(quote_depth(&self.object))
    }

    /// The statement together with every nested quoted statement that is
    /// itself an RDF-star statement, outermost first. Each entry is one unit
    /// of conversion accounting.
    pub fn star_units(&self) -> Vec<&Statement> {
        let mut out = vec![self];
        let mut stack = vec![self];
        while let Some(current) = stack.pop() {
            for term in [&current.object, &current.subject] {
                if let Term::Quoted(inner) = term {
                    if inner.is_star() {
                        out.push(inner);
                        stack.push(inner);
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub enum StatementKind {
    ObjectProperty,
    DatatypeProperty,
    StarSubject,
    StarObject,
    StarBoth,
}

impl StatementKind {
    pub const ALL: [StatementKind; 5] = [
        StatementKind::ObjectProperty,
        StatementKind::DatatypeProperty,
        StatementKind::StarSubject,
        StatementKind::StarObject,
        StatementKind::StarBoth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatementKind::ObjectProperty => "ObjectProperty",
            StatementKind::DatatypeProperty => "DatatypeProperty",
            StatementKind::StarSubject => "StarSubject",
            StatementKind::StarObject => "StarObject",
            StatementKind::StarBoth => "StarBoth",
        }
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(stmt: &Statement) -> StatementKind {
    match (&stmt.subject, &stmt.object) {
        (Term::Quoted(_), Term::Quoted(_)) => StatementKind::StarBoth,
        (Term::Quoted(_), _) => StatementKind::StarSubject,
        (_, Term::Quoted(_)) => StatementKind::StarObject,
        (_, Term::Literal(_)) => StatementKind::DatatypeProperty,
        _ => StatementKind::ObjectProperty,
    }
}

/// One graph of a dataset: a set of statements in insertion order.
///
/// Statements produced by expanding collection syntax are flagged as
/// derived; they belong to the graph like any other statement but are not
/// counted as separate source statements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    statements: IndexSet<Statement>,
    derived: BTreeSet<Statement>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, stmt: Statement) -> bool {
        self.derived.remove(&stmt);
        self.statements.insert(stmt)
    }

    pub fn insert_derived(&mut self, stmt: Statement) -> bool {
        if self.statements.contains(&stmt) {
            return false;
        }
        self.derived.insert(stmt.clone());
        self.statements.insert(stmt)
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    pub fn contains(&self, stmt: &Statement) -> bool {
        self.statements.contains(stmt)
    }

    pub fn is_derived(&self, stmt: &Statement) -> bool {
        self.derived.contains(stmt)
    }

    pub fn derived_len(&self) -> usize {
        self.derived.len()
    }

    /// Statements in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &Statement> {
        self.statements.iter()
    }
}

/// A default graph plus named graphs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    scope: String,
    default_graph: Graph,
    named_graphs: BTreeMap<Iri, Graph>,
    blank_origins: BTreeMap<String, Option<String>>,
}

impl Default for Dataset {
    fn default() -> Self {
        Self::new()
    }
}

impl Dataset {
    pub fn new() -> Self {
        Self::with_scope("0")
    }

    /// `scope` distinguishes blank nodes of different documents in node
    /// identity keys.
    pub fn with_scope(scope: impl Into<String>) -> Self {
        Dataset {
            scope: scope.into(),
            default_graph: Graph::new(),
            named_graphs: BTreeMap::new(),
            blank_origins: BTreeMap::new(),
        }
    }

    pub fn scope(&self) -> &str {
        &self.scope
    }

    pub fn graph_mut(&mut self, name: Option<&Iri>) -> &mut Graph {
        match name {
            None => &mut self.default_graph,
            Some(name) => self.named_graphs.entry(name.clone()).or_default(),
        }
    }

    pub fn insert(&mut self, graph: Option<&Iri>, stmt: Statement) -> bool {
        self.graph_mut(graph).insert(stmt)
    }

    pub fn insert_derived(&mut self, graph: Option<&Iri>, stmt: Statement) -> bool {
        self.graph_mut(graph).insert_derived(stmt)
    }

    pub fn default_graph(&self) -> &Graph {
        &self.default_graph
    }

    pub fn named_graph(&self, name: &Iri) -> Option<&Graph> {
        self.named_graphs.get(name)
    }

    pub fn named_graphs(&self) -> impl Iterator<Item = (&Iri, &Graph)> {
        self.named_graphs.iter()
    }

    /// Default graph first, then named graphs by name.
    pub fn graphs(&self) -> impl Iterator<Item = (Option<&Iri>, &Graph)> {
        std::iter::once((None, &self.default_graph))
            .chain(self.named_graphs.iter().map(|(n, g)| (Some(n), g)))
    }

    pub fn len(&self) -> usize {
        self.graphs().map(|(_, g)| g.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn statements(&self) -> impl Iterator<Item = (Option<&Iri>, &Statement)> {
        self.graphs().flat_map(|(n, g)| g.iter().map(move |s| (n, s)))
    }

    /// Number of source statements: non-derived statements plus nested
    /// RDF-star statements quoted inside them.
    pub fn unit_count(&self) -> usize {
        self.graphs()
            .flat_map(|(_, g)| g.iter().filter(|s| !g.is_derived(s)))
            .map(|s| s.star_units().len())
            .sum()
    }

    pub fn record_blank_origin(&mut self, canonical: impl Into<String>, original: Option<String>) {
        self.blank_origins.insert(canonical.into(), original);
    }

    /// Canonical blank node label → label as written (`None` for `[]`,
    /// collection cells and property lists).
    pub fn blank_origins(&self) -> &BTreeMap<String, Option<String>> {
        &self.blank_origins
    }
}
