//! Recursive-descent parser for the Turtle-star subset used by the corpus,
//! with TriG-style `name { … }` graph blocks, and a matching writer.
//!
//! Blank nodes are relabelled `b0`, `b1`, … in order of first appearance so
//! that the same input always produces the same [`Dataset`].

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::rdf::{self, vocab, BlankNode, Dataset, Iri, Literal, Statement, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ParseErrorKind {
    Lexical,
    Syntax,
    UndefinedPrefix,
    RelativeIri,
    UnsupportedConstruct,
}

/// A parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("undefined prefix {0:?}")]
    UndefinedPrefix(String),
    #[error(transparent)]
    InvalidIri(#[from] rdf::RdfError),
}

/// Prefix label (possibly empty) → namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixEnv {
    map: BTreeMap<String, String>,
}

impl PrefixEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// `rdf`, `rdfs` and `xsd` bound to their standard namespaces.
    pub fn well_known() -> Self {
        let mut env = Self::new();
        env.declare("rdf", Iri::known(vocab::RDF));
        env.declare("rdfs", Iri::known(vocab::RDFS));
        env.declare("xsd", Iri::known(vocab::XSD));
        env
    }

    /// Later declarations shadow earlier ones.
    pub fn declare(&mut self, prefix: impl Into<String>, namespace: Iri) {
        self.map.insert(prefix.into(), namespace.into_string());
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.map.get(prefix).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Expands `prefix:local` against `env`. The local part is taken verbatim.
pub fn expand_prefixed_name(env: &PrefixEnv, name: &str) -> Result<Iri, PrefixError> {
    let (prefix, local) = name.split_once(':').unwrap_or((name, ""));
    let namespace = env
        .get(prefix)
        .ok_or_else(|| PrefixError::UndefinedPrefix(prefix.to_owned()))?;
    Ok(Iri::new(format!("{namespace}{local}"))?)
}

/// Hands out canonical blank node labels `b0`, `b1`, …
#[derive(Debug, Clone, Default)]
pub struct BlankNodeAllocator {
    next: usize,
}

impl BlankNodeAllocator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> BlankNode {
        let b = BlankNode::new(format!("b{}", self.next));
        self.next += 1;
        b
    }
}

/// Emits the `rdf:first`/`rdf:rest` chain for `elements` into `graph` and
/// returns the head term (`rdf:nil` for an empty list). Chain statements are
/// inserted as derived statements.
pub fn expand_collection(
    elements: Vec<Term>,
    graph: Option<&Iri>,
    dataset: &mut Dataset,
    blanks: &mut BlankNodeAllocator,
) -> Term {
    let nil = Term::Iri(Iri::known(vocab::RDF_NIL));
    if elements.is_empty() {
        return nil;
    }
    let cells: Vec<BlankNode> = elements.iter().map(|_| blanks.fresh()).collect();
    for cell in &cells {
        dataset.record_blank_origin(cell.label(), None);
    }
    let first = Iri::known(vocab::RDF_FIRST);
    let rest = Iri::known(vocab::RDF_REST);
    for (i, element) in elements.into_iter().enumerate() {
        let cell = Term::BlankNode(cells[i].clone());
        let next = cells
            .get(i + 1)
            .map(|b| Term::BlankNode(b.clone()))
            .unwrap_or_else(|| nil.clone());
        let s1 = Statement::new(cell.clone(), first.clone(), element).expect("cell subject");
        let s2 = Statement::new(cell, rest.clone(), next).expect("cell subject");
        dataset.insert_derived(graph, s1);
        dataset.insert_derived(graph, s2);
    }
    Term::BlankNode(cells[0].clone())
}

/// Parses a Turtle-star / TriG-star document with default settings.
pub fn parse_turtle_star(input: &str) -> Result<Dataset, ParseError> {
    TurtleStarParser::new().parse(input)
}

/// Parser settings.
#[derive(Debug, Clone)]
pub struct TurtleStarParser {
    predeclared: PrefixEnv,
    scope: String,
}

impl Default for TurtleStarParser {
    fn default() -> Self {
        Self::new()
    }
}

impl TurtleStarParser {
    /// `rdf:`, `rdfs:` and `xsd:` are predeclared; documents may rebind them.
    pub fn new() -> Self {
        TurtleStarParser {
            predeclared: PrefixEnv::well_known(),
            scope: "0".to_owned(),
        }
    }

    /// No predeclared prefixes.
    pub fn strict() -> Self {
        TurtleStarParser {
            predeclared: PrefixEnv::new(),
            scope: "0".to_owned(),
        }
    }

    pub fn with_scope(mut self, scope: impl Into<String>) -> Self {
        self.scope = scope.into();
        self
    }

    pub fn parse(&self, input: &str) -> Result<Dataset, ParseError> {
        let mut p = Parser {
            chars: input.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            env: self.predeclared.clone(),
            dataset: Dataset::with_scope(self.scope.clone()),
            labels: HashMap::new(),
            blanks: BlankNodeAllocator::new(),
            graph: None,
        };
        p.document()?;
        Ok(p.dataset)
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    env: PrefixEnv,
    dataset: Dataset,
    labels: HashMap<String, BlankNode>,
    blanks: BlankNodeAllocator,
    graph: Option<Iri>,
}

#[derive(Clone, Copy)]
struct Mark {
    line: usize,
    column: usize,
}

type PResult<T> = Result<T, ParseError>;

fn is_pn_chars_base(c: char) -> bool {
    c.is_ascii_alphabetic() || (!c.is_ascii() && (c.is_alphabetic() || c == '\u{200C}' || c == '\u{200D}'))
}

fn is_pn_chars_u(c: char) -> bool {
    is_pn_chars_base(c) || c == '_'
}

fn is_pn_chars(c: char) -> bool {
    is_pn_chars_u(c)
        || c == '-'
        || c.is_ascii_digit()
        || c == '\u{B7}'
        || ('\u{300}'..='\u{36F}').contains(&c)
        || ('\u{203F}'..='\u{2040}').contains(&c)
        || (!c.is_ascii() && c.is_numeric())
}

const LOCAL_ESCAPES: &str = "_~.-!$&'()*+,;=/?#@%";

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn starts_with_keyword(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        kw.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i).is_some_and(|x| x.eq_ignore_ascii_case(&c)))
            && !self.peek_at(n).is_some_and(|c| is_pn_chars(c) || c == ':')
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn mark(&self) -> Mark {
        Mark {
            line: self.line,
            column: self.column,
        }
    }

    fn error_at(&self, at: Mark, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: at.line,
            column: at.column,
            message: message.into(),
            kind,
        }
    }

    fn error(&self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        self.error_at(self.mark(), kind, message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_owned(),
        };
        self.error(ParseErrorKind::Syntax, format!("expected {expected}, found {found}"))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn expect_char(&mut self, c: char, what: &str) -> PResult<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            if self.peek() == Some('@') || self.starts_with_keyword("PREFIX") || self.starts_with_keyword("BASE") {
                self.directive()?;
            } else if self.peek() == Some('{') {
                self.bump();
                self.graph_body()?;
            } else if self.starts_with_keyword("GRAPH") {
                self.bump_n(5);
                self.skip_ws();
                let at = self.mark();
                let name = match self.term_start()? {
                    Term::Iri(i) => i,
                    _ => {
                        return Err(self.error_at(at, ParseErrorKind::UnsupportedConstruct, "graph names must be IRIs"))
                    }
                };
                self.expect_char('{', "'{'")?;
                self.graph = Some(name);
                self.graph_body()?;
                self.graph = None;
            } else {
                self.block()?;
            }
        }
    }

    fn directive(&mut self) -> PResult<()> {
        let at = self.mark();
        let sparql_style = if self.starts_with("@prefix") && !self.peek_at(7).is_some_and(is_pn_chars) {
            self.bump_n(7);
            false
        } else if self.starts_with_keyword("PREFIX") {
            self.bump_n(6);
            true
        } else if self.starts_with("@base") || self.starts_with_keyword("BASE") {
            return Err(self.error_at(at, ParseErrorKind::UnsupportedConstruct, "base IRIs are not supported"));
        } else {
            return Err(self.error_at(at, ParseErrorKind::Syntax, "unknown directive"));
        };
        self.skip_ws();
        let prefix_at = self.mark();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_pn_chars(c) || c == '.' {
                prefix.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() != Some(':') {
            return Err(self.unexpected("prefix label ending in ':'"));
        }
        if prefix.ends_with('.') || prefix.chars().next().is_some_and(|c| !is_pn_chars_base(c)) {
            return Err(self.error_at(prefix_at, ParseErrorKind::Syntax, format!("invalid prefix label {prefix:?}")));
        }
        self.bump();
        self.skip_ws();
        if self.peek() != Some('<') {
            return Err(self.unexpected("namespace IRI"));
        }
        let namespace = self.iriref()?;
        self.env.declare(prefix, namespace);
        if !sparql_style {
            self.expect_char('.', "'.' after @prefix")?;
        }
        Ok(())
    }

    /// A top-level triples statement or a named graph block.
    fn block(&mut self) -> PResult<()> {
        let at = self.mark();
        if self.peek() == Some('[') && !self.is_anon() {
            let subject = self.blank_node_property_list()?;
            self.skip_ws();
            if self.peek() != Some('.') {
                self.predicate_object_list(&subject)?;
            }
            return self.expect_char('.', "'.'");
        }
        let subject = self.subject()?;
        self.skip_ws();
        if self.peek() == Some('{') {
            let name = match subject {
                Term::Iri(i) => i,
                _ => return Err(self.error_at(at, ParseErrorKind::UnsupportedConstruct, "graph names must be IRIs")),
            };
            self.bump();
            self.graph = Some(name);
            self.graph_body()?;
            self.graph = None;
            return Ok(());
        }
        self.predicate_object_list(&subject)?;
        self.expect_char('.', "'.'")
    }

    /// Triples up to the closing '}'; the final '.' is optional.
    fn graph_body(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.bump();
                    return Ok(());
                }
                None => return Err(self.unexpected("'}'")),
                Some('{') => {
                    return Err(self.error(ParseErrorKind::Syntax, "graph blocks cannot be nested"));
                }
                _ => {}
            }
            if self.peek() == Some('[') && !self.is_anon() {
                let subject = self.blank_node_property_list()?;
                self.skip_ws();
                if !matches!(self.peek(), Some('.') | Some('}')) {
                    self.predicate_object_list(&subject)?;
                }
            } else {
                let subject = self.subject()?;
                self.predicate_object_list(&subject)?;
            }
            self.skip_ws();
            match self.peek() {
                Some('.') => {
                    self.bump();
                }
                Some('}') => {}
                _ => return Err(self.unexpected("'.' or '}'")),
            }
        }
    }

    fn subject(&mut self) -> PResult<Term> {
        self.skip_ws();
        let at = self.mark();
        match self.peek() {
            Some('(') => self.collection(),
            Some('"') | Some('\'') => Err(self.error_at(at, ParseErrorKind::Syntax, "a literal cannot be a subject")),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' => {
                Err(self.error_at(at, ParseErrorKind::Syntax, "a literal cannot be a subject"))
            }
            _ => {
                let term = self.term_start()?;
                if matches!(term, Term::Literal(_)) {
                    return Err(self.error_at(at, ParseErrorKind::Syntax, "a literal cannot be a subject"));
                }
                Ok(term)
            }
        }
    }

    fn predicate_object_list(&mut self, subject: &Term) -> PResult<()> {
        loop {
            let predicate = self.verb()?;
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.bump();
                self.skip_ws();
            }
            if matches!(self.peek(), Some('.') | Some(']') | Some('}') | None) {
                return Ok(());
            }
        }
    }

    fn object_list(&mut self, subject: &Term, predicate: &Iri) -> PResult<()> {
        loop {
            let object = self.object()?;
            let stmt = Statement::new(subject.clone(), predicate.clone(), object)
                .map_err(|e| self.error(ParseErrorKind::Syntax, e.to_string()))?;
            let graph = self.graph.clone();
            self.dataset.insert(graph.as_ref(), stmt);
            self.skip_ws();
            if self.starts_with("{|") {
                return Err(self.error(ParseErrorKind::UnsupportedConstruct, "annotation syntax '{| |}' is not supported"));
            }
            if self.peek() == Some(',') {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Iri> {
        self.skip_ws();
        let at = self.mark();
        if self.peek() == Some('a') && !self.peek_at(1).is_some_and(|c| is_pn_chars(c) || c == ':' || c == '.') {
            self.bump();
            return Ok(Iri::known(vocab::RDF_TYPE));
        }
        match self.peek() {
            Some('<') if self.peek_at(1) != Some('<') => self.iriref(),
            Some(c) if is_pn_chars_base(c) || c == ':' => self.prefixed_name(),
            _ => Err(self.error_at(at, ParseErrorKind::Syntax, "expected a predicate")),
        }
    }

    fn object(&mut self) -> PResult<Term> {
        self.skip_ws();
        match self.peek() {
            Some('(') => self.collection(),
            Some('[') if !self.is_anon() => self.blank_node_property_list(),
            _ => self.term_start(),
        }
    }

    fn is_anon(&self) -> bool {
        let mut k = 1;
        while let Some(c) = self.peek_at(k) {
            if c.is_whitespace() {
                k += 1;
            } else {
                return c == ']';
            }
        }
        false
    }

    /// IRI, prefixed name, blank node, literal, or quoted triple.
    fn term_start(&mut self) -> PResult<Term> {
        self.skip_ws();
        let at = self.mark();
        match self.peek() {
            Some('<') if self.peek_at(1) == Some('<') => self.quoted_triple(),
            Some('<') => Ok(Term::Iri(self.iriref()?)),
            Some('_') if self.peek_at(1) == Some(':') => Ok(Term::BlankNode(self.blank_node_label()?)),
            Some('[') => {
                if !self.is_anon() {
                    return Err(self.error_at(at, ParseErrorKind::Syntax, "blank node property list not allowed here"));
                }
                self.bump();
                self.skip_ws();
                self.bump();
                let b = self.blanks.fresh();
                self.dataset.record_blank_origin(b.label(), None);
                Ok(Term::BlankNode(b))
            }
            Some('"') | Some('\'') => Ok(Term::Literal(self.rdf_literal()?)),
            Some(c) if c.is_ascii_digit() || c == '+' || c == '-' || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                Ok(Term::Literal(self.numeric_literal()?))
            }
            Some('(') => Err(self.error_at(at, ParseErrorKind::Syntax, "collections are not allowed here")),
            Some(_) if self.starts_with_keyword("true") || self.starts_with_keyword("false") => {
                let value = if self.peek() == Some('t') { "true" } else { "false" };
                self.bump_n(value.len());
                Ok(Term::Literal(
                    Literal::typed(value, Iri::known(vocab::XSD_BOOLEAN)).expect("boolean datatype"),
                ))
            }
            Some(c) if is_pn_chars_base(c) || c == ':' => Ok(Term::Iri(self.prefixed_name()?)),
            None => Err(self.unexpected("a term")),
            Some(_) => Err(self.error_at(at, ParseErrorKind::Syntax, format!("unexpected character {:?}", self.peek().unwrap_or(' ')))),
        }
    }

    fn quoted_triple(&mut self) -> PResult<Term> {
        let at = self.mark();
        self.bump_n(2);
        self.skip_ws();
        let s_at = self.mark();
        let subject = match self.peek() {
            Some('(') | Some('"') | Some('\'') => {
                return Err(self.error_at(s_at, ParseErrorKind::Syntax, "invalid quoted triple subject"))
            }
            Some('[') if !self.is_anon() => {
                return Err(self.error_at(s_at, ParseErrorKind::Syntax, "blank node property lists cannot be quoted"))
            }
            _ => self.term_start()?,
        };
        if matches!(subject, Term::Literal(_)) {
            return Err(self.error_at(s_at, ParseErrorKind::Syntax, "a literal cannot be a subject"));
        }
        let predicate = self.verb()?;
        self.skip_ws();
        let o_at = self.mark();
        let object = match self.peek() {
            Some('(') => return Err(self.error_at(o_at, ParseErrorKind::Syntax, "collections cannot be quoted")),
            Some('[') if !self.is_anon() => {
                return Err(self.error_at(o_at, ParseErrorKind::Syntax, "blank node property lists cannot be quoted"))
            }
            _ => self.term_start()?,
        };
        self.skip_ws();
        if !self.starts_with(">>") {
            return Err(self.unexpected("'>>'"));
        }
        self.bump_n(2);
        let stmt = Statement::new(subject, predicate, object)
            .map_err(|e| self.error_at(at, ParseErrorKind::Syntax, e.to_string()))?;
        Ok(Term::Quoted(Box::new(stmt)))
    }

    fn blank_node_property_list(&mut self) -> PResult<Term> {
        self.bump();
        let b = self.blanks.fresh();
        self.dataset.record_blank_origin(b.label(), None);
        let subject = Term::BlankNode(b);
        self.predicate_object_list(&subject)?;
        self.expect_char(']', "']'")?;
        Ok(subject)
    }

    fn collection(&mut self) -> PResult<Term> {
        self.bump();
        let mut elements = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.bump();
                    break;
                }
                None => return Err(self.unexpected("')'")),
                _ => elements.push(self.object()?),
            }
        }
        let graph = self.graph.clone();
        Ok(expand_collection(elements, graph.as_ref(), &mut self.dataset, &mut self.blanks))
    }

    fn iriref(&mut self) -> PResult<Iri> {
        let at = self.mark();
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error_at(at, ParseErrorKind::Lexical, "unterminated IRI")),
                Some('>') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    let esc_at = self.mark();
                    self.bump();
                    let c = match self.peek() {
                        Some('u') => self.unicode_escape(4, esc_at)?,
                        Some('U') => self.unicode_escape(8, esc_at)?,
                        _ => return Err(self.error_at(esc_at, ParseErrorKind::Lexical, "invalid escape in IRI")),
                    };
                    value.push(c);
                }
                Some(c) if c <= ' ' || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.error(ParseErrorKind::Lexical, format!("invalid character {c:?} in IRI")));
                }
                Some(c) => {
                    value.push(c);
                    self.bump();
                }
            }
        }
        if !rdf::has_scheme(&value) {
            return Err(self.error_at(at, ParseErrorKind::RelativeIri, format!("relative IRI <{value}> is not supported")));
        }
        Iri::new(value).map_err(|e| self.error_at(at, ParseErrorKind::Lexical, e.to_string()))
    }

    /// After a backslash; consumes `u`/`U` and the hex digits.
    fn unicode_escape(&mut self, digits: usize, at: Mark) -> PResult<char> {
        self.bump();
        let mut code = 0u32;
        for _ in 0..digits {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error_at(at, ParseErrorKind::Lexical, "invalid unicode escape"))?;
            code = code * 16 + d;
            self.bump();
        }
        char::from_u32(code).ok_or_else(|| self.error_at(at, ParseErrorKind::Lexical, "invalid code point"))
    }

    fn prefixed_name(&mut self) -> PResult<Iri> {
        let at = self.mark();
        let mut prefix = String::new();
        while let Some(c) = self.peek() {
            if c == ':' {
                break;
            }
            if is_pn_chars(c) || c == '.' {
                prefix.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() != Some(':') {
            return Err(self.error_at(at, ParseErrorKind::Syntax, format!("unexpected word {prefix:?}")));
        }
        if prefix.ends_with('.') {
            return Err(self.error_at(at, ParseErrorKind::Syntax, "prefix label cannot end with '.'"));
        }
        self.bump();
        let local = self.local_part()?;
        let namespace = self.env.get(&prefix).ok_or_else(|| {
            self.error_at(at, ParseErrorKind::UndefinedPrefix, format!("undefined prefix {prefix:?}"))
        })?;
        Iri::new(format!("{namespace}{local}"))
            .map_err(|e| self.error_at(at, ParseErrorKind::Lexical, e.to_string()))
    }

    fn local_part(&mut self) -> PResult<String> {
        let mut local = String::new();
        let mut first = true;
        while let Some(c) = self.peek() {
            let ok = if first {
                is_pn_chars_u(c) || c == ':' || c.is_ascii_digit() || c == '%' || c == '\\'
            } else {
                is_pn_chars(c) || c == ':' || c == '.' || c == '%' || c == '\\'
            };
            if !ok {
                break;
            }
            if c == '.' {
                // a dot is only part of the name when more name follows
                let mut k = 1;
                while self.peek_at(k) == Some('.') {
                    k += 1;
                }
                let after = self.peek_at(k);
                if !after.is_some_and(|n| is_pn_chars(n) || n == ':' || n == '%' || n == '\\') {
                    break;
                }
            }
            match c {
                '%' => {
                    let h1 = self.peek_at(1).filter(|c| c.is_ascii_hexdigit());
                    let h2 = self.peek_at(2).filter(|c| c.is_ascii_hexdigit());
                    match (h1, h2) {
                        (Some(a), Some(b)) => {
                            local.push('%');
                            local.push(a);
                            local.push(b);
                            self.bump_n(3);
                        }
                        _ => return Err(self.error(ParseErrorKind::Lexical, "invalid percent escape")),
                    }
                }
                '\\' => match self.peek_at(1) {
                    Some(e) if LOCAL_ESCAPES.contains(e) => {
                        local.push(e);
                        self.bump_n(2);
                    }
                    _ => return Err(self.error(ParseErrorKind::Lexical, "invalid local name escape")),
                },
                c => {
                    local.push(c);
                    self.bump();
                }
            }
            first = false;
        }
        Ok(local)
    }

    fn blank_node_label(&mut self) -> PResult<BlankNode> {
        let at = self.mark();
        self.bump_n(2);
        let mut label = String::new();
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {
                label.push(c);
                self.bump();
            }
            _ => return Err(self.error_at(at, ParseErrorKind::Lexical, "invalid blank node label")),
        }
        while let Some(c) = self.peek() {
            if is_pn_chars(c) {
                label.push(c);
                self.bump();
            } else if c == '.' && self.peek_at(1).is_some_and(|n| is_pn_chars(n) || n == '.') {
                let mut k = 1;
                while self.peek_at(k) == Some('.') {
                    k += 1;
                }
                if !self.peek_at(k).is_some_and(is_pn_chars) {
                    break;
                }
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if let Some(b) = self.labels.get(&label) {
            return Ok(b.clone());
        }
        let b = self.blanks.fresh();
        self.dataset.record_blank_origin(b.label(), Some(label.clone()));
        self.labels.insert(label, b.clone());
        Ok(b)
    }

    fn rdf_literal(&mut self) -> PResult<Literal> {
        let lexical = self.string()?;
        if self.peek() == Some('@') {
            let at = self.mark();
            self.bump();
            let mut tag = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    tag.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            return Literal::language_tagged(lexical, tag)
                .map_err(|e| self.error_at(at, ParseErrorKind::Lexical, e.to_string()));
        }
        if self.starts_with("^^") {
            self.bump_n(2);
            let at = self.mark();
            let datatype = match self.peek() {
                Some('<') if self.peek_at(1) != Some('<') => self.iriref()?,
                Some(c) if is_pn_chars_base(c) || c == ':' => self.prefixed_name()?,
                _ => return Err(self.unexpected("datatype IRI")),
            };
            return Literal::typed(lexical, datatype)
                .map_err(|e| self.error_at(at, ParseErrorKind::Syntax, e.to_string()));
        }
        Ok(Literal::simple(lexical))
    }

    fn string(&mut self) -> PResult<String> {
        let at = self.mark();
        let quote = self.peek().expect("caller checked quote");
        let long = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        self.bump_n(if long { 3 } else { 1 });
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error_at(at, ParseErrorKind::Lexical, "unterminated string")),
                Some(c) if c == quote => {
                    if !long {
                        self.bump();
                        return Ok(out);
                    }
                    if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) && self.peek_at(3) != Some(quote) {
                        self.bump_n(3);
                        return Ok(out);
                    }
                    out.push(c);
                    self.bump();
                }
                Some('\n') | Some('\r') if !long => {
                    return Err(self.error(ParseErrorKind::Lexical, "line break in short string"));
                }
                Some('\\') => {
                    let esc_at = self.mark();
                    self.bump();
                    let c = match self.peek() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('\'') => '\'',
                        Some('u') => {
                            out.push(self.unicode_escape(4, esc_at)?);
                            continue;
                        }
                        Some('U') => {
                            out.push(self.unicode_escape(8, esc_at)?);
                            continue;
                        }
                        _ => return Err(self.error_at(esc_at, ParseErrorKind::Lexical, "unsupported escape sequence")),
                    };
                    self.bump();
                    out.push(c);
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn numeric_literal(&mut self) -> PResult<Literal> {
        let at = self.mark();
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.bump();
        }
        let mut int_digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            text.push(c);
            self.bump();
            int_digits += 1;
        }
        let mut frac_digits = 0;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            text.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                text.push(c);
                self.bump();
                frac_digits += 1;
            }
        }
        if int_digits + frac_digits == 0 {
            return Err(self.error_at(at, ParseErrorKind::Lexical, "invalid number"));
        }
        let mut datatype = if frac_digits > 0 { vocab::XSD_DECIMAL } else { vocab::XSD_INTEGER };
        if let Some(e @ ('e' | 'E')) = self.peek() {
            let mut k = 1;
            if matches!(self.peek_at(1), Some('+') | Some('-')) {
                k = 2;
            }
            if self.peek_at(k).is_some_and(|c| c.is_ascii_digit()) {
                text.push(e);
                self.bump();
                if k == 2 {
                    text.push(self.bump().unwrap_or('+'));
                }
                while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                    text.push(c);
                    self.bump();
                }
                datatype = vocab::XSD_DOUBLE;
            } else {
                return Err(self.error(ParseErrorKind::Lexical, "invalid exponent"));
            }
        }
        if self.peek().is_some_and(|c| is_pn_chars_base(c) || c == '_') {
            return Err(self.error(ParseErrorKind::Lexical, "invalid character after number"));
        }
        Ok(Literal::typed(text, Iri::known(datatype)).expect("numeric datatype"))
    }
}

/// Serializes a dataset as Turtle-star (TriG blocks for named graphs) using
/// absolute IRIs only.
pub fn write_turtle_star(dataset: &Dataset) -> String {
    let mut out = String::new();
    for stmt in dataset.default_graph().iter() {
        write_statement(&mut out, stmt).expect("writing to String");
        out.push('\n');
    }
    for (name, graph) in dataset.named_graphs() {
        let _ = writeln!(out, "{name} {{");
        for stmt in graph.iter() {
            out.push_str("  ");
            write_statement(&mut out, stmt).expect("writing to String");
            out.push('\n');
        }
        out.push_str("}\n");
    }
    out
}

fn write_statement(out: &mut String, stmt: &Statement) -> fmt::Result {
    write!(out, "{stmt}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{classify, StatementKind};

    fn ex(local: &str) -> Iri {
        Iri::new(format!("http://example.org/{local}")).unwrap()
    }

    fn parse(src: &str) -> Dataset {
        parse_turtle_star(src).unwrap_or_else(|e| panic!("{e}"))
    }

    fn err(src: &str) -> ParseError {
        parse_turtle_star(src).unwrap_err()
    }

    #[test]
    fn case1_single_statement() {
        let ds = parse("#Case 1\n@prefix ex: <http://example.org/> .\nex:alice ex:meets ex:bob .\n");
        assert_eq!(ds.len(), 1);
        let s = ds.default_graph().iter().next().unwrap();
        assert_eq!(s, &Statement::new(ex("alice"), ex("meets"), ex("bob")).unwrap());
    }

    #[test]
    fn string_escapes() {
        let ds = parse(r#"@prefix ex: <http://example.org/> . ex:a ex:b "\U0001F600\u00e9\b\f\'" ."#);
        let s = ds.default_graph().iter().next().unwrap();
        let Term::Literal(l) = s.object() else { panic!() };
        assert_eq!(l.lexical(), "\u{1F600}\u{e9}\u{8}\u{c}'");
        let again = parse(&write_turtle_star(&ds));
        assert_eq!(again.default_graph().iter().next(), Some(s));
    }

    #[test]
    fn empty_document() {
        assert!(parse("").is_empty());
        assert!(parse("  # only a comment\n").is_empty());
    }

    #[test]
    fn named_graph_blocks() {
        let src = r#"@prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns> .
@prefix ex: <http://example.org/> .
ex:Graph1 { ex:Monica ex:name "Monica" .
            ex:Monica ex:homepage ex:Monicahompage .
            ex:Monica ex:hasSkill ex:Management }
ex:Graph2 { ex:Monica rdf:type ex:Person .
            ex:Monica ex:hasSkill ex:Programming }
"#;
        let ds = parse(src);
        assert!(ds.default_graph().is_empty());
        assert_eq!(ds.named_graph(&ex("Graph1")).unwrap().len(), 3);
        assert_eq!(ds.named_graph(&ex("Graph2")).unwrap().len(), 2);
        // the hash-less rdf namespace is kept verbatim
        let s = ds.named_graph(&ex("Graph2")).unwrap().iter().next().unwrap();
        assert_eq!(s.predicate().as_str(), "http://www.w3.org/1999/02/22-rdf-syntax-nstype");
    }

    #[test]
    fn graph_keyword_and_default_block() {
        let ds = parse("PREFIX ex: <http://example.org/>\nGRAPH ex:g { ex:a ex:p ex:b . }\n{ ex:c ex:p ex:d }");
        assert_eq!(ds.named_graph(&ex("g")).unwrap().len(), 1);
        assert_eq!(ds.default_graph().len(), 1);
    }

    #[test]
    fn prefix_expansion() {
        let mut env = PrefixEnv::new();
        env.declare("ex", ex(""));
        assert_eq!(expand_prefixed_name(&env, "ex:bob").unwrap(), ex("bob"));
        assert_eq!(expand_prefixed_name(&env, "ex:").unwrap(), ex(""));
        let env = PrefixEnv::well_known();
        assert_eq!(expand_prefixed_name(&env, "rdf:type").unwrap().as_str(), vocab::RDF_TYPE);
        assert_eq!(
            expand_prefixed_name(&env, "foo:bar").unwrap_err(),
            PrefixError::UndefinedPrefix("foo".into())
        );
    }

    #[test]
    fn later_prefix_shadows_earlier() {
        let ds = parse("@prefix ex: <http://a.org/> .\nex:x ex:p ex:y .\n@prefix ex: <http://b.org/> .\nex:x ex:p ex:y .");
        assert_eq!(ds.len(), 2);
        let iris: Vec<_> = ds.default_graph().iter().map(|s| s.subject().to_string()).collect();
        assert_eq!(iris, ["<http://a.org/x>", "<http://b.org/x>"]);
    }

    #[test]
    fn collection_expansion() {
        let ds = parse("@prefix ex: <http://example.org/> .\nex:List1 ex:contents (\"one\" \"two\" \"three\") .");
        assert_eq!(ds.len(), 7);
        assert_eq!(ds.default_graph().derived_len(), 6);
        assert_eq!(ds.unit_count(), 1);
        let nil = Term::Iri(Iri::known(vocab::RDF_NIL));
        let rests = ds
            .default_graph()
            .iter()
            .filter(|s| s.predicate().as_str() == vocab::RDF_REST)
            .count();
        assert_eq!(rests, 3);
        assert!(ds.default_graph().iter().any(|s| s.object() == &nil));
    }

    #[test]
    fn collection_edge_sizes() {
        let mut ds = Dataset::new();
        let mut blanks = BlankNodeAllocator::new();
        let head = expand_collection(vec![], None, &mut ds, &mut blanks);
        assert_eq!(head, Term::Iri(Iri::known(vocab::RDF_NIL)));
        assert!(ds.is_empty());
        let head = expand_collection(vec![Literal::simple("x").into()], None, &mut ds, &mut blanks);
        assert_eq!(head, Term::BlankNode(BlankNode::new("b0")));
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn blank_nodes_are_relabelled_in_order() {
        let ds = parse("@prefix ex: <http://example.org/> .\nex:bob ex:nationality _:c .\n_:c a ex:Person .\n[] ex:p _:z .");
        let subjects: Vec<_> = ds.default_graph().iter().map(|s| s.subject().to_string()).collect();
        assert_eq!(subjects[1], "_:b0");
        assert_eq!(subjects[2], "_:b1");
        assert_eq!(ds.blank_origins().get("b0"), Some(&Some("c".to_owned())));
        assert_eq!(ds.blank_origins().get("b1"), Some(&None));
        assert_eq!(ds.blank_origins().get("b2"), Some(&Some("z".to_owned())));
        let s = ds.default_graph().iter().nth(1).unwrap();
        assert_eq!(s.predicate().as_str(), vocab::RDF_TYPE);
    }

    #[test]
    fn literal_forms() {
        let ds = parse(
            r#"@prefix ex: <http://example.org/> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
ex:book ex:publish_date "1963-03-22"^^xsd:date ;
        ex:pages "100"^^<http://www.w3.org/2001/XMLSchema#integer> ;
        ex:cover 20 ; ex:ratio 0.5 ; ex:big 1.5E3 ; ex:neg -7 ;
        ex:title "Bog"@da , 'single' , """long "quoted"
text""" ; ex:flag true ."#,
        );
        let lits: Vec<Literal> = ds
            .default_graph()
            .iter()
            .filter_map(|s| match s.object() {
                Term::Literal(l) => Some(l.clone()),
                _ => None,
            })
            .collect();
        let dts: Vec<&str> = lits.iter().map(|l| rdf::local_name(l.datatype())).collect();
        assert_eq!(
            dts,
            ["date", "integer", "integer", "decimal", "double", "integer", "langString", "string", "string", "boolean"]
        );
        assert_eq!(lits[2].lexical(), "20");
        assert_eq!(lits[4].lexical(), "1.5E3");
        assert_eq!(lits[5].lexical(), "-7");
        assert_eq!(lits[6].language(), Some("da"));
        assert_eq!(lits[8].lexical(), "long \"quoted\"\ntext");
    }

    #[test]
    fn integer_before_terminating_dot() {
        let ds = parse("@prefix ex: <http://example.org/> .\nex:a ex:b 28.");
        let s = ds.default_graph().iter().next().unwrap();
        assert_eq!(s.object().to_string(), "\"28\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    }

    #[test]
    fn quoted_triples_nest() {
        let ds = parse("@prefix ex: <http://example.com/> .\n<<<<ex:Steve ex:position \"CEO\">> ex:mentionedBy ex:book>> ex:source ex:journal .");
        let s = ds.default_graph().iter().next().unwrap();
        assert_eq!(s.depth(), 2);
        assert_eq!(classify(s), StatementKind::StarSubject);
        let ds = parse("@prefix ex: <http://example.org/> .\nex:bobhomepage ex:source <<ex:mainPage ex:writer ex:alice>> .");
        assert_eq!(classify(ds.default_graph().iter().next().unwrap()), StatementKind::StarObject);
    }

    #[test]
    fn local_names_with_dots_and_escapes() {
        let ds = parse("@prefix ex: <http://example.org/> .\nex:a.b ex:p\\/q ex:c%20d.");
        let s = ds.default_graph().iter().next().unwrap();
        assert_eq!(s.subject().to_string(), "<http://example.org/a.b>");
        assert_eq!(s.predicate().as_str(), "http://example.org/p/q");
        assert_eq!(s.object().to_string(), "<http://example.org/c%20d>");
    }

    #[test]
    fn blank_node_property_list() {
        let ds = parse("@prefix ex: <http://example.org/> .\nex:a ex:p [ ex:q ex:r ; ex:s \"t\" ] .\n[ ex:u ex:v ] .");
        assert_eq!(ds.len(), 4);
    }

    #[test]
    fn error_undefined_prefix() {
        let e = err("ex:a ex:b ex:c .");
        assert_eq!(e.kind, ParseErrorKind::UndefinedPrefix);
        assert_eq!((e.line, e.column), (1, 1));
        let e = TurtleStarParser::strict().parse("rdf:a rdf:b rdf:c .").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndefinedPrefix);
    }

    #[test]
    fn error_relative_iri() {
        let e = err("<a> <http://x.org/p> <http://x.org/o> .");
        assert_eq!(e.kind, ParseErrorKind::RelativeIri);
        let e = err("@prefix ex: <relative/> .");
        assert_eq!(e.kind, ParseErrorKind::RelativeIri);
        assert_eq!((e.line, e.column), (1, 13));
    }

    #[test]
    fn error_unsupported_constructs() {
        assert_eq!(err("@base <http://x.org/> .").kind, ParseErrorKind::UnsupportedConstruct);
        assert_eq!(err("BASE <http://x.org/>").kind, ParseErrorKind::UnsupportedConstruct);
        let e = err("@prefix ex: <http://x.org/> .\nex:a ex:b ex:c {| ex:d ex:e |} .");
        assert_eq!(e.kind, ParseErrorKind::UnsupportedConstruct);
        assert_eq!((e.line, e.column), (2, 16));
    }

    #[test]
    fn error_positions() {
        let e = err("@prefix ex: <http://x.org/> .\nex:a ex:b ex:c\nex:d ex:e ex:f .");
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        assert_eq!((e.line, e.column), (3, 1));
        let e = err("@prefix ex: <http://x.org/> .\nex:a ex:b \"open");
        assert_eq!(e.kind, ParseErrorKind::Lexical);
        assert_eq!((e.line, e.column), (2, 11));
        let e = err("@prefix ex: <http://x.org/> .\nex:a ex:b \"bad \\q\" .");
        assert_eq!(e.kind, ParseErrorKind::Lexical);
        assert_eq!((e.line, e.column), (2, 16));
        let e = err("\"lit\" <http://x.org/p> <http://x.org/o> .");
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = err("@prefix ex: <http://x.org/> .\n<< ex:a ex:b ex:c > ex:p ex:o .");
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = err("@prefix ex: <http://x.org/> .\nex:g { ex:a ex:b ex:c ");
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn writer_round_trip_is_identical_for_ground_data() {
        let src = "@prefix ex: <http://example.org/> .\n<<ex:alice ex:likes ex:bob>> ex:certainty 0.5 .\nex:g { ex:a ex:name \"x\\ty\"@en }";
        let ds = parse(src);
        let text = write_turtle_star(&ds);
        let again = parse(&text);
        let a: Vec<_> = ds.statements().collect();
        let b: Vec<_> = again.statements().collect();
        assert_eq!(a, b);
    }
}
