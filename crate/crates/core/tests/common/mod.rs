//! Dataset generators shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use rdfstar2pg::rdf::{vocab, BlankNode, Dataset, Iri, Literal, Statement, Term};

pub const EX: &str = "http://example.org/";

pub fn ex(local: &str) -> Iri {
    Iri::new(format!("{EX}{local}")).unwrap()
}

fn xsd(local: &str) -> Iri {
    Iri::new(format!("{}{local}", vocab::XSD)).unwrap()
}

pub fn literal(i: usize) -> Literal {
    match i % 7 {
        0 => Literal::simple("a"),
        1 => Literal::typed("1", xsd("integer")).unwrap(),
        2 => Literal::typed("2.5", xsd("decimal")).unwrap(),
        3 => Literal::language_tagged("x", "en").unwrap(),
        4 => Literal::typed("true", xsd("boolean")).unwrap(),
        5 => Literal::typed("2020-01-01", xsd("date")).unwrap(),
        _ => Literal::simple("b c"),
    }
}

/// Subjects: five IRIs and two blank nodes.
pub fn resource() -> impl Strategy<Value = Term> {
    prop_oneof![
        4 => (0..5usize).prop_map(|i| Term::Iri(ex(&format!("r{i}")))),
        1 => (0..2usize).prop_map(|i| Term::BlankNode(BlankNode::new(format!("b{i}")))),
    ]
}

pub fn literal_term() -> impl Strategy<Value = Term> {
    (0..7usize).prop_map(|i| Term::Literal(literal(i)))
}

/// Four ordinary predicates and, when `with_type`, rdf:type.
pub fn predicate(with_type: bool) -> BoxedStrategy<Iri> {
    let plain = (0..4usize).prop_map(|i| ex(&format!("p{i}")));
    if with_type {
        prop_oneof![4 => plain, 1 => Just(Iri::new(vocab::RDF_TYPE).unwrap())].boxed()
    } else {
        plain.boxed()
    }
}

pub fn object_statement(with_type: bool) -> impl Strategy<Value = Statement> {
    (resource(), predicate(with_type), resource()).prop_map(|(s, p, o)| Statement::new(s, p, o).unwrap())
}

pub fn plain_statement(with_type: bool) -> impl Strategy<Value = Statement> {
    let object = prop_oneof![resource(), literal_term()];
    (resource(), predicate(with_type), object).prop_map(|(s, p, o)| Statement::new(s, p, o).unwrap())
}

/// Statements whose quoted triples nest at most `depth` levels.
pub fn star_statement(depth: u32) -> BoxedStrategy<Statement> {
    let leaf = plain_statement(true).boxed();
    if depth == 0 {
        return leaf;
    }
    let inner = star_statement(depth - 1);
    let quoted = inner.prop_map(|s| Term::Quoted(Box::new(s)));
    let subject = prop_oneof![2 => resource(), 1 => quoted.clone()];
    let object = prop_oneof![2 => resource(), 1 => literal_term(), 1 => quoted];
    prop_oneof![
        1 => leaf,
        2 => (subject, predicate(true), object).prop_map(|(s, p, o)| Statement::new(s, p, o).unwrap()),
    ]
    .boxed()
}

pub fn dataset_of(statements: &[Statement]) -> Dataset {
    let mut d = Dataset::with_scope("gen");
    for s in statements {
        d.insert(None, s.clone());
    }
    d
}

/// Up to ten statements spread over the default graph and two named graphs.
pub fn star_dataset() -> impl Strategy<Value = Dataset> {
    proptest::collection::vec((0..3usize, star_statement(2)), 0..=10).prop_map(|items| {
        let mut d = Dataset::with_scope("gen");
        for (g, s) in items {
            let name = (g > 0).then(|| ex(&format!("g{g}")));
            d.insert(name.as_ref(), s);
        }
        d
    })
}
