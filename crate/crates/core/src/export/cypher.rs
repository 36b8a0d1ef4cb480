//! openCypher `CREATE` script: one clause per node binding `n0`, `n1`, …,
//! then one clause per edge. The whole script is a single query terminated by
//! `;`. Relationships take exactly one type in openCypher, so an edge with
//! several labels is typed by its predicate label and keeps all labels in an
//! `_labels` list property.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use super::ExportError;
use crate::pg::{Properties, PropertyGraph, PropertyValue};

const KIND_TAGS: [&str; 2] = ["ObjectProperty", "DatatypeProperty"];

/// Maps a label or key onto `[A-Za-z_][A-Za-z0-9_]*`: other characters become
/// `_` and a leading digit gets a `_` prefix.
pub fn sanitize_identifier(raw: &str) -> Result<String, ExportError> {
    if raw.is_empty() {
        return Err(ExportError::UnsanitizableIdentifier(raw.to_owned()));
    }
    let mut out: String = raw
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    Ok(out)
}

fn quote(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn is_plain_date(s: &str) -> bool {
    s.len() == 10 && s.bytes().enumerate().all(|(i, b)| if i == 4 || i == 7 { b == b'-' } else { b.is_ascii_digit() })
}

fn literal(out: &mut String, value: &PropertyValue) {
    match value {
        PropertyValue::String(s) => quote(out, s),
        PropertyValue::Integer(i) => {
            let _ = write!(out, "{i}");
        }
        PropertyValue::Decimal(d) => out.push_str(d.as_str()),
        PropertyValue::Boolean(b) => {
            let _ = write!(out, "{b}");
        }
        PropertyValue::Date(d) if is_plain_date(d) => {
            out.push_str("date(");
            quote(out, d);
            out.push(')');
        }
        PropertyValue::Date(d) => quote(out, d),
        PropertyValue::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                literal(out, item);
            }
            out.push(']');
        }
    }
}

/// `{id: "…", key: value, …}` with sanitized keys; sanitized names must stay
/// distinct.
fn property_map(out: &mut String, id: &str, extra: Option<(&str, PropertyValue)>, props: &Properties) -> Result<(), ExportError> {
    let mut entries: Vec<(String, PropertyValue)> = vec![("id".to_owned(), PropertyValue::String(id.to_owned()))];
    entries.extend(extra.map(|(k, v)| (k.to_owned(), v)));
    let mut seen: BTreeSet<String> = entries.iter().map(|(k, _)| k.clone()).collect();
    for (k, v) in props {
        let name = sanitize_identifier(k)?;
        if !seen.insert(name.clone()) {
            return Err(ExportError::UnsanitizableIdentifier(k.clone()));
        }
        entries.push((name, v.clone()));
    }
    out.push_str(" {");
    for (i, (k, v)) in entries.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{k}: ");
        literal(out, v);
    }
    out.push('}');
    Ok(())
}

fn label_list(labels: &BTreeSet<String>) -> Result<Vec<String>, ExportError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for l in labels {
        let s = sanitize_identifier(l)?;
        if !seen.insert(s.clone()) {
            return Err(ExportError::UnsanitizableIdentifier(l.clone()));
        }
        out.push(s);
    }
    Ok(out)
}

/// The relationship type: the first label that is not a statement-kind tag,
/// else the first label.
fn relationship_type(labels: &BTreeSet<String>) -> Option<&String> {
    labels
        .iter()
        .find(|l| !KIND_TAGS.contains(&l.as_str()))
        .or_else(|| labels.iter().next())
}

pub fn to_cypher(graph: &PropertyGraph) -> Result<String, ExportError> {
    let cf = graph.canonical_form();
    if cf.nodes.is_empty() {
        return Ok(String::new());
    }
    let mut vars: HashMap<&str, String> = HashMap::new();
    let mut clauses = Vec::new();
    for (i, n) in cf.nodes.iter().enumerate() {
        let var = format!("n{i}");
        let mut clause = format!("CREATE ({var}");
        for l in label_list(&n.labels)? {
            let _ = write!(clause, ":{l}");
        }
        property_map(&mut clause, &n.id, None, &n.properties)?;
        clause.push(')');
        clauses.push(clause);
        vars.insert(n.id.as_str(), var);
    }
    for e in &cf.edges {
        let rel = relationship_type(&e.labels).ok_or_else(|| ExportError::UnsanitizableIdentifier(String::new()))?;
        let rel = sanitize_identifier(rel)?;
        let extra = (e.labels.len() > 1).then(|| {
            let all = e.labels.iter().map(|l| PropertyValue::String(l.clone())).collect();
            ("_labels", PropertyValue::List(all))
        });
        let mut clause = format!("CREATE ({})-[:{rel}", vars[e.source.as_str()]);
        property_map(&mut clause, &e.id, extra, &e.properties)?;
        let _ = write!(clause, "]->({})", vars[e.target.as_str()]);
        clauses.push(clause);
    }
    let mut out = clauses.join("\n");
    out.push_str(";\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pg::Decimal;

    fn case1() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        let iri = |s: &str| -> Properties { [("iri".to_owned(), PropertyValue::from(s))].into() };
        let a = g
            .upsert_node("iri:http://example.org/alice", ["Resource".to_owned()], iri("http://example.org/alice"))
            .unwrap();
        let b = g
            .upsert_node("iri:http://example.org/bob", ["Resource".to_owned()], iri("http://example.org/bob"))
            .unwrap();
        let mut p = Properties::new();
        p.insert("certainty".into(), Decimal::parse("0.5").unwrap().into());
        g.add_edge(&a, &b, ["meets".to_owned(), "ObjectProperty".to_owned()], p).unwrap();
        g
    }

    #[test]
    fn sanitizing() {
        assert_eq!(sanitize_identifier("meets").unwrap(), "meets");
        assert_eq!(sanitize_identifier("22-rdf-syntax-nstype").unwrap(), "_22_rdf_syntax_nstype");
        assert_eq!(sanitize_identifier("mentionedBy.source").unwrap(), "mentionedBy_source");
        assert_eq!(sanitize_identifier("inv:source").unwrap(), "inv_source");
        assert!(sanitize_identifier("").is_err());
    }

    #[test]
    fn empty_graph_is_empty_script() {
        assert_eq!(to_cypher(&PropertyGraph::new()).unwrap(), "");
    }

    #[test]
    fn script_shape() {
        let out = to_cypher(&case1()).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "CREATE (n0:Resource {id: \"n:iri:http://example.org/alice\", iri: \"http://example.org/alice\"})"
        );
        assert!(lines[2].starts_with("CREATE (n0)-[:meets {id: \"e:"));
        assert!(lines[2].contains("_labels: [\"ObjectProperty\", \"meets\"]"));
        assert!(lines[2].contains("certainty: 0.5"));
        assert!(lines[2].ends_with("]->(n1);"));
        assert!(out.ends_with(";\n"));
    }

    #[test]
    fn values_and_escaping() {
        let mut s = String::new();
        literal(&mut s, &PropertyValue::String("say \"hi\"\\\n".into()));
        assert_eq!(s, r#""say \"hi\"\\\n""#);
        s.clear();
        literal(&mut s, &PropertyValue::Date("1963-03-22".into()));
        assert_eq!(s, "date(\"1963-03-22\")");
        s.clear();
        literal(&mut s, &PropertyValue::List(vec![1.into(), 2.into()]));
        assert_eq!(s, "[1, 2]");
    }

    #[test]
    fn colliding_keys_are_rejected() {
        let mut g = PropertyGraph::new();
        let mut p = Properties::new();
        p.insert("a.b".into(), 1.into());
        p.insert("a:b".into(), 2.into());
        g.upsert_node("k", ["X".to_owned()], p).unwrap();
        assert!(matches!(to_cypher(&g), Err(ExportError::UnsanitizableIdentifier(_))));
        let mut g = PropertyGraph::new();
        g.upsert_node("k", ["X".to_owned()], [("id".to_owned(), PropertyValue::from("x"))].into())
            .unwrap();
        assert!(to_cypher(&g).is_err());
    }
}
