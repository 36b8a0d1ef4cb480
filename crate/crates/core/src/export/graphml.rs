//! GraphML. Labels go into a `labels` data key (semicolon-joined) since
//! GraphML has no native labels. List values are joined with U+001F and their
//! key is marked `attr.list="true"`; U+001F is only legal in XML 1.1, so a
//! document that contains lists declares that version.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::ExportError;
use crate::pg::{Properties, PropertyGraph, PropertyValue, ValueKind};

pub const LIST_SEPARATOR: char = '\u{1F}';

#[derive(Clone, Copy, PartialEq, Eq)]
enum Domain {
    Node,
    Edge,
}

impl Domain {
    fn as_str(self) -> &'static str {
        match self {
            Domain::Node => "node",
            Domain::Edge => "edge",
        }
    }
}

struct Key {
    id: String,
    attr_type: &'static str,
    list: bool,
}

fn scalar_type(kind: ValueKind) -> &'static str {
    match kind {
        ValueKind::Integer => "long",
        ValueKind::Boolean => "boolean",
        _ => "string",
    }
}

fn value_type(value: &PropertyValue) -> &'static str {
    match value {
        PropertyValue::List(items) => {
            let kinds: std::collections::BTreeSet<_> = items.iter().map(PropertyValue::kind).collect();
            match kinds.len() {
                1 => scalar_type(*kinds.iter().next().expect("one kind")),
                _ => "string",
            }
        }
        v => scalar_type(v.kind()),
    }
}

/// Collects key declarations for one domain: `labels` first, then property
/// keys in sorted order. A key whose values disagree on type is a string key.
fn declare<'a>(
    elements: impl Iterator<Item = &'a Properties>,
    next_id: &mut usize,
) -> (String, BTreeMap<String, Key>) {
    let mut types: BTreeMap<String, (Option<&'static str>, bool)> = BTreeMap::new();
    for props in elements {
        for (k, v) in props {
            let entry = types.entry(k.clone()).or_insert((None, false));
            let t = value_type(v);
            entry.0 = match entry.0 {
                None => Some(t),
                Some(prev) if prev == t => Some(t),
                Some(_) => Some("string"),
            };
            entry.1 |= matches!(v, PropertyValue::List(_));
        }
    }
    let labels_id = format!("d{next_id}");
    *next_id += 1;
    let mut keys = BTreeMap::new();
    for (name, (t, list)) in types {
        keys.insert(
            name,
            Key {
                id: format!("d{next_id}"),
                attr_type: t.unwrap_or("string"),
                list,
            },
        );
        *next_id += 1;
    }
    (labels_id, keys)
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r') || (c >= ' ' && !matches!(c, '\u{FFFE}' | '\u{FFFF}'))
}

fn escape(out: &mut String, text: &str) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\r' => out.push_str("&#xD;"),
            c => out.push(c),
        }
    }
}

fn check_text(element: &str, key: &str, text: &str) -> Result<(), ExportError> {
    match text.chars().find(|c| !is_xml_char(*c)) {
        None => Ok(()),
        Some(c) => Err(ExportError::UnrepresentableValue {
            element: element.to_owned(),
            key: key.to_owned(),
            reason: format!("character U+{:04X} is not allowed in XML", c as u32),
        }),
    }
}

fn scalar_text(value: &PropertyValue) -> String {
    match value {
        PropertyValue::Boolean(b) => b.to_string(),
        v => v.lexical(),
    }
}

fn write_value(out: &mut String, element: &str, key: &str, value: &PropertyValue) -> Result<(), ExportError> {
    match value {
        PropertyValue::List(items) => {
            for (i, item) in items.iter().enumerate() {
                let text = scalar_text(item);
                if text.contains(LIST_SEPARATOR) {
                    return Err(ExportError::UnrepresentableValue {
                        element: element.to_owned(),
                        key: key.to_owned(),
                        reason: "list element contains the list separator U+001F".into(),
                    });
                }
                check_text(element, key, &text)?;
                if i > 0 {
                    out.push_str("&#x1F;");
                }
                escape(out, &text);
            }
        }
        v => {
            let text = scalar_text(v);
            check_text(element, key, &text)?;
            escape(out, &text);
        }
    }
    Ok(())
}

fn write_data(
    out: &mut String,
    element: &str,
    labels_id: &str,
    labels: &std::collections::BTreeSet<String>,
    keys: &BTreeMap<String, Key>,
    props: &Properties,
) -> Result<(), ExportError> {
    if let Some(bad) = labels.iter().find(|l| l.contains(';')) {
        return Err(ExportError::UnrepresentableValue {
            element: element.to_owned(),
            key: "labels".into(),
            reason: format!("label {bad:?} contains the label separator ';'"),
        });
    }
    let joined = labels.iter().cloned().collect::<Vec<_>>().join(";");
    check_text(element, "labels", &joined)?;
    let _ = write!(out, "      <data key=\"{labels_id}\">");
    escape(out, &joined);
    out.push_str("</data>\n");
    for (k, v) in props {
        let _ = write!(out, "      <data key=\"{}\">", keys[k].id);
        write_value(out, element, k, v)?;
        out.push_str("</data>\n");
    }
    Ok(())
}

pub fn to_graphml(graph: &PropertyGraph) -> Result<String, ExportError> {
    let cf = graph.canonical_form();
    let mut next_id = 0;
    let (node_labels, node_keys) = declare(cf.nodes.iter().map(|n| &n.properties), &mut next_id);
    let (edge_labels, edge_keys) = declare(cf.edges.iter().map(|e| &e.properties), &mut next_id);
    let has_lists = node_keys.values().chain(edge_keys.values()).any(|k| k.list);

    let mut out = String::new();
    let version = if has_lists { "1.1" } else { "1.0" };
    let _ = writeln!(out, "<?xml version=\"{version}\" encoding=\"UTF-8\"?>");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (domain, labels_id, keys) in [(Domain::Node, &node_labels, &node_keys), (Domain::Edge, &edge_labels, &edge_keys)] {
        let _ = writeln!(
            out,
            "  <key id=\"{labels_id}\" for=\"{}\" attr.name=\"labels\" attr.type=\"string\"/>",
            domain.as_str()
        );
        for (name, key) in keys {
            check_text(domain.as_str(), name, name)?;
            let _ = write!(out, "  <key id=\"{}\" for=\"{}\" attr.name=\"", key.id, domain.as_str());
            escape(&mut out, name);
            let _ = write!(out, "\" attr.type=\"{}\"", key.attr_type);
            if key.list {
                out.push_str(" attr.list=\"true\"");
            }
            out.push_str("/>\n");
        }
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    for n in &cf.nodes {
        check_text(&n.id, "id", &n.id)?;
        out.push_str("    <node id=\"");
        escape(&mut out, &n.id);
        out.push_str("\">\n");
        write_data(&mut out, &n.id, &node_labels, &n.labels, &node_keys, &n.properties)?;
        out.push_str("    </node>\n");
    }
    for e in &cf.edges {
        out.push_str("    <edge id=\"");
        escape(&mut out, &e.id);
        out.push_str("\" source=\"");
        escape(&mut out, &e.source);
        out.push_str("\" target=\"");
        escape(&mut out, &e.target);
        out.push_str("\">\n");
        write_data(&mut out, &e.id, &edge_labels, &e.labels, &edge_keys, &e.properties)?;
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    Ok(out)
}
