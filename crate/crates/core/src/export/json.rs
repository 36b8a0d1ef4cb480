//! Compact JSON with sorted keys. Decimals and dates are wrapped as
//! `{"$decimal": "…"}` / `{"$date": "…"}` so that import restores the exact
//! value kind.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ExportError;
use crate::pg::{Decimal, Edge, Node, Properties, PropertyGraph, PropertyValue};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonGraph {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNode {
    id: String,
    labels: Vec<String>,
    properties: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEdge {
    id: String,
    source: String,
    target: String,
    labels: Vec<String>,
    properties: BTreeMap<String, Value>,
}

fn encode(value: &PropertyValue) -> Value {
    match value {
        PropertyValue::String(s) => Value::String(s.clone()),
        PropertyValue::Integer(i) => Value::from(*i),
        PropertyValue::Decimal(d) => serde_json::json!({ "$decimal": d.as_str() }),
        PropertyValue::Boolean(b) => Value::Bool(*b),
        PropertyValue::Date(d) => serde_json::json!({ "$date": d }),
        PropertyValue::List(items) => Value::Array(items.iter().map(encode).collect()),
    }
}

fn encode_all(props: &Properties) -> BTreeMap<String, Value> {
    props.iter().map(|(k, v)| (k.clone(), encode(v))).collect()
}

pub fn to_json(graph: &PropertyGraph) -> String {
    let cf = graph.canonical_form();
    let doc = JsonGraph {
        nodes: cf
            .nodes
            .iter()
            .map(|n| JsonNode {
                id: n.id.clone(),
                labels: n.labels.iter().cloned().collect(),
                properties: encode_all(&n.properties),
            })
            .collect(),
        edges: cf
            .edges
            .iter()
            .map(|e| JsonEdge {
                id: e.id.clone(),
                source: e.source.clone(),
                target: e.target.clone(),
                labels: e.labels.iter().cloned().collect(),
                properties: encode_all(&e.properties),
            })
            .collect(),
    };
    let mut out = serde_json::to_string(&doc).expect("graph serializes");
    out.push('\n');
    out
}

fn decode(key: &str, value: &Value, nested: bool) -> Result<PropertyValue, ExportError> {
    let bad = |why: &str| ExportError::InvalidJson(format!("property {key:?}: {why}"));
    match value {
        Value::String(s) => Ok(PropertyValue::String(s.clone())),
        Value::Bool(b) => Ok(PropertyValue::Boolean(*b)),
        Value::Number(n) => n.as_i64().map(PropertyValue::Integer).ok_or_else(|| bad("only integers are plain numbers")),
        Value::Object(map) if map.len() == 1 => match map.iter().next().expect("one entry") {
            (tag, Value::String(s)) if tag == "$decimal" => Decimal::parse(s)
                .map(PropertyValue::Decimal)
                .ok_or_else(|| bad("invalid decimal")),
            (tag, Value::String(s)) if tag == "$date" => Ok(PropertyValue::Date(s.clone())),
            _ => Err(bad("unknown tagged value")),
        },
        Value::Array(items) if !nested => {
            let items = items.iter().map(|v| decode(key, v, true)).collect::<Result<Vec<_>, _>>()?;
            PropertyValue::list(items).map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("unsupported value")),
    }
}

fn decode_all(props: &BTreeMap<String, Value>) -> Result<Properties, ExportError> {
    props.iter().map(|(k, v)| Ok((k.clone(), decode(k, v, false)?))).collect()
}

/// Reads the output of [`to_json`] back into a graph.
pub fn from_json(input: &str) -> Result<PropertyGraph, ExportError> {
    let doc: JsonGraph = serde_json::from_str(input).map_err(|e| ExportError::InvalidJson(e.to_string()))?;
    let mut graph = PropertyGraph::new();
    for n in doc.nodes {
        if graph.node(&n.id).is_some() {
            return Err(ExportError::InvalidJson(format!("duplicate node id {:?}", n.id)));
        }
        graph.insert_node(Node {
            properties: decode_all(&n.properties)?,
            id: n.id,
            labels: n.labels.into_iter().collect(),
        });
    }
    for e in doc.edges {
        if graph.edge(&e.id).is_some() {
            return Err(ExportError::InvalidJson(format!("duplicate edge id {:?}", e.id)));
        }
        let edge = Edge {
            properties: decode_all(&e.properties)?,
            id: e.id,
            source: e.source,
            target: e.target,
            labels: e.labels.into_iter().collect(),
        };
        graph
            .insert_edge(edge)
            .map_err(|err| ExportError::InvalidJson(err.to_string()))?;
    }
    Ok(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PropertyGraph {
        let mut g = PropertyGraph::new();
        let mut props = Properties::new();
        props.insert("iri".into(), "http://example.org/alice".into());
        props.insert("d".into(), Decimal::parse("0.5").unwrap().into());
        props.insert("t".into(), PropertyValue::Date("1963-03-22".into()));
        props.insert("l".into(), PropertyValue::List(vec![1.into(), 2.into()]));
        props.insert("b".into(), true.into());
        let a = g.upsert_node("iri:http://example.org/alice", ["Resource".to_owned()], props).unwrap();
        let b = g.upsert_node("iri:http://example.org/bob", ["Resource".to_owned()], Properties::new()).unwrap();
        g.add_edge(&a, &b, ["meets".to_owned(), "ObjectProperty".to_owned()], Properties::new())
            .unwrap();
        g
    }

    #[test]
    fn empty_graph() {
        assert_eq!(to_json(&PropertyGraph::new()), "{\"nodes\":[],\"edges\":[]}\n");
    }

    #[test]
    fn layout_and_tags() {
        let out = to_json(&sample());
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["nodes"][0]["id"], "n:iri:http://example.org/alice");
        assert_eq!(v["nodes"][0]["properties"]["d"], serde_json::json!({"$decimal": "0.5"}));
        assert_eq!(v["nodes"][0]["properties"]["t"], serde_json::json!({"$date": "1963-03-22"}));
        assert_eq!(v["edges"][0]["labels"], serde_json::json!(["ObjectProperty", "meets"]));
        assert!(out.starts_with("{\"nodes\":[{\"id\":"));
        assert!(out.ends_with("}\n"));
    }

    #[test]
    fn round_trip() {
        let g = sample();
        let back = from_json(&to_json(&g)).unwrap();
        assert_eq!(back, g);
        assert_eq!(to_json(&back), to_json(&g));
    }

    #[test]
    fn import_rejects_bad_input() {
        for bad in [
            "",
            "{\"nodes\":[]}",
            "{\"nodes\":[],\"edges\":[{\"id\":\"e\",\"source\":\"x\",\"target\":\"y\",\"labels\":[],\"properties\":{}}]}",
            "{\"nodes\":[{\"id\":\"n\",\"labels\":[],\"properties\":{\"k\":1.5}}],\"edges\":[]}",
            "{\"nodes\":[{\"id\":\"n\",\"labels\":[],\"properties\":{\"k\":[[1]]}}],\"edges\":[]}",
            "{\"nodes\":[{\"id\":\"n\",\"labels\":[],\"properties\":{\"k\":[1,\"a\"]}}],\"edges\":[]}",
        ] {
            assert!(from_json(bad).is_err(), "{bad}");
        }
    }
}
