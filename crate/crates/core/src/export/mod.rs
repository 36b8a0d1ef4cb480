//! Serializers for [`PropertyGraph`]s. All of them walk the graph's canonical
//! form, so the bytes depend only on graph content.

mod cypher;
mod graphml;
mod json;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::pg::PropertyGraph;

pub use cypher::{sanitize_identifier, to_cypher};
pub use graphml::{to_graphml, LIST_SEPARATOR};
pub use json::{from_json, to_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExportFormat {
    JsonPg,
    GraphMl,
    CypherScript,
}

impl ExportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::JsonPg => "json",
            ExportFormat::GraphMl => "graphml",
            ExportFormat::CypherScript => "cypher",
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for ExportFormat {
    type Err = crate::transform::UnknownVariant;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::JsonPg),
            "graphml" => Ok(ExportFormat::GraphMl),
            "cypher" => Ok(ExportFormat::CypherScript),
            _ => Err(crate::transform::UnknownVariant {
                what: "format",
                value: s.to_owned(),
                expected: "json, graphml, cypher",
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("{element}: value of {key:?} cannot be represented: {reason}")]
    UnrepresentableValue {
        element: String,
        key: String,
        reason: String,
    },
    #[error("{0:?} cannot be turned into a Cypher identifier")]
    UnsanitizableIdentifier(String),
    #[error("invalid graph JSON: {0}")]
    InvalidJson(String),
}

pub fn export(graph: &PropertyGraph, format: ExportFormat) -> Result<String, ExportError> {
    match format {
        ExportFormat::JsonPg => Ok(to_json(graph)),
        ExportFormat::GraphMl => to_graphml(graph),
        ExportFormat::CypherScript => to_cypher(graph),
    }
}
