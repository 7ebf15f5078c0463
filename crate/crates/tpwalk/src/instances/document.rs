//! Versioned JSON documents for transportation instances and networks.
//!
//! ```json
//! {
//!   "version": 1,
//!   "kind": "transportation",
//!   "supplies": [3, 3],
//!   "demands": [2, 2, 2],
//!   "forbidden_edges": [[1, 3]],
//!   "trees": { "O": [[1, 1], [1, 2], [2, 2], [2, 3]] }
//! }
//! ```
//!
//! Networks use `excesses`, optional `nodes` labels and `arcs` whose
//! `tail`/`head` are 1-based indices or labels and whose `capacity` is an
//! integer or `"inf"`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use tpwalk_core::reduction::{Arc, Capacity, Network, ReductionError};
use tpwalk_core::{Edge, InstanceError, TransportationInstance};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DocumentBody {
    Transportation(TransportationInstance),
    Network { network: Network, labels: Option<Vec<String>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceDocument {
    pub body: DocumentBody,
    /// Named spanning trees, transportation documents only.
    pub trees: BTreeMap<String, Vec<Edge>>,
}

impl InstanceDocument {
    pub fn transportation(inst: TransportationInstance) -> Self {
        InstanceDocument { body: DocumentBody::Transportation(inst), trees: BTreeMap::new() }
    }

    pub fn network(network: Network) -> Self {
        InstanceDocument { body: DocumentBody::Network { network, labels: None }, trees: BTreeMap::new() }
    }

    pub fn with_tree(mut self, name: &str, edges: Vec<Edge>) -> Self {
        self.trees.insert(name.to_string(), edges);
        self
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            DocumentBody::Transportation(_) => "transportation",
            DocumentBody::Network { .. } => "network",
        }
    }

    pub fn as_transportation(&self) -> Option<&TransportationInstance> {
        match &self.body {
            DocumentBody::Transportation(inst) => Some(inst),
            DocumentBody::Network { .. } => None,
        }
    }

    pub fn as_network(&self) -> Option<&Network> {
        match &self.body {
            DocumentBody::Network { network, .. } => Some(network),
            DocumentBody::Transportation(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Json(String),
    #[error("unsupported schema version {0}")]
    UnsupportedVersion(u32),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("field `{field}` is not allowed in a {kind} document")]
    Misplaced { field: &'static str, kind: &'static str },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Network(#[from] ReductionError),
}

/// Parse failure with the position of the offending text, when known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<&'static str>,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: ")?,
            (Some(l), None) => write!(f, "line {l}: ")?,
            _ => {}
        }
        if let Some(field) = self.field {
            write!(f, "field `{field}`: ")?;
        }
        write!(f, "{}", self.kind)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Transportation,
    Network,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum NodeRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawCapacity {
    Finite(i64),
    Word(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArc {
    tail: NodeRef,
    head: NodeRef,
    capacity: RawCapacity,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    version: u32,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    supplies: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    demands: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    forbidden_edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    excesses: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arcs: Option<Vec<RawArc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trees: Option<BTreeMap<String, Vec<[usize; 2]>>>,
}

/// Line of the first occurrence of `"field"` in `text`.
fn field_line(text: &str, field: &str) -> Option<usize> {
    let needle = format!("\"{field}\"");
    text.lines().position(|l| l.contains(&needle)).map(|k| k + 1)
}

fn at_field(text: &str, field: &'static str, kind: ParseErrorKind) -> ParseError {
    ParseError { line: field_line(text, field), column: None, field: Some(field), kind }
}

fn edge_list(pairs: &[[usize; 2]]) -> Vec<Edge> {
    pairs.iter().map(|&[s, d]| Edge::new(s, d)).collect()
}

pub fn parse_instance(text: &str) -> Result<InstanceDocument, ParseError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| ParseError {
        line: Some(e.line()),
        column: Some(e.column()),
        field: None,
        kind: ParseErrorKind::Json(e.to_string()),
    })?;
    if raw.version != SCHEMA_VERSION {
        return Err(at_field(text, "version", ParseErrorKind::UnsupportedVersion(raw.version)));
    }
    match raw.kind {
        Kind::Transportation => parse_transportation(text, raw),
        Kind::Network => parse_network(text, raw),
    }
}

fn parse_transportation(text: &str, raw: RawDocument) -> Result<InstanceDocument, ParseError> {
    let kind = "transportation";
    for (present, field) in [
        (raw.nodes.is_some(), "nodes"),
        (raw.excesses.is_some(), "excesses"),
        (raw.arcs.is_some(), "arcs"),
    ] {
        if present {
            return Err(at_field(text, field, ParseErrorKind::Misplaced { field, kind }));
        }
    }
    let supplies = raw.supplies.ok_or(ParseError {
        line: None,
        column: None,
        field: None,
        kind: ParseErrorKind::MissingField("supplies"),
    })?;
    let demands = raw.demands.ok_or(ParseError {
        line: None,
        column: None,
        field: None,
        kind: ParseErrorKind::MissingField("demands"),
    })?;
    let forbidden = edge_list(&raw.forbidden_edges.unwrap_or_default());
    let inst = TransportationInstance::new(supplies, demands, forbidden).map_err(|e| {
        let field = match e {
            InstanceError::NonPositiveMargin { node: tpwalk_core::Node::Demand(_), .. } => "demands",
            InstanceError::EdgeOutOfRange(..) | InstanceError::DisconnectedAllowedGraph(_) => "forbidden_edges",
            _ => "supplies",
        };
        at_field(text, field, e.into())
    })?;
    let mut trees = BTreeMap::new();
    for (name, pairs) in raw.trees.unwrap_or_default() {
        let edges = edge_list(&pairs);
        if let Some(bad) = edges.iter().find(|e| !inst.contains_edge(**e)) {
            return Err(at_field(
                text,
                "trees",
                ParseErrorKind::Invalid(format!("tree `{name}` uses edge {bad} outside the instance")),
            ));
        }
        trees.insert(name, edges);
    }
    Ok(InstanceDocument { body: DocumentBody::Transportation(inst), trees })
}

fn parse_network(text: &str, raw: RawDocument) -> Result<InstanceDocument, ParseError> {
    let kind = "network";
    for (present, field) in [
        (raw.supplies.is_some(), "supplies"),
        (raw.demands.is_some(), "demands"),
        (raw.forbidden_edges.is_some(), "forbidden_edges"),
        (raw.trees.is_some(), "trees"),
    ] {
        if present {
            return Err(at_field(text, field, ParseErrorKind::Misplaced { field, kind }));
        }
    }
    let excess = raw.excesses.ok_or(ParseError {
        line: None,
        column: None,
        field: None,
        kind: ParseErrorKind::MissingField("excesses"),
    })?;
    if let Some(labels) = &raw.nodes {
        if labels.len() != excess.len() {
            return Err(at_field(
                text,
                "nodes",
                ParseErrorKind::Invalid(format!("{} labels for {} excesses", labels.len(), excess.len())),
            ));
        }
    }
    let resolve = |r: &NodeRef| -> Result<usize, ParseError> {
        match r {
            NodeRef::Index(i) => Ok(*i),
            NodeRef::Label(name) => raw
                .nodes
                .as_ref()
                .and_then(|labels| labels.iter().position(|l| l == name))
                .map(|k| k + 1)
                .ok_or_else(|| at_field(text, "arcs", ParseErrorKind::Invalid(format!("unknown node `{name}`")))),
        }
    };
    let mut arcs = Vec::new();
    for raw_arc in raw.arcs.as_deref().unwrap_or_default() {
        let capacity = match &raw_arc.capacity {
            RawCapacity::Finite(c) => Capacity::Finite(*c),
            RawCapacity::Word(w) if w == "inf" => Capacity::Infinite,
            RawCapacity::Word(w) => {
                return Err(at_field(
                    text,
                    "capacity",
                    ParseErrorKind::Invalid(format!("capacity must be an integer or \"inf\", got \"{w}\"")),
                ))
            }
        };
        arcs.push(Arc::new(resolve(&raw_arc.tail)?, resolve(&raw_arc.head)?, capacity));
    }
    let network = Network::new(excess, arcs).map_err(|e| {
        let field = match e {
            ReductionError::Unbalanced(_) => "excesses",
            _ => "arcs",
        };
        at_field(text, field, e.into())
    })?;
    Ok(InstanceDocument { body: DocumentBody::Network { network, labels: raw.nodes }, trees: BTreeMap::new() })
}

fn pairs(edges: impl IntoIterator<Item = Edge>) -> Vec<[usize; 2]> {
    edges.into_iter().map(|e| [e.supply, e.demand]).collect()
}

/// Canonical text: two-space indentation, flat arrays kept on one line.
pub fn serialize_instance(doc: &InstanceDocument) -> String {
    let mut raw = RawDocument {
        version: SCHEMA_VERSION,
        kind: Kind::Transportation,
        supplies: None,
        demands: None,
        forbidden_edges: None,
        nodes: None,
        excesses: None,
        arcs: None,
        trees: None,
    };
    match &doc.body {
        DocumentBody::Transportation(inst) => {
            raw.supplies = Some(inst.supplies().to_vec());
            raw.demands = Some(inst.demands().to_vec());
            if inst.is_face() {
                raw.forbidden_edges = Some(pairs(inst.forbidden().iter().copied()));
            }
            if !doc.trees.is_empty() {
                raw.trees = Some(doc.trees.iter().map(|(k, v)| (k.clone(), pairs(v.iter().copied()))).collect());
            }
        }
        DocumentBody::Network { network, labels } => {
            raw.kind = Kind::Network;
            raw.nodes = labels.clone();
            raw.excesses = Some(network.excess().to_vec());
            let node = |i: usize| match labels {
                Some(l) => NodeRef::Label(l[i - 1].clone()),
                None => NodeRef::Index(i),
            };
            raw.arcs = Some(
                network
                    .arcs()
                    .iter()
                    .map(|a| RawArc {
                        tail: node(a.tail),
                        head: node(a.head),
                        capacity: match a.capacity {
                            Capacity::Finite(c) => RawCapacity::Finite(c),
                            Capacity::Infinite => RawCapacity::Word("inf".into()),
                        },
                    })
                    .collect(),
            );
        }
    }
    let value = serde_json::to_value(&raw).expect("documents serialize");
    let mut out = String::new();
    write_value(&value, 0, &mut out);
    out.push('\n');
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_object() && (!x.is_array() || is_flat(x))),
        Value::Object(map) => map.values().all(|x| !x.is_object() && !x.is_array()),
        _ => true,
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent + 1);
    match v {
        Value::Object(map) if !is_flat(v) || map.len() > 3 => {
            out.push_str("{\n");
            for (k, (key, val)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(val, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
        Value::Array(items) if !is_flat(v) => {
            out.push_str("[\n");
            for (k, val) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(val, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Array(items) => {
            out.push('[');
            for (k, val) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(val, indent, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{ ");
            for (k, (key, val)) in map.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                out.push_str(&val.to_string());
            }
            out.push_str(" }");
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}
