//! DOT and JSON renderings of a call graph.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::str::FromStr;

use super::callgraph::CallGraph;
use crate::config::LayerKind;
use crate::json::to_canonical_json;
use crate::resolve::EdgeKind;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(Error::Validation(format!("unknown graph format `{other}` (expected dot or json)"))),
        }
    }
}

pub fn export_graph(graph: &CallGraph, format: GraphFormat) -> Result<Vec<u8>> {
    match format {
        GraphFormat::Json => Ok(to_canonical_json(graph)?.into_bytes()),
        GraphFormat::Dot => Ok(to_dot(graph).into_bytes()),
    }
}

pub fn graph_from_json(bytes: &[u8]) -> Result<CallGraph> {
    Ok(serde_json::from_slice(bytes)?)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn edge_style(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::IntraLayer => "color=black",
        EdgeKind::InterLayer => "color=blue",
        EdgeKind::InvertedLayer => "color=red",
        EdgeKind::Static => "color=darkgreen",
        EdgeKind::WebServiceProxy => "color=purple",
        EdgeKind::ThirdParty => "color=gray50",
        EdgeKind::AnonymousLeaf => "color=gray50, style=dotted",
        EdgeKind::Unresolved => "color=orange, style=dotted",
    }
}

/// One cluster per layer; back edges are dashed and do not constrain rank.
pub fn to_dot(graph: &CallGraph) -> String {
    let mut by_layer: BTreeMap<LayerKind, Vec<usize>> = BTreeMap::new();
    for (i, n) in graph.nodes.iter().enumerate() {
        by_layer.entry(n.layer).or_default().push(i);
    }
    let mut out = String::from("digraph callgraph {\n  rankdir=TB;\n  node [shape=box, fontname=\"Helvetica\"];\n");
    for (layer, idx) in &by_layer {
        let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{}", layer.as_str())));
        let _ = writeln!(out, "    label={};", quote(layer.as_str()));
        for &i in idx {
            let n = &graph.nodes[i];
            let mut label = n.name.clone();
            if let Some(r) = graph.stop_reasons.get(&n.id) {
                let _ = write!(label, "\n[{r:?}]");
            }
            let _ = writeln!(out, "    {} [label={}];", quote(&n.id), quote(&label));
        }
        out.push_str("  }\n");
    }
    for e in &graph.edges {
        let _ = writeln!(out, "  {} -> {} [{}];", quote(&e.from), quote(&e.to), edge_style(e.kind));
    }
    for b in &graph.back_edges {
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed, color=firebrick, constraint=false, label=\"back\"];",
            quote(&b.from),
            quote(&b.to)
        );
    }
    out.push_str("}\n");
    out
}
