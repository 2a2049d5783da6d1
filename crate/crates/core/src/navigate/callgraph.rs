//! Top-down call-graph expansion from an entry member.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::config::LayerKind;
use crate::resolve::{EdgeKind, ResolvedEdge};
use crate::store::{member_name, GraphSnapshot, Node, NodeKind};
use crate::{Error, Result};

pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphOptions {
    pub max_depth: usize,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StopReason {
    NoMatches,
    DataLayerReached,
    ThirdPartyLeaf,
    AnonymousLeaf,
    WebServiceProxyLeaf,
    DepthCap,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub name: String,
    pub kind: NodeKind,
    pub layer: LayerKind,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    /// Receiver offset of the first call site producing the edge.
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BackEdge {
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallGraph {
    pub root: String,
    /// Discovery (pre-)order.
    pub nodes: Vec<GraphNode>,
    /// Tree edges in discovery order.
    pub edges: Vec<GraphEdge>,
    pub back_edges: Vec<BackEdge>,
    pub stop_reasons: BTreeMap<String, StopReason>,
}

impl CallGraph {
    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Distinct member names without parameter lists, skipping external,
    /// anonymous and unresolved leaves.
    pub fn member_names(&self) -> std::collections::BTreeSet<String> {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Method | NodeKind::Property))
            .map(|n| member_name(&n.id).to_string())
            .collect()
    }
}

struct Frame<'e> {
    id: &'e str,
    depth: usize,
    children: Vec<&'e ResolvedEdge>,
    next: usize,
    tree_children: usize,
}

/// Outgoing-edge index over one snapshot, reusable across generations.
pub struct Navigator<'a> {
    snapshot: &'a GraphSnapshot,
    out: HashMap<&'a str, Vec<&'a ResolvedEdge>>,
}

impl<'a> Navigator<'a> {
    pub fn new(snapshot: &'a GraphSnapshot) -> Self {
        let mut out: HashMap<&str, Vec<&ResolvedEdge>> = HashMap::new();
        for e in &snapshot.edges {
            out.entry(e.from.as_str()).or_default().push(e);
        }
        for list in out.values_mut() {
            list.sort_by(|a, b| (a.offset, &a.file, &a.to).cmp(&(b.offset, &b.file, &b.to)));
        }
        Navigator { snapshot, out }
    }

    /// Exact member id, or a parameterless name matching one member.
    pub fn find_entry(&self, entry: &str) -> Result<&'a Node> {
        if let Some(n) = self.snapshot.node(entry).filter(|n| n.is_member()) {
            return Ok(n);
        }
        let wanted: String = entry.split_whitespace().collect();
        let matches: Vec<&Node> = self
            .snapshot
            .nodes
            .iter()
            .filter(|n| n.is_member() && member_name(&n.id) == wanted)
            .collect();
        match matches.as_slice() {
            [one] => Ok(one),
            [] => Err(Error::NotFound(format!("entry `{entry}`"))),
            many => Err(Error::Validation(format!(
                "entry `{entry}` is ambiguous: {}",
                many.iter().map(|n| n.id.as_str()).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn generate(&self, entry: &str, opts: GraphOptions) -> Result<CallGraph> {
        let root = self.find_entry(entry)?;
        let mut g = CallGraph {
            root: root.id.clone(),
            nodes: vec![graph_node(root, 0)],
            edges: Vec::new(),
            back_edges: Vec::new(),
            stop_reasons: BTreeMap::new(),
        };
        let mut seen: HashSet<&str> = HashSet::from([root.id.as_str()]);
        let mut back_seen = HashSet::new();
        let mut stack: Vec<Frame> = Vec::new();
        match self.stop_for(root, None, 0, opts, true) {
            Some(reason) => {
                g.stop_reasons.insert(root.id.clone(), reason);
            }
            None => stack.push(self.frame(root, 0)),
        }

        while let Some(top) = stack.last_mut() {
            if top.next == top.children.len() {
                let done = stack.pop().expect("non-empty");
                if done.tree_children == 0 {
                    g.stop_reasons.insert(done.id.to_string(), StopReason::NoMatches);
                }
                continue;
            }
            let edge = top.children[top.next];
            top.next += 1;
            let (from, depth) = (top.id, top.depth + 1);
            if !seen.insert(edge.to.as_str()) {
                if back_seen.insert((from, edge.to.as_str())) {
                    g.back_edges.push(BackEdge {
                        from: from.to_string(),
                        to: edge.to.clone(),
                    });
                }
                continue;
            }
            top.tree_children += 1;
            let child = self
                .snapshot
                .node(&edge.to)
                .expect("snapshot integrity: edge targets are nodes");
            g.nodes.push(graph_node(child, depth));
            g.edges.push(GraphEdge {
                from: from.to_string(),
                to: edge.to.clone(),
                kind: edge.kind,
                offset: edge.offset,
            });
            match self.stop_for(child, Some(edge.kind), depth, opts, false) {
                Some(reason) => {
                    g.stop_reasons.insert(child.id.clone(), reason);
                }
                None => stack.push(self.frame(child, depth)),
            }
        }
        Ok(g)
    }

    /// Children in source order, one per distinct target.
    fn frame(&self, node: &'a Node, depth: usize) -> Frame<'a> {
        let mut targets = HashSet::new();
        let children = self
            .out
            .get(node.id.as_str())
            .map(|v| v.iter().copied().filter(|e| targets.insert(e.to.as_str())).collect())
            .unwrap_or_default();
        Frame {
            id: &node.id,
            depth,
            children,
            next: 0,
            tree_children: 0,
        }
    }

    fn stop_for(&self, node: &Node, via: Option<EdgeKind>, depth: usize, opts: GraphOptions, is_root: bool) -> Option<StopReason> {
        match node.kind {
            NodeKind::External => return Some(StopReason::ThirdPartyLeaf),
            NodeKind::Anonymous => return Some(StopReason::AnonymousLeaf),
            NodeKind::Unresolved => return Some(StopReason::Unresolved),
            _ => {}
        }
        let has_children = self.out.get(node.id.as_str()).is_some_and(|v| !v.is_empty());
        if !is_root {
            if via == Some(EdgeKind::WebServiceProxy) || node.proxy {
                return Some(StopReason::WebServiceProxyLeaf);
            }
            if node.layer == LayerKind::Data {
                return Some(StopReason::DataLayerReached);
            }
        }
        if !has_children {
            return Some(StopReason::NoMatches);
        }
        if depth >= opts.max_depth {
            return Some(StopReason::DepthCap);
        }
        None
    }
}

fn graph_node(n: &Node, depth: usize) -> GraphNode {
    GraphNode {
        id: n.id.clone(),
        name: n.name.clone(),
        kind: n.kind,
        layer: n.layer,
        depth,
    }
}

pub fn generate_call_graph(entry: &str, snapshot: &GraphSnapshot, opts: GraphOptions) -> Result<CallGraph> {
    Navigator::new(snapshot).generate(entry, opts)
}
