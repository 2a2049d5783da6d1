//! The persisted result of one sweep.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{LayerKind, ProjectConfig};
use crate::corpus::FileRecord;
use crate::diag::{self, Diagnostic};
use crate::resolve::{sort_edges, EdgeKind, Resolution, ResolvedEdge, ANON_PREFIX, EXTERNAL_PREFIX, UNRESOLVED_PREFIX};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeKind {
    Class,
    Method,
    Property,
    External,
    Anonymous,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    /// Fully-qualified name without parameter list.
    pub name: String,
    pub kind: NodeKind,
    pub layer: LayerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    /// Owning class for members, calling member for anonymous leaves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub proxy: bool,
}

impl Node {
    pub fn is_member(&self) -> bool {
        matches!(self.kind, NodeKind::Method | NodeKind::Property)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectCounts {
    pub class_count: usize,
    pub function_count: usize,
    pub property_count: usize,
    /// Edges leaving members of the project.
    pub edge_count: usize,
}

impl ProjectCounts {
    /// Node plus edge count, the structural graph size.
    pub fn graph_size(&self) -> usize {
        self.class_count + self.function_count + self.property_count + self.edge_count
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub snapshot_id: String,
    pub created_at: DateTime<Utc>,
    /// SHA-256 over the sorted `(file key, content hash)` list.
    pub corpus_hash: String,
    pub files: Vec<FileRecord>,
    pub nodes: Vec<Node>,
    pub edges: Vec<ResolvedEdge>,
    pub per_project_counts: BTreeMap<String, ProjectCounts>,
    pub diagnostics: Vec<Diagnostic>,
    pub diagnostics_summary: BTreeMap<String, usize>,
}

/// Member name without its parameter list.
pub fn member_name(id: &str) -> &str {
    id.split_once('(').map_or(id, |(name, _)| name)
}

pub fn corpus_hash(files: &[FileRecord]) -> String {
    let mut keys: Vec<(String, &str)> = files.iter().map(|f| (f.key(), f.content_hash.as_str())).collect();
    keys.sort();
    let mut h = Sha256::new();
    for (k, c) in keys {
        h.update(k.as_bytes());
        h.update([0]);
        h.update(c.as_bytes());
        h.update(*b"\n");
    }
    hex::encode(h.finalize())
}

pub fn snapshot_id(created_at: &DateTime<Utc>, corpus_hash: &str) -> String {
    format!("{}-{}", created_at.format("%Y%m%dT%H%M%S%.3fZ"), &corpus_hash[..12.min(corpus_hash.len())])
}

impl GraphSnapshot {
    /// Assembles a snapshot from a resolved sweep.
    pub fn assemble(
        mut files: Vec<FileRecord>,
        resolution: &Resolution,
        mut diagnostics: Vec<Diagnostic>,
        configs: &[ProjectConfig],
        created_at: DateTime<Utc>,
    ) -> GraphSnapshot {
        files.sort_by(|a, b| (&a.project_id, &a.path).cmp(&(&b.project_id, &b.path)));
        let layer_of = |project: &str, ns: &str| {
            configs
                .iter()
                .find(|c| c.project_id == project)
                .map_or(LayerKind::Unknown, |c| c.layer_of(ns))
        };

        let mut nodes = Vec::new();
        for (cid, c) in &resolution.index.classes {
            let m = &c.model;
            let layer = layer_of(&m.project_id, &m.namespace);
            nodes.push(Node {
                id: cid.clone(),
                name: cid.clone(),
                kind: NodeKind::Class,
                layer,
                project: Some(m.project_id.clone()),
                file: Some(c.files[0].clone()),
                parent: None,
                proxy: c.is_proxy,
            });
            let members = m
                .methods
                .iter()
                .map(|x| (&x.id, NodeKind::Method))
                .chain(m.properties.iter().map(|p| (&p.id, NodeKind::Property)));
            let mut seen = BTreeSet::new();
            for (id, kind) in members {
                // a repeated signature in a merged partial class is one node
                if !seen.insert(id) {
                    continue;
                }
                nodes.push(Node {
                    id: id.clone(),
                    name: member_name(id).to_string(),
                    kind,
                    layer,
                    project: Some(m.project_id.clone()),
                    file: c.member_files.get(id).cloned(),
                    parent: Some(cid.clone()),
                    proxy: c.is_proxy,
                });
            }
        }
        let mut leaf_ids = BTreeSet::new();
        for e in &resolution.edges {
            if !leaf_ids.insert(e.to.clone()) {
                continue;
            }
            let leaf = if let Some(rest) = e.to.strip_prefix(EXTERNAL_PREFIX) {
                Some((rest.to_string(), NodeKind::External, LayerKind::ThirdParty, None))
            } else if let Some(rest) = e.to.strip_prefix(UNRESOLVED_PREFIX) {
                Some((rest.to_string(), NodeKind::Unresolved, LayerKind::Unknown, None))
            } else if e.to.starts_with(ANON_PREFIX) {
                Some((e.to.clone(), NodeKind::Anonymous, e.from_layer, Some(e.from.clone())))
            } else {
                None
            };
            if let Some((name, kind, layer, parent)) = leaf {
                nodes.push(Node {
                    id: e.to.clone(),
                    name,
                    kind,
                    layer,
                    project: None,
                    file: None,
                    parent,
                    proxy: false,
                });
            }
        }
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        nodes.dedup_by(|a, b| a.id == b.id);

        let mut edges = resolution.edges.clone();
        sort_edges(&mut edges);
        diagnostics.extend(resolution.diagnostics.iter().cloned());
        diagnostics.sort();
        diagnostics.dedup();
        let diagnostics_summary = diag::summarize(&diagnostics);
        let per_project_counts =
            count_per_project(&nodes, &edges, configs.iter().map(|c| c.project_id.as_str()));
        let corpus_hash = corpus_hash(&files);
        GraphSnapshot {
            snapshot_id: snapshot_id(&created_at, &corpus_hash),
            created_at,
            corpus_hash,
            files,
            nodes,
            edges,
            per_project_counts,
            diagnostics,
            diagnostics_summary,
        }
    }

    /// Equal apart from id and timestamp.
    pub fn content_eq(&self, other: &GraphSnapshot) -> bool {
        self.corpus_hash == other.corpus_hash
            && self.files == other.files
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.per_project_counts == other.per_project_counts
            && self.diagnostics == other.diagnostics
            && self.diagnostics_summary == other.diagnostics_summary
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes
            .binary_search_by(|n| n.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn method_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().filter(|n| n.kind == NodeKind::Method).map(|n| n.id.as_str())
    }

    /// Every edge endpoint is a node; counts match the nodes and edges.
    pub fn check_integrity(&self) -> Result<()> {
        let err = |message: String| Error::Integrity {
            path: self.snapshot_id.clone().into(),
            message,
        };
        if self.nodes.windows(2).any(|w| w[0].id >= w[1].id) {
            return Err(err("nodes are not sorted by unique id".into()));
        }
        for e in &self.edges {
            for end in [&e.from, &e.to] {
                if self.node(end).is_none() {
                    return Err(err(format!("edge endpoint `{end}` is not a node")));
                }
            }
            if e.kind == EdgeKind::AnonymousLeaf && !e.to.starts_with(ANON_PREFIX) {
                return Err(err(format!("anonymous edge to `{}`", e.to)));
            }
        }
        let seeds = self.per_project_counts.keys().map(String::as_str);
        if count_per_project(&self.nodes, &self.edges, seeds) != self.per_project_counts {
            return Err(err("per-project counts disagree with nodes".into()));
        }
        if diag::summarize(&self.diagnostics) != self.diagnostics_summary {
            return Err(err("diagnostics summary disagrees with records".into()));
        }
        Ok(())
    }

    /// Short description for listings and the API.
    pub fn summary(&self) -> SnapshotSummary {
        SnapshotSummary {
            snapshot_id: self.snapshot_id.clone(),
            created_at: self.created_at,
            corpus_hash: self.corpus_hash.clone(),
            file_count: self.files.len(),
            node_count: self.nodes.len(),
            edge_count: self.edges.len(),
            per_project_counts: self.per_project_counts.clone(),
            diagnostics_summary: self.diagnostics_summary.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotSummary {
    pub snapshot_id: String,
    pub created_at: DateTime<Utc>,
    pub corpus_hash: String,
    pub file_count: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub per_project_counts: BTreeMap<String, ProjectCounts>,
    pub diagnostics_summary: BTreeMap<String, usize>,
}

/// Counts per project; every seed project gets an entry even when empty.
pub(crate) fn count_per_project<'a>(
    nodes: &[Node],
    edges: &[ResolvedEdge],
    seeds: impl IntoIterator<Item = &'a str>,
) -> BTreeMap<String, ProjectCounts> {
    let mut out: BTreeMap<String, ProjectCounts> =
        seeds.into_iter().map(|p| (p.to_string(), ProjectCounts::default())).collect();
    let mut project_of = BTreeMap::new();
    for n in nodes {
        let Some(p) = &n.project else { continue };
        let c = out.entry(p.clone()).or_default();
        match n.kind {
            NodeKind::Class => c.class_count += 1,
            NodeKind::Method => c.function_count += 1,
            NodeKind::Property => c.property_count += 1,
            _ => {}
        }
        project_of.insert(n.id.as_str(), p.as_str());
    }
    for e in edges {
        if let Some(p) = project_of.get(e.from.as_str()) {
            out.entry(p.to_string()).or_default().edge_count += 1;
        }
    }
    out
}
