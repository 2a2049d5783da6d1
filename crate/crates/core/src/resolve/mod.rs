//! Receiver binding and call resolution into layer-classified edges.

mod bind;
mod call;
mod index;

use serde::{Deserialize, Serialize};

use crate::config::{LayerKind, ProjectConfig};
use crate::diag::Diagnostic;
use crate::exec::{self, Parallelism};
use crate::extract::FileModel;

pub use bind::{bind_receiver, BindingSource, Enclosing, ReceiverBinding};
pub use call::{classify_layers, resolve_call};
pub use index::{build_symbol_index, IndexedClass, Scope, SymbolIndex, TypeRef};

/// Prefix of third-party / builtin member targets: `ext:Type.member`.
pub const EXTERNAL_PREFIX: &str = "ext:";
/// Prefix of anonymous-function leaves: `anon:method#n`.
pub const ANON_PREFIX: &str = "anon:";
/// Prefix of targets that could not be resolved: `unresolved:recv.member`.
pub const UNRESOLVED_PREFIX: &str = "unresolved:";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeKind {
    IntraLayer,
    InterLayer,
    InvertedLayer,
    Static,
    WebServiceProxy,
    ThirdParty,
    AnonymousLeaf,
    Unresolved,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 8] = [
        EdgeKind::IntraLayer,
        EdgeKind::InterLayer,
        EdgeKind::InvertedLayer,
        EdgeKind::Static,
        EdgeKind::WebServiceProxy,
        EdgeKind::ThirdParty,
        EdgeKind::AnonymousLeaf,
        EdgeKind::Unresolved,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::IntraLayer => "IntraLayer",
            EdgeKind::InterLayer => "InterLayer",
            EdgeKind::InvertedLayer => "InvertedLayer",
            EdgeKind::Static => "Static",
            EdgeKind::WebServiceProxy => "WebServiceProxy",
            EdgeKind::ThirdParty => "ThirdParty",
            EdgeKind::AnonymousLeaf => "AnonymousLeaf",
            EdgeKind::Unresolved => "Unresolved",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResolvedEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    pub from_layer: LayerKind,
    pub to_layer: LayerKind,
    pub crosses_project: bool,
    /// File and receiver offset of the call site.
    pub file: String,
    pub offset: usize,
}

impl ResolvedEdge {
    fn sort_key(&self) -> (&str, &str, usize, &str, EdgeKind) {
        (&self.from, &self.file, self.offset, &self.to, self.kind)
    }
}

pub fn sort_edges(edges: &mut [ResolvedEdge]) {
    edges.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

#[derive(Clone, Debug, Default)]
pub struct Resolution {
    pub index: SymbolIndex,
    pub edges: Vec<ResolvedEdge>,
    /// Index and call-resolution diagnostics (extraction ones stay on the
    /// file models).
    pub diagnostics: Vec<Diagnostic>,
}

/// Indexes the models and resolves every call site of every method and
/// property body, fanning out per member.
pub fn resolve_all(models: &[FileModel], configs: &[ProjectConfig], mode: Parallelism) -> Resolution {
    let index = build_symbol_index(models, configs);
    let fallback: Vec<ProjectConfig> = index
        .classes
        .values()
        .map(|c| c.model.project_id.clone())
        .filter(|p| !configs.iter().any(|c| &c.project_id == p))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .map(|p| ProjectConfig::new(p, ""))
        .collect();
    let all_configs: Vec<ProjectConfig> = configs.iter().chain(&fallback).cloned().collect();

    let mut units = Vec::new();
    for (cid, c) in &index.classes {
        for (i, m) in c.model.methods.iter().enumerate() {
            if m.body_span.is_some() {
                units.push((cid.as_str(), Member::Method(i)));
            }
        }
        for (i, p) in c.model.properties.iter().enumerate() {
            if p.body_span.is_some() {
                units.push((cid.as_str(), Member::Property(i)));
            }
        }
    }

    let per_unit = exec::map(&units, mode, |(cid, member)| {
        resolve_member(&index, &all_configs, cid, *member)
    });
    let mut edges = Vec::new();
    let mut diagnostics = index.diagnostics.clone();
    for (e, d) in per_unit {
        edges.extend(e);
        diagnostics.extend(d);
    }
    sort_edges(&mut edges);
    diagnostics.sort();
    for d in &diagnostics {
        d.log();
    }
    Resolution {
        index,
        edges,
        diagnostics,
    }
}

#[derive(Clone, Copy, Debug)]
enum Member {
    Method(usize),
    Property(usize),
}

pub(crate) fn config_for<'a>(configs: &'a [ProjectConfig], project: &str) -> &'a ProjectConfig {
    configs
        .iter()
        .find(|c| c.project_id == project)
        .expect("every indexed project has a config")
}

fn resolve_member(
    index: &SymbolIndex,
    configs: &[ProjectConfig],
    cid: &str,
    member: Member,
) -> (Vec<ResolvedEdge>, Vec<Diagnostic>) {
    let owner = &index.classes[cid];
    let enclosing = match member {
        Member::Method(i) => {
            let m = &owner.model.methods[i];
            Enclosing {
                id: &m.id,
                parameters: &m.parameters,
                locals: &m.locals,
                call_sites: &m.call_sites,
                anonymous_offsets: &m.anonymous_offsets,
            }
        }
        Member::Property(i) => {
            let p = &owner.model.properties[i];
            Enclosing {
                id: &p.id,
                parameters: &[],
                locals: &p.locals,
                call_sites: &p.call_sites,
                anonymous_offsets: &p.anonymous_offsets,
            }
        }
    };
    let file = owner
        .member_files
        .get(enclosing.id)
        .cloned()
        .unwrap_or_else(|| owner.files[0].clone());
    let config = config_for(configs, &owner.model.project_id);
    let from_layer = config.layer_of(&owner.model.namespace);

    let mut edges = Vec::new();
    let mut diags = Vec::new();
    for site in enclosing.call_sites {
        let binding = bind_receiver(site, &enclosing, owner, index, config);
        let (e, d) = resolve_call(site, &binding, owner, &file, index, configs);
        edges.extend(e);
        diags.extend(d);
    }
    for (n, &off) in enclosing.anonymous_offsets.iter().enumerate() {
        edges.push(ResolvedEdge {
            from: enclosing.id.to_string(),
            to: format!("{ANON_PREFIX}{}#{n}", enclosing.id),
            kind: EdgeKind::AnonymousLeaf,
            from_layer,
            to_layer: from_layer,
            crosses_project: false,
            file: file.clone(),
            offset: off,
        });
    }
    (edges, diags)
}
