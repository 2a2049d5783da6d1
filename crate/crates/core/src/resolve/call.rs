//! Member lookup and edge-kind classification.

use std::collections::BTreeSet;

use crate::config::{LayerKind, ProjectConfig};
use crate::diag::{DiagCode, Diagnostic};
use crate::extract::CallSite;

use super::bind::{parents_of, BindingSource, ReceiverBinding};
use super::index::{IndexedClass, SymbolIndex, TypeRef};
use super::{config_for, EdgeKind, ResolvedEdge, EXTERNAL_PREFIX, UNRESOLVED_PREFIX};

enum Lookup {
    /// Member ids found at the nearest level of the inheritance chain.
    Members(Vec<String>),
    /// A field: data access, not a call.
    Field,
    /// Not declared in indexed code but the chain reaches this external base.
    ExternalBase(String),
    NotFound,
}

/// Finds `member` on `class_id`, searching parents level by level; a
/// declaration in a subclass shadows the same name further up.
fn lookup(index: &SymbolIndex, configs: &[ProjectConfig], class_id: &str, member: &str, invoked: bool) -> Lookup {
    let mut level = vec![class_id.to_string()];
    let mut seen = BTreeSet::new();
    let mut external_base = None;
    while !level.is_empty() {
        let classes: Vec<&IndexedClass> = level
            .iter()
            .filter(|c| seen.insert((*c).clone()))
            .filter_map(|c| index.class(c))
            .collect();
        let methods = || {
            classes
                .iter()
                .flat_map(|c| c.model.methods.iter())
                .filter(|m| m.name == member && !m.is_constructor)
                .map(|m| m.id.clone())
                .collect::<Vec<_>>()
        };
        let found = if invoked {
            methods()
        } else {
            let props: Vec<String> = classes
                .iter()
                .flat_map(|c| c.model.properties.iter())
                .filter(|p| p.name == member)
                .map(|p| p.id.clone())
                .collect();
            if props.is_empty() && classes.iter().any(|c| c.model.fields.iter().any(|f| f.name == member)) {
                return Lookup::Field;
            }
            // a method group: `list.ForEach(repo.Save)`
            if props.is_empty() { methods() } else { props }
        };
        if !found.is_empty() {
            return Lookup::Members(found);
        }
        let mut next = Vec::new();
        for c in &classes {
            let cfg = config_for(configs, &c.model.project_id);
            for p in parents_of(index, c, cfg) {
                match p {
                    TypeRef::Class(pid) => next.push(pid),
                    TypeRef::External(name) => {
                        external_base.get_or_insert(name);
                    }
                    _ => {}
                }
            }
        }
        level = next;
    }
    match external_base {
        Some(b) => Lookup::ExternalBase(b),
        None => Lookup::NotFound,
    }
}

/// Edge kind for a call between two layers, plus whether a layer was
/// unbound. Equal layers are intra-layer; a web-service target or a strictly
/// lower rank is inter-layer; anything else is an inverted (upward) call.
pub fn classify_layers(from: LayerKind, to: LayerKind) -> (EdgeKind, bool) {
    if from == LayerKind::Unknown || to == LayerKind::Unknown {
        return (if from == to { EdgeKind::IntraLayer } else { EdgeKind::InvertedLayer }, true);
    }
    if from == to {
        return (EdgeKind::IntraLayer, false);
    }
    if to == LayerKind::WebService {
        return (EdgeKind::InterLayer, false);
    }
    match (from.rank(), to.rank()) {
        (Some(a), Some(b)) if a > b => (EdgeKind::InterLayer, false),
        _ => (EdgeKind::InvertedLayer, false),
    }
}

fn simple(t: &TypeRef) -> String {
    match t {
        TypeRef::Class(id) => id.rsplit('.').next().unwrap_or(id).to_string(),
        TypeRef::Implementers { name, .. } => name.clone(),
        TypeRef::External(n) | TypeRef::Namespace(n) | TypeRef::Unknown(n) => n.clone(),
    }
}

/// Turns a bound call site into edges: one per candidate target, all of
/// one kind. Field reads and namespace segments produce no edge.
pub fn resolve_call(
    site: &CallSite,
    binding: &ReceiverBinding,
    owner: &IndexedClass,
    file: &str,
    index: &SymbolIndex,
    configs: &[ProjectConfig],
) -> (Vec<ResolvedEdge>, Vec<Diagnostic>) {
    let from_cfg = config_for(configs, &owner.model.project_id);
    let from_layer = from_cfg.layer_of(&owner.model.namespace);
    let member = site.member_token.as_str();
    let mut diags = Vec::new();
    let edge = |to: String, kind: EdgeKind, to_layer: LayerKind, crosses: bool| ResolvedEdge {
        from: site.enclosing_method.clone(),
        to,
        kind,
        from_layer,
        to_layer,
        crosses_project: crosses,
        file: file.to_string(),
        offset: site.char_offset,
    };
    let external = |ty: &str| edge(format!("{EXTERNAL_PREFIX}{ty}.{member}"), EdgeKind::ThirdParty, LayerKind::ThirdParty, false);
    let unresolved = |recv: &str| edge(format!("{UNRESOLVED_PREFIX}{recv}.{member}"), EdgeKind::Unresolved, LayerKind::Unknown, false);
    let diag = |code: DiagCode, message: String| {
        Diagnostic::new(file, site.char_offset, code, message)
            .with_member(member)
            .with_method(site.enclosing_method.clone())
    };

    let ty = match (&binding.binding_source, &binding.resolved_type) {
        (BindingSource::Namespace, _) => return (Vec::new(), diags),
        (_, Some(t)) => t.clone(),
        (_, None) => {
            diags.push(diag(
                DiagCode::UnresolvedReceiver,
                format!("cannot bind receiver `{}` of `.{member}`", site.receiver_token),
            ));
            return (vec![unresolved(&site.receiver_token)], diags);
        }
    };

    let targets: Vec<String> = match &ty {
        TypeRef::External(name) => return (vec![external(name)], diags),
        TypeRef::Namespace(_) => return (Vec::new(), diags),
        TypeRef::Unknown(name) => {
            diags.push(diag(
                DiagCode::UnresolvedReceiver,
                format!("receiver `{}` has unknown type `{name}`", site.receiver_token),
            ));
            return (vec![unresolved(name)], diags);
        }
        TypeRef::Class(cid) => match lookup(index, configs, cid, member, site.is_invocation) {
            Lookup::Members(ids) => ids,
            Lookup::Field => return (Vec::new(), diags),
            Lookup::ExternalBase(b) => return (vec![external(&b)], diags),
            Lookup::NotFound => Vec::new(),
        },
        TypeRef::Implementers { classes, .. } => {
            let mut ids = Vec::new();
            let mut field = false;
            for c in classes {
                match lookup(index, configs, c, member, site.is_invocation) {
                    Lookup::Members(found) => ids.extend(found),
                    Lookup::Field => field = true,
                    _ => {}
                }
            }
            if ids.is_empty() && field {
                return (Vec::new(), diags);
            }
            ids.sort();
            ids.dedup();
            ids
        }
    };

    if targets.is_empty() {
        diags.push(diag(
            DiagCode::MemberNotFound,
            format!("`{member}` not found on `{}` or its parents", simple(&ty)),
        ));
        return (vec![unresolved(&simple(&ty))], diags);
    }

    let mut edges = Vec::with_capacity(targets.len());
    for to in targets {
        let target_class = index
            .member_owner
            .get(&to)
            .and_then(|c| index.class(c))
            .expect("lookup returns indexed members");
        let to_cfg = configs
            .iter()
            .find(|c| c.project_id == target_class.model.project_id)
            .unwrap_or(from_cfg);
        let to_layer = to_cfg.layer_of(&target_class.model.namespace);
        let crosses = target_class.model.project_id != owner.model.project_id;
        let kind = if to_layer == LayerKind::ThirdParty {
            EdgeKind::ThirdParty
        } else if target_class.is_proxy {
            EdgeKind::WebServiceProxy
        } else if binding.binding_source == BindingSource::StaticClass {
            EdgeKind::Static
        } else {
            let (kind, unbound) = classify_layers(from_layer, to_layer);
            if unbound {
                diags.push(diag(
                    DiagCode::UnboundLayer,
                    format!("no layer bound for `{}` or `{}`", owner.model.namespace, target_class.model.namespace),
                ));
            }
            kind
        };
        edges.push(edge(to, kind, to_layer, crosses));
    }
    // one kind per site: candidates that disagree are flagged as anomalous
    if edges.windows(2).any(|w| w[0].kind != w[1].kind) {
        for e in &mut edges {
            e.kind = EdgeKind::InvertedLayer;
        }
    }
    (edges, diags)
}
