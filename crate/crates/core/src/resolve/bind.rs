//! Receiver binding: which type does the token before the dot denote?

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::config::ProjectConfig;
use crate::extract::{CallSite, LocalDecl, Parameter};

use super::index::{IndexedClass, Scope, SymbolIndex, TypeRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BindingSource {
    LocalVar,
    Parameter,
    Field,
    StaticClass,
    /// `this.` binds to the owner class.
    This,
    /// `base.` binds to the owner's base class.
    Base,
    /// Builtin keyword type or a type from a third-party namespace.
    ExternalType,
    /// The dotted prefix is a namespace, not a value; yields no edge.
    Namespace,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceiverBinding {
    pub receiver_token: String,
    pub resolved_type: Option<TypeRef>,
    pub binding_source: BindingSource,
}

/// The member whose body holds the call site.
#[derive(Clone, Copy, Debug)]
pub struct Enclosing<'a> {
    pub id: &'a str,
    pub parameters: &'a [Parameter],
    pub locals: &'a [LocalDecl],
    pub call_sites: &'a [crate::extract::CallSite],
    pub anonymous_offsets: &'a [usize],
}

pub(crate) fn owner_scope<'a>(owner: &'a IndexedClass, config: &'a ProjectConfig) -> Scope<'a> {
    Scope {
        namespace: &owner.model.namespace,
        usings: &owner.usings,
        config,
        class_id: Some(&owner.model.id),
    }
}

/// Resolved parents of a class, in declaration order. Only the first
/// parent can be a base class; when it is not indexed, is not named like an
/// interface (`IName`) and the class sees a third-party namespace, it is
/// taken as an external base class.
pub(crate) fn parents_of(index: &SymbolIndex, class: &IndexedClass, config: &ProjectConfig) -> Vec<TypeRef> {
    let scope = owner_scope(class, config);
    let third_party_using = scope.usings.iter().any(|u| config.is_third_party(u));
    class
        .model
        .parents
        .iter()
        .enumerate()
        .map(|(i, p)| match index.resolve_type(p, &scope) {
            TypeRef::Implementers { name, .. } | TypeRef::Unknown(name)
                if i == 0 && third_party_using && !interface_like(&name) =>
            {
                TypeRef::External(name)
            }
            t => t,
        })
        .collect()
}

fn interface_like(name: &str) -> bool {
    let simple = name.rsplit('.').next().unwrap_or(name);
    let mut chars = simple.chars();
    chars.next() == Some('I') && chars.next().is_some_and(char::is_uppercase)
}

/// Declared type of a field or property `name` on `class_id` or its
/// ancestors, resolved where it is declared.
fn member_type(index: &SymbolIndex, config: &ProjectConfig, class_id: &str, name: &str) -> Option<TypeRef> {
    let mut queue = vec![class_id.to_string()];
    let mut seen = BTreeSet::new();
    while let Some(cid) = queue.pop() {
        if !seen.insert(cid.clone()) {
            continue;
        }
        let Some(c) = index.class(&cid) else { continue };
        let written = c
            .model
            .fields
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.declared_type.as_str())
            .or_else(|| c.model.properties.iter().find(|p| p.name == name).map(|p| p.return_type.as_str()));
        if let Some(ty) = written {
            return Some(index.resolve_type(ty, &owner_scope(c, config)));
        }
        for p in parents_of(index, c, config).into_iter().rev() {
            if let TypeRef::Class(pid) = p {
                queue.push(pid);
            }
        }
    }
    None
}

fn binding(token: &str, source: BindingSource, ty: Option<TypeRef>) -> ReceiverBinding {
    ReceiverBinding {
        receiver_token: token.to_string(),
        resolved_type: ty,
        binding_source: source,
    }
}

/// Binds a receiver with no qualifier. `None` means nothing matched.
fn bind_simple(
    token: &str,
    offset: usize,
    enclosing: &Enclosing<'_>,
    owner: &IndexedClass,
    index: &SymbolIndex,
    config: &ProjectConfig,
) -> ReceiverBinding {
    let scope = owner_scope(owner, config);
    match token {
        "this" => return binding(token, BindingSource::This, Some(TypeRef::Class(owner.model.id.clone()))),
        "base" => {
            let parent = parents_of(index, owner, config)
                .into_iter()
                .find(|p| matches!(p, TypeRef::Class(_) | TypeRef::External(_)));
            return match parent {
                Some(p @ TypeRef::External(_)) => binding(token, BindingSource::ExternalType, Some(p)),
                Some(p) => binding(token, BindingSource::Base, Some(p)),
                None => binding(token, BindingSource::Unresolved, None),
            };
        }
        _ => {}
    }
    // (1) locals declared before the site; an untyped `var` falls through
    if let Some(local) = enclosing
        .locals
        .iter().rfind(|l| l.name == token && l.offset < offset)
    {
        if let Some(ty) = &local.ty {
            return binding(token, BindingSource::LocalVar, Some(index.resolve_type(ty, &scope)));
        }
    }
    // (2) parameters
    if let Some(p) = enclosing.parameters.iter().find(|p| p.name == token) {
        return binding(token, BindingSource::Parameter, Some(index.resolve_type(&p.ty, &scope)));
    }
    // (3) fields and properties of the owner and its ancestors
    if let Some(ty) = member_type(index, config, &owner.model.id, token) {
        return binding(token, BindingSource::Field, Some(ty));
    }
    // (4) type name
    match index.resolve_type(token, &scope) {
        TypeRef::Class(id) if index.static_class_names.contains(token) => {
            binding(token, BindingSource::StaticClass, Some(TypeRef::Class(id)))
        }
        t @ TypeRef::External(_) => binding(token, BindingSource::ExternalType, Some(t)),
        _ if index.is_namespace_prefix(token, &scope) => {
            binding(token, BindingSource::Namespace, Some(TypeRef::Namespace(token.to_string())))
        }
        _ => binding(token, BindingSource::Unresolved, None),
    }
}

/// Type of `segment` read from a value of type `current`.
fn step(index: &SymbolIndex, config: &ProjectConfig, current: &TypeRef, segment: &str) -> Option<TypeRef> {
    match current {
        TypeRef::Class(cid) => member_type(index, config, cid, segment),
        TypeRef::Implementers { classes, .. } => classes.iter().find_map(|c| member_type(index, config, c, segment)),
        TypeRef::External(t) => Some(TypeRef::External(format!("{t}.{segment}"))),
        _ => None,
    }
}

/// Binds the receiver of `site` in the body of `enclosing`, declared in
/// `owner`: locals, then parameters, then fields, then static classes.
pub fn bind_receiver(
    site: &CallSite,
    enclosing: &Enclosing<'_>,
    owner: &IndexedClass,
    index: &SymbolIndex,
    config: &ProjectConfig,
) -> ReceiverBinding {
    let token = site.receiver_token.as_str();
    if site.qualifier.is_empty() {
        return bind_simple(token, site.char_offset, enclosing, owner, index, config);
    }
    let scope = owner_scope(owner, config);
    let segments: Vec<&str> = site.qualifier.iter().map(String::as_str).chain([token]).collect();

    // a fully written type or namespace: `Shop.Util.MathUtil.Round()`
    let first_is_value = matches!(segments[0], "this" | "base")
        || enclosing.locals.iter().any(|l| l.name == segments[0] && l.offset < site.char_offset)
        || enclosing.parameters.iter().any(|p| p.name == segments[0])
        || member_type(index, config, &owner.model.id, segments[0]).is_some();
    if !first_is_value {
        let dotted = segments.join(".");
        match index.resolve_type(&dotted, &scope) {
            TypeRef::Class(id) if index.static_class_names.contains(token) => {
                return binding(token, BindingSource::StaticClass, Some(TypeRef::Class(id)));
            }
            TypeRef::Class(_) => return binding(token, BindingSource::Unresolved, None),
            t @ TypeRef::External(_) => return binding(token, BindingSource::ExternalType, Some(t)),
            TypeRef::Namespace(ns) => return binding(token, BindingSource::Namespace, Some(TypeRef::Namespace(ns))),
            _ => {}
        }
    }

    let first_offset = site.char_offset;
    let head = bind_simple(segments[0], first_offset, enclosing, owner, index, config);
    let Some(mut current) = head.resolved_type.clone() else {
        return binding(token, BindingSource::Unresolved, None);
    };
    if head.binding_source == BindingSource::Namespace {
        return binding(token, BindingSource::Unresolved, None);
    }
    for seg in &segments[1..] {
        match step(index, config, &current, seg) {
            Some(next) => current = next,
            None => return binding(token, BindingSource::Unresolved, None),
        }
    }
    let source = match head.binding_source {
        BindingSource::This | BindingSource::Base | BindingSource::StaticClass => BindingSource::Field,
        s => s,
    };
    let source = if matches!(current, TypeRef::External(_)) { BindingSource::ExternalType } else { source };
    binding(token, source, Some(current))
}
