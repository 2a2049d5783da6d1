//! Symbol index over all extracted file models.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::{namespace_has_prefix, ProjectConfig};
use crate::diag::{DiagCode, Diagnostic};
use crate::extract::types::{base_type_name, is_builtin_keyword};
use crate::extract::{ClassModel, FileModel, MethodModel, PropertyModel};

/// A class after partial declarations are merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedClass {
    pub model: ClassModel,
    /// Files declaring (part of) the class, first-seen first.
    pub files: Vec<String>,
    /// Union of the using namespaces of those files.
    pub usings: Vec<String>,
    /// Generated web-service proxy: a marker base class or a marked file.
    pub is_proxy: bool,
    /// Method/property id → declaring file.
    pub member_files: BTreeMap<String, String>,
}

impl IndexedClass {
    pub fn id(&self) -> &str {
        &self.model.id
    }
}

/// How a type name resolved in some context.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TypeRef {
    Class(String),
    /// Not indexed (interfaces are not modeled) but declared as a parent by
    /// these classes.
    Implementers { name: String, classes: Vec<String> },
    /// Builtin or third-party type.
    External(String),
    /// A namespace prefix, not a type.
    Namespace(String),
    Unknown(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolIndex {
    pub classes: BTreeMap<String, IndexedClass>,
    pub classes_by_name: BTreeMap<String, Vec<String>>,
    pub classes_by_fqname: BTreeMap<String, String>,
    /// Static classes plus classes declaring at least one static member:
    /// both are called through the type name.
    pub static_class_names: BTreeSet<String>,
    /// Parent simple name → class ids declaring it.
    pub implementers: BTreeMap<String, Vec<String>>,
    pub namespaces: BTreeSet<String>,
    /// Method or property id → owning class id.
    pub member_owner: BTreeMap<String, String>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Lookup context: where a type name is written.
#[derive(Clone, Copy, Debug)]
pub struct Scope<'a> {
    pub namespace: &'a str,
    pub usings: &'a [String],
    pub config: &'a ProjectConfig,
    /// Class whose nested classes are visible by simple name.
    pub class_id: Option<&'a str>,
}

pub fn build_symbol_index(models: &[FileModel], configs: &[ProjectConfig]) -> SymbolIndex {
    let mut ix = SymbolIndex::default();
    let mut partial_seen: BTreeMap<String, bool> = BTreeMap::new();
    let cfg_of = |project: &str| configs.iter().find(|c| c.project_id == project);

    for fm in models {
        let usings: Vec<String> = fm.usings.iter().filter(|u| !u.is_static).map(|u| u.namespace()).collect();
        for ns in &fm.namespaces {
            ix.namespaces.insert(ns.clone());
        }
        for class in &fm.classes {
            let cfg = cfg_of(&fm.project_id);
            let marked_parent = cfg.is_some_and(|c| {
                c.proxy_base_markers()
                    .any(|m| class.parents.iter().any(|p| p == m || p.rsplit('.').next() == Some(m)))
            });
            let is_proxy = marked_parent || !fm.markers.is_empty();
            match ix.classes.get_mut(&class.id) {
                Some(existing) => {
                    let both_partial = class.is_partial && partial_seen.get(&class.id).copied().unwrap_or(false);
                    if !both_partial {
                        let d = Diagnostic::new(
                            &fm.file,
                            class.offset,
                            DiagCode::DuplicateClass,
                            format!("class `{}` already declared in {}", class.id, existing.files[0]),
                        )
                        .with_member(class.name.clone());
                        ix.diagnostics.push(d);
                        continue;
                    }
                    merge_partial(existing, class);
                    record_member_files(&mut existing.member_files, class, &fm.file);
                    if !existing.files.contains(&fm.file) {
                        existing.files.push(fm.file.clone());
                    }
                    for u in &usings {
                        if !existing.usings.contains(u) {
                            existing.usings.push(u.clone());
                        }
                    }
                    existing.is_proxy |= is_proxy;
                }
                None => {
                    partial_seen.insert(class.id.clone(), class.is_partial);
                    let mut member_files = BTreeMap::new();
                    record_member_files(&mut member_files, class, &fm.file);
                    ix.classes.insert(
                        class.id.clone(),
                        IndexedClass {
                            model: class.clone(),
                            files: vec![fm.file.clone()],
                            usings: usings.clone(),
                            is_proxy,
                            member_files,
                        },
                    );
                }
            }
        }
    }

    for (id, c) in &ix.classes {
        ix.classes_by_name.entry(c.model.name.clone()).or_default().push(id.clone());
        ix.classes_by_fqname.insert(id.clone(), id.clone());
        let has_static_member = c.model.methods.iter().any(|m| m.is_static)
            || c.model.properties.iter().any(|p| p.is_static);
        if c.model.is_static || has_static_member {
            ix.static_class_names.insert(c.model.name.clone());
        }
        for p in &c.model.parents {
            let simple = p.rsplit('.').next().unwrap_or(p).to_string();
            ix.implementers.entry(simple).or_default().push(id.clone());
        }
        for m in &c.model.methods {
            ix.member_owner.insert(m.id.clone(), id.clone());
        }
        for p in &c.model.properties {
            ix.member_owner.insert(p.id.clone(), id.clone());
        }
    }
    ix
}

fn record_member_files(into: &mut BTreeMap<String, String>, class: &ClassModel, file: &str) {
    let ids = class.methods.iter().map(|m| &m.id).chain(class.properties.iter().map(|p| &p.id));
    for id in ids {
        into.entry(id.clone()).or_insert_with(|| file.to_string());
    }
}

fn merge_partial(into: &mut IndexedClass, part: &ClassModel) {
    let m = &mut into.model;
    for p in &part.parents {
        if !m.parents.contains(p) {
            m.parents.push(p.clone());
        }
    }
    m.is_static |= part.is_static;
    m.methods.extend(part.methods.iter().cloned());
    m.properties.extend(part.properties.iter().cloned());
    m.fields.extend(part.fields.iter().cloned());
    if m.qualifier.is_empty() {
        m.qualifier = part.qualifier.clone();
    }
}

impl SymbolIndex {
    pub fn class(&self, id: &str) -> Option<&IndexedClass> {
        self.classes.get(id)
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn method(&self, id: &str) -> Option<&MethodModel> {
        let owner = self.classes.get(self.member_owner.get(id)?)?;
        owner.model.methods.iter().find(|m| m.id == id)
    }

    pub fn property(&self, id: &str) -> Option<&PropertyModel> {
        let owner = self.classes.get(self.member_owner.get(id)?)?;
        owner.model.properties.iter().find(|p| p.id == id)
    }

    /// A dotted name that is (a prefix of) a declared, used or third-party
    /// namespace.
    pub fn is_namespace_prefix(&self, dotted: &str, scope: &Scope<'_>) -> bool {
        let is_prefix_of = |ns: &str| namespace_has_prefix(ns, dotted);
        self.namespaces.iter().any(|n| is_prefix_of(n))
            || scope.usings.iter().any(|u| is_prefix_of(u))
            || scope.config.third_party_namespaces.iter().any(|t| is_prefix_of(t) || namespace_has_prefix(dotted, t))
    }

    /// Resolves a written type name in `scope`.
    pub fn resolve_type(&self, written: &str, scope: &Scope<'_>) -> TypeRef {
        let name = base_type_name(written);
        let name = name.strip_prefix("global::").unwrap_or(&name).to_string();
        if name.is_empty() {
            return TypeRef::Unknown(written.to_string());
        }
        if is_builtin_keyword(&name) {
            return TypeRef::External(name);
        }
        if name.contains('.') {
            return self.resolve_dotted(&name, scope);
        }
        // nested classes of the current class and its outers
        if let Some(mut cid) = scope.class_id {
            loop {
                let nested = format!("{cid}.{name}");
                if self.classes.contains_key(&nested) {
                    return TypeRef::Class(nested);
                }
                match cid.rfind('.') {
                    Some(p) if self.classes.contains_key(&cid[..p]) => cid = &cid[..p],
                    _ => break,
                }
            }
        }
        let candidates = self.classes_by_name.get(&name).map(Vec::as_slice).unwrap_or(&[]);
        if !candidates.is_empty() {
            let visible: Vec<&String> = candidates
                .iter()
                .filter(|id| {
                    let ns = &self.classes[*id].model.namespace;
                    namespace_has_prefix(scope.namespace, ns) || scope.usings.iter().any(|u| u == ns)
                })
                .collect();
            let pick = match visible.as_slice() {
                [one] => Some((*one).clone()),
                [] if candidates.len() == 1 => Some(candidates[0].clone()),
                // nearest enclosing namespace wins among several visible
                many if !many.is_empty() => many
                    .iter()
                    .filter(|id| namespace_has_prefix(scope.namespace, &self.classes[**id].model.namespace))
                    .max_by_key(|id| self.classes[**id].model.namespace.len())
                    .map(|s| (*s).clone()),
                _ => None,
            };
            if let Some(id) = pick {
                return TypeRef::Class(id);
            }
            return TypeRef::Unknown(name);
        }
        if let Some(classes) = self.implementers.get(&name) {
            return TypeRef::Implementers { name, classes: classes.clone() };
        }
        let third_party_using = scope.usings.iter().any(|u| scope.config.is_third_party(u));
        if third_party_using && name.starts_with(|c: char| c.is_uppercase()) {
            return TypeRef::External(name);
        }
        TypeRef::Unknown(name)
    }

    fn resolve_dotted(&self, name: &str, scope: &Scope<'_>) -> TypeRef {
        if self.classes.contains_key(name) {
            return TypeRef::Class(name.to_string());
        }
        // relative to the enclosing namespaces and usings
        let mut ns = scope.namespace;
        loop {
            if !ns.is_empty() {
                let full = format!("{ns}.{name}");
                if self.classes.contains_key(&full) {
                    return TypeRef::Class(full);
                }
            }
            match ns.rfind('.') {
                Some(p) => ns = &ns[..p],
                None if !ns.is_empty() => ns = "",
                None => break,
            }
        }
        for u in scope.usings {
            let full = format!("{u}.{name}");
            if self.classes.contains_key(&full) {
                return TypeRef::Class(full);
            }
        }
        if scope.config.is_third_party(name) {
            return TypeRef::External(name.to_string());
        }
        if self.is_namespace_prefix(name, scope) {
            return TypeRef::Namespace(name.to_string());
        }
        TypeRef::Unknown(name.to_string())
    }
}
