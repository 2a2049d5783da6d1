//! Namespace, class and member declarations (the signature rules).

use crate::diag::{DiagCode, Diagnostic};

use super::body::{self, BodyFacts};
use super::lexer::Token;
use super::types::{base_type_name, render_tokens, BuiltinTypes};
use super::{prepare, ClassModel, FieldModel, MethodModel, Parameter, PropertyModel, TokenStream};

const MODIFIERS: [&str; 20] = [
    "public", "private", "protected", "internal", "static", "abstract", "sealed", "partial",
    "virtual", "override", "async", "extern", "const", "volatile", "readonly", "required", "new",
    "unsafe", "file", "fixed",
];
const ACCESS: [&str; 4] = ["public", "private", "protected", "internal"];
const OTHER_TYPES: [&str; 4] = ["interface", "struct", "enum", "record"];
const ACCESSORS: [&str; 5] = ["get", "set", "init", "add", "remove"];

#[derive(Debug, Default)]
pub(crate) struct Extraction {
    pub classes: Vec<ClassModel>,
    pub namespaces: Vec<String>,
    pub diags: Vec<Diagnostic>,
}

#[derive(Debug, Default)]
struct Members {
    methods: Vec<MethodModel>,
    properties: Vec<PropertyModel>,
    fields: Vec<FieldModel>,
}

struct ClassCtx {
    id: String,
    namespace: String,
}

impl ClassCtx {
    fn member_id(&self, name: &str) -> String {
        join_ns(&self.id, name)
    }
}

struct Walker<'s, 'a> {
    ts: &'s TokenStream<'a>,
    file: &'s str,
    project: &'s str,
    builtins: &'s BuiltinTypes,
    with_members: bool,
    out: Extraction,
}

pub(crate) fn walk_file(
    ts: &TokenStream<'_>,
    namespace_ctx: &str,
    file: &str,
    project: &str,
    builtins: &BuiltinTypes,
    with_members: bool,
) -> Extraction {
    let mut w = Walker {
        ts,
        file,
        project,
        builtins,
        with_members,
        out: Extraction::default(),
    };
    w.scope(0, ts.len(), namespace_ctx);
    w.out
}

fn join_ns(ns: &str, name: &str) -> String {
    if ns.is_empty() {
        name.to_string()
    } else {
        format!("{ns}.{name}")
    }
}

impl<'s, 'a> Walker<'s, 'a> {
    fn tok(&self, i: usize) -> Token<'a> {
        self.ts.toks[i]
    }

    fn diag(&mut self, offset: usize, code: DiagCode, message: impl Into<String>) -> &mut Diagnostic {
        self.out.diags.push(Diagnostic::new(self.file, offset, code, message));
        self.out.diags.last_mut().expect("just pushed")
    }

    /// `a.b.c` starting at `i`; returns the name and the index after it.
    fn dotted(&self, i: usize, hi: usize) -> (String, usize) {
        let mut parts = vec![self.tok(i).text];
        let mut j = i + 1;
        while j + 1 < hi && self.tok(j).is(".") && self.tok(j + 1).is_ident() {
            parts.push(self.tok(j + 1).text);
            j += 2;
        }
        (parts.join("."), j)
    }

    /// `class` at `i` starts a declaration rather than a constraint.
    fn class_keyword_at(&self, i: usize, lo: usize) -> bool {
        let t = self.tok(i);
        if !t.is_word("class") {
            return false;
        }
        i == lo || {
            let p = self.tok(i - 1);
            !(p.is(":") || p.is(",") || p.is_member_access())
        }
    }

    fn other_type_at(&self, i: usize, hi: usize) -> bool {
        let t = self.tok(i);
        t.is_ident()
            && OTHER_TYPES.contains(&t.text)
            && i + 1 < hi
            && self.tok(i + 1).is_ident()
            && (i == 0 || !self.tok(i - 1).is_member_access())
    }

    /// Index after a skipped non-class type declaration at `i`.
    fn skip_type(&self, i: usize, hi: usize) -> usize {
        let mut k = i + 1;
        while k < hi {
            let t = self.tok(k);
            if t.is("{") {
                let end = self.ts.close_of(k, hi) + 1;
                return if end < hi && self.tok(end).is(";") { end + 1 } else { end };
            }
            if t.is(";") {
                return k + 1;
            }
            if t.is("(") || t.is("[") {
                k = self.ts.close_of(k, hi) + 1;
                continue;
            }
            k += 1;
        }
        hi
    }

    fn scope(&mut self, lo: usize, hi: usize, ns: &str) {
        let mut i = lo;
        while i < hi {
            let t = self.tok(i);
            if t.is_word("namespace") && i + 1 < hi && self.tok(i + 1).is_ident() {
                let (name, j) = self.dotted(i + 1, hi);
                let full = join_ns(ns, &name);
                if !self.out.namespaces.contains(&full) {
                    self.out.namespaces.push(full.clone());
                }
                if j < hi && self.tok(j).is("{") {
                    let close = self.ts.close_of(j, hi);
                    self.scope(j + 1, close, &full);
                    i = close + 1;
                    continue;
                }
                if j < hi && self.tok(j).is(";") {
                    self.scope(j + 1, hi, &full);
                    return;
                }
                i = j;
                continue;
            }
            if self.class_keyword_at(i, lo) {
                i = self.class_decl(i, hi, ns, None);
                continue;
            }
            if self.other_type_at(i, hi) {
                i = self.skip_type(i, hi);
                continue;
            }
            if t.is("{") {
                i = self.ts.close_of(i, hi) + 1;
                continue;
            }
            i += 1;
        }
    }

    fn class_decl(&mut self, i: usize, hi: usize, ns: &str, outer: Option<&ClassCtx>) -> usize {
        let kw = self.tok(i);
        let mut q = i;
        while q > 0 && self.tok(q - 1).is_ident() && MODIFIERS.contains(&self.tok(q - 1).text) {
            q -= 1;
        }
        // `record class` reads as a class
        let mods: Vec<&str> = (q..i).map(|k| self.tok(k).text).collect();
        if i + 1 >= hi || !self.tok(i + 1).is_ident() {
            self.diag(kw.start, DiagCode::ClassWithoutName, "`class` keyword without a name");
            return i + 1;
        }
        let name = self.tok(i + 1).text.to_string();
        let mut j = i + 2;
        let mut type_param_count = 0;
        if j < hi && self.tok(j).is("<") {
            if let Some(after) = self.ts.generic_close(j, hi) {
                type_param_count = 1 + (j..after).filter(|&k| self.tok(k).is(",")).count();
                j = after;
            }
        }
        if j < hi && self.tok(j).is("(") {
            j = self.ts.close_of(j, hi) + 1;
        }
        let mut parents = Vec::new();
        if j < hi && self.tok(j).is(":") {
            let mut k = j + 1;
            let mut part_start = k;
            let mut angle = 0i32;
            while k < hi {
                let t = self.tok(k);
                if t.is("<") {
                    angle += 1;
                } else if t.is(">") {
                    angle -= 1;
                } else if t.is("(") {
                    k = self.ts.close_of(k, hi);
                } else if angle == 0 && (t.is(",") || t.is("{") || t.is(";") || t.is_word("where")) {
                    if k > part_start {
                        parents.push(parent_name(&self.ts.toks[part_start..k]));
                    }
                    if !t.is(",") {
                        break;
                    }
                    part_start = k + 1;
                }
                k += 1;
            }
            j = k;
        }
        while j < hi && !self.tok(j).is("{") && !self.tok(j).is(";") {
            j += 1;
        }

        let id = match outer {
            Some(o) => format!("{}.{}", o.id, name),
            None => join_ns(ns, &name),
        };
        let qualifier = mods.join(" ");
        let model = ClassModel {
            id: id.clone(),
            qualifier,
            name: name.clone(),
            type_param_count,
            parents,
            namespace: ns.to_string(),
            file: self.file.to_string(),
            project_id: self.project.to_string(),
            is_static: mods.contains(&"static"),
            is_partial: mods.contains(&"partial"),
            outer: outer.map(|o| o.id.clone()),
            offset: kw.start,
            methods: Vec::new(),
            properties: Vec::new(),
            fields: Vec::new(),
        };
        let idx = self.out.classes.len();
        self.out.classes.push(model);
        if j >= hi || self.tok(j).is(";") {
            return j + 1;
        }
        let close = self.ts.close_of(j, hi);
        let ctx = ClassCtx {
            id,
            namespace: ns.to_string(),
        };
        let members = self.members(j + 1, close, &ctx);
        if self.with_members {
            let c = &mut self.out.classes[idx];
            c.methods = members.methods;
            c.properties = members.properties;
            c.fields = members.fields;
        }
        close + 1
    }

    fn members(&mut self, lo: usize, hi: usize, ctx: &ClassCtx) -> Members {
        let mut m = Members::default();
        let mut i = lo;
        while i < hi {
            let t = self.tok(i);
            if t.is(";") || t.is("}") || t.is(")") || t.is("]") {
                i += 1;
                continue;
            }
            while i < hi && self.tok(i).is("[") {
                i = self.ts.close_of(i, hi) + 1;
            }
            if i >= hi {
                break;
            }
            let head = i;
            let mut j = i;
            let mut stop = None;
            while j < hi {
                let t = self.tok(j);
                if t.is("(") || t.is("[") {
                    j = self.ts.close_of(j, hi) + 1;
                    continue;
                }
                if t.is("{") || t.is(";") || t.is("=>") || t.is("=") || t.is("}") {
                    stop = Some(j);
                    break;
                }
                if self.class_keyword_at(j, head) {
                    stop = None;
                    j = self.class_decl(j, hi, &ctx.namespace, Some(ctx));
                    break;
                }
                if self.other_type_at(j, hi) {
                    j = self.skip_type(j, hi);
                    break;
                }
                if t.is_word("delegate") || t.is_word("event") {
                    j = self.skip_type(j, hi);
                    break;
                }
                j += 1;
            }
            let Some(j) = stop else {
                i = j.max(i + 1);
                continue;
            };
            i = self.member(head, j, hi, ctx, &mut m);
        }
        m
    }

    /// Classifies the member whose head is `head..j` (`j` is the stop token)
    /// and returns the index after it.
    fn member(&mut self, head: usize, j: usize, hi: usize, ctx: &ClassCtx, m: &mut Members) -> usize {
        let stop = self.tok(j);
        let mut r = head;
        while r < j && self.tok(r).is_ident() && MODIFIERS.contains(&self.tok(r).text) {
            r += 1;
        }
        let mods: Vec<String> = (head..r).map(|k| self.tok(k).text.to_string()).collect();
        let access = mods
            .iter()
            .filter(|w| ACCESS.contains(&w.as_str()))
            .cloned()
            .collect::<Vec<_>>()
            .join(" ");
        let other_mods: Vec<String> = mods
            .iter()
            .filter(|w| !ACCESS.contains(&w.as_str()))
            .cloned()
            .collect();
        let is_static = mods.iter().any(|w| w == "static" || w == "const");
        let paren = self.signature_paren(r, j);
        let head_offset = self.tok(head).start;

        let end = match stop.text {
            "{" => self.ts.close_of(j, hi) + 1,
            "=>" => self.ts.statement_end(j + 1, hi) + 1,
            "=" => self.ts.statement_end(j + 1, hi) + 1,
            ";" => j + 1,
            _ => return j + 1,
        };

        if r == j {
            if stop.is("{") || stop.is("=>") || stop.is("=") {
                self.diag(head_offset, DiagCode::AmbiguousMember, "member without a declarator");
            }
            return end;
        }

        if let Some(p) = paren {
            if stop.is("=") {
                self.diag(head_offset, DiagCode::AmbiguousMember, "unexpected `=` after a parameter list");
                return end;
            }
            self.method(r, p, j, hi, ctx, access, other_mods, is_static, m);
            return end;
        }

        let last = self.tok(j - 1);
        if !last.is_ident() || j - 1 == r {
            // indexers, operators, destructors and stray tokens
            if !(stop.is(";") && j - 1 == r) {
                self.diag(head_offset, DiagCode::AmbiguousMember, "cannot classify member")
                    .member = Some(last.text.to_string());
            }
            return end;
        }

        match stop.text {
            "{" => {
                let close = self.ts.close_of(j, hi);
                let accessors = self.accessors(j + 1, close);
                if accessors.is_empty() {
                    self.diag(head_offset, DiagCode::AmbiguousMember, "block without accessors")
                        .member = Some(last.text.to_string());
                    return end;
                }
                let has_body = accessors.iter().any(|&k| {
                    k + 1 < close && (self.tok(k + 1).is("{") || self.tok(k + 1).is("=>"))
                });
                let body = has_body.then_some((j + 1, close));
                self.property(r, j - 1, body, ctx, access, other_mods, is_static, m);
                // `{ get; set; } = initial;`
                if end < hi && self.tok(end).is("=") {
                    return self.ts.statement_end(end + 1, hi) + 1;
                }
                end
            }
            "=>" => {
                let semi = self.ts.statement_end(j + 1, hi);
                self.property(r, j - 1, Some((j + 1, semi)), ctx, access, other_mods, is_static, m);
                end
            }
            _ => {
                // fields, `;` or `= initializer;`
                let decl_end = if stop.is("=") { self.ts.statement_end(j + 1, hi) } else { j };
                self.fields(r, j, decl_end, is_static, m);
                end
            }
        }
    }

    /// Parameter-list paren of a method head in `r..j`.
    fn signature_paren(&self, r: usize, j: usize) -> Option<usize> {
        let mut k = r;
        while k < j {
            let t = self.tok(k);
            if t.is("(") {
                if k > r && (self.tok(k - 1).is_ident() || self.tok(k - 1).is(">")) {
                    return Some(k);
                }
                k = self.ts.close_of(k, j) + 1;
                continue;
            }
            if t.is("[") {
                k = self.ts.close_of(k, j) + 1;
                continue;
            }
            k += 1;
        }
        None
    }

    fn accessors(&self, lo: usize, hi: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut k = lo;
        while k < hi {
            let t = self.tok(k);
            if t.is("{") || t.is("[") || t.is("(") {
                k = self.ts.close_of(k, hi) + 1;
                continue;
            }
            if t.is_ident() && ACCESSORS.contains(&t.text) {
                out.push(k);
            }
            k += 1;
        }
        out
    }

    fn analyze(&mut self, lo: usize, hi: usize, id: &str) -> BodyFacts {
        let mut facts = body::analyze(self.ts, lo, hi, id);
        for (code, off, member) in std::mem::take(&mut facts.skipped) {
            let msg = match code {
                DiagCode::ChainLinkSkipped => format!("chained link `.{member}` not followed"),
                _ => format!("call `{member}(...)` has no dot operator"),
            };
            let d = self.diag(off, code, msg);
            d.member = Some(member);
            d.method = Some(id.to_string());
        }
        facts
    }

    #[allow(clippy::too_many_arguments)]
    fn method(
        &mut self,
        r: usize,
        p: usize,
        j: usize,
        hi: usize,
        ctx: &ClassCtx,
        access: String,
        modifiers: Vec<String>,
        is_static: bool,
        m: &mut Members,
    ) {
        let mut name_idx = p - 1;
        let mut type_param_count = 0;
        if self.tok(name_idx).is(">") {
            let mut depth = 0usize;
            let mut k = name_idx;
            loop {
                let t = self.tok(k);
                if t.is(">") {
                    depth += 1;
                } else if t.is("<") {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                } else if t.is(",") && depth == 1 {
                    type_param_count += 1;
                }
                if k == r {
                    break;
                }
                k -= 1;
            }
            type_param_count += 1;
            name_idx = k.saturating_sub(1).max(r);
        }
        let name_tok = self.tok(name_idx);
        if !name_tok.is_ident() || name_tok.is_word("operator") || name_tok.is_word("this") {
            self.diag(self.tok(r).start, DiagCode::AmbiguousMember, "operator or unnamed method skipped");
            return;
        }
        // explicit interface implementation: `IFoo.Bar(`
        let mut ret_end = name_idx;
        while ret_end >= r + 2 && self.tok(ret_end - 1).is(".") && self.tok(ret_end - 2).is_ident() {
            ret_end -= 2;
        }
        let ret_toks = &self.ts.toks[r..ret_end];
        if ret_toks.iter().any(|t| t.is_word("operator") || t.is("~")) {
            return;
        }
        let return_type = render_tokens(ret_toks);
        let close = self.ts.close_of(p, hi);
        let parameters = parse_params(self.ts, p + 1, close);
        let name = name_tok.text.to_string();
        let id = format!(
            "{}({})",
            ctx.member_id(&name),
            parameters.iter().map(|q| q.ty.as_str()).collect::<Vec<_>>().join(",")
        );
        let (body_span, facts) = match self.tok(j).text {
            "{" => {
                let c = self.ts.close_of(j, hi);
                let span = (self.tok(j).end(), self.byte_at(c));
                (Some(span), self.analyze(j + 1, c, &id))
            }
            "=>" => {
                let semi = self.ts.statement_end(j + 1, hi);
                let span = (self.tok(j).end(), self.byte_at(semi));
                (Some(span), self.analyze(j + 1, semi, &id))
            }
            _ => (None, BodyFacts::default()),
        };
        let is_constructor = return_type.is_empty();
        m.methods.push(MethodModel {
            id,
            accessibility: access,
            modifiers,
            return_type,
            name,
            type_param_count,
            parameters,
            body_span,
            contains_anonymous: !facts.anonymous_offsets.is_empty(),
            call_sites: facts.call_sites,
            anonymous_offsets: facts.anonymous_offsets,
            locals: facts.locals,
            is_static,
            is_constructor,
            offset: name_tok.start,
        });
    }

    fn byte_at(&self, i: usize) -> usize {
        self.ts.toks.get(i).map_or_else(
            || self.ts.toks.last().map_or(0, |t| t.end()),
            |t| t.start,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn property(
        &mut self,
        r: usize,
        name_idx: usize,
        body: Option<(usize, usize)>,
        ctx: &ClassCtx,
        access: String,
        modifiers: Vec<String>,
        is_static: bool,
        m: &mut Members,
    ) {
        let name_tok = self.tok(name_idx);
        let mut ret_end = name_idx;
        while ret_end >= r + 2 && self.tok(ret_end - 1).is(".") && self.tok(ret_end - 2).is_ident() {
            ret_end -= 2;
        }
        let return_type = render_tokens(&self.ts.toks[r..ret_end]);
        let id = ctx.member_id(name_tok.text);
        let (body_span, facts) = match body {
            Some((lo, hi)) => {
                let span = (self.tok(lo - 1).end(), self.byte_at(hi));
                (Some(span), self.analyze(lo, hi, &id))
            }
            None => (None, BodyFacts::default()),
        };
        m.properties.push(PropertyModel {
            id,
            access,
            modifiers,
            return_type,
            name: name_tok.text.to_string(),
            is_static,
            has_body: body.is_some(),
            body_span,
            contains_anonymous: !facts.anonymous_offsets.is_empty(),
            call_sites: facts.call_sites,
            anonymous_offsets: facts.anonymous_offsets,
            locals: facts.locals,
            offset: name_tok.start,
        });
    }

    /// `Type a, b;` or `Type a = x, b = y;` spanning `r..end`.
    fn fields(&mut self, r: usize, first_stop: usize, end: usize, is_static: bool, m: &mut Members) {
        let name_tok = self.tok(first_stop - 1);
        // `int a, b;`: split the head on top-level commas
        let head = &self.ts.toks[r..first_stop];
        let mut angle = 0i32;
        let first_comma = head.iter().position(|t| {
            if t.is("<") {
                angle += 1;
            } else if t.is(">") {
                angle -= 1;
            }
            angle == 0 && t.is(",")
        });
        let (ty_toks, first_name, rest_names): (&[Token<'_>], Token<'_>, Vec<Token<'_>>) = match first_comma {
            Some(c) => {
                let names = head[c..]
                    .iter()
                    .skip(1)
                    .step_by(2)
                    .copied()
                    .filter(|t| t.is_ident())
                    .collect();
                (&head[..c - 1], head[c - 1], names)
            }
            None => (&head[..head.len() - 1], name_tok, Vec::new()),
        };
        if ty_toks.is_empty() {
            self.diag(first_name.start, DiagCode::AmbiguousMember, "declaration without a type")
                .member = Some(first_name.text.to_string());
            return;
        }
        let declared_type = render_tokens(ty_toks);
        let is_custom = !self.builtins.contains(&declared_type);
        let mut names = vec![first_name];
        names.extend(rest_names);
        // further declarators after an initializer: `, name =` or `, name ;`
        let mut k = first_stop;
        while k < end {
            let t = self.tok(k);
            if self.ts.is_open(k) {
                k = self.ts.close_of(k, end) + 1;
                continue;
            }
            if t.is(",") && k + 2 <= end && self.tok(k + 1).is_ident() {
                let after = if k + 2 < end { Some(self.tok(k + 2)) } else { None };
                if after.is_none_or(|a| a.is("=") || a.is(",")) {
                    names.push(self.tok(k + 1));
                }
            }
            k += 1;
        }
        for n in names {
            m.fields.push(FieldModel {
                declared_type: declared_type.clone(),
                name: n.text.to_string(),
                is_custom,
                is_static,
                offset: n.start,
            });
        }
    }
}

fn parent_name(toks: &[Token<'_>]) -> String {
    let raw = render_tokens(toks);
    let raw = raw.strip_prefix("global::").unwrap_or(&raw);
    base_type_name(raw)
}

/// Splits `lo..hi` (inside the parens) into parameters.
fn parse_params(ts: &TokenStream<'_>, lo: usize, hi: usize) -> Vec<Parameter> {
    let mut out = Vec::new();
    let mut parts = Vec::new();
    let mut start = lo;
    let mut angle = 0i32;
    let mut k = lo;
    while k < hi {
        let t = ts.toks[k];
        if ts.is_open(k) {
            k = ts.close_of(k, hi) + 1;
            continue;
        }
        if t.is("<") {
            angle += 1;
        } else if t.is(">") {
            angle -= 1;
        } else if t.is(",") && angle <= 0 {
            parts.push((start, k));
            start = k + 1;
        }
        k += 1;
    }
    if start < hi {
        parts.push((start, hi));
    }
    for (a, b) in parts {
        let mut a = a;
        let mut attributes = Vec::new();
        while a < b && ts.toks[a].is("[") {
            let c = ts.close_of(a, b);
            attributes.push(render_tokens(&ts.toks[a..(c + 1).min(b)]));
            a = c + 1;
        }
        let eq = (a..b).find(|&k| ts.toks[k].is("="));
        let (decl_end, default) = match eq {
            Some(e) => (e, Some(render_tokens(&ts.toks[e + 1..b]))),
            None => (b, None),
        };
        if decl_end <= a {
            continue;
        }
        let name = ts.toks[decl_end - 1];
        out.push(Parameter {
            attributes,
            ty: render_tokens(&ts.toks[a..decl_end - 1]),
            name: name.text.to_string(),
            default,
        });
    }
    out
}

/// Class declarations of a noise-stripped source, without members.
pub fn extract_classes(source: &str, namespace_ctx: &str) -> (Vec<ClassModel>, Vec<Diagnostic>) {
    let stripped = prepare(source);
    let ts = TokenStream::new(&stripped.text);
    let ex = walk_file(&ts, namespace_ctx, "", "", &BuiltinTypes::default(), false);
    (ex.classes, ex.diags)
}

/// Members of a class body (the text between its braces). Nested classes
/// are not returned; offsets are relative to `class_body`.
pub fn extract_members(
    class_body: &str,
) -> (Vec<MethodModel>, Vec<PropertyModel>, Vec<FieldModel>) {
    extract_members_with(class_body, &BuiltinTypes::default()).0
}

pub(crate) fn extract_members_with(
    class_body: &str,
    builtins: &BuiltinTypes,
) -> ((Vec<MethodModel>, Vec<PropertyModel>, Vec<FieldModel>), Vec<Diagnostic>) {
    let stripped = prepare(class_body);
    let ts = TokenStream::new(&stripped.text);
    let mut w = Walker {
        ts: &ts,
        file: "",
        project: "",
        builtins,
        with_members: true,
        out: Extraction::default(),
    };
    let ctx = ClassCtx {
        id: String::new(),
        namespace: String::new(),
    };
    let m = w.members(0, ts.len(), &ctx);
    ((m.methods, m.properties, m.fields), w.out.diags)
}
