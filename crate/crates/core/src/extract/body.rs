//! Method-body rules: dot-operator call sites, `=>` anonymous functions,
//! local declarations, and diagnostics for chained and bare calls.

use crate::diag::DiagCode;

use super::lexer::{TokKind, Token};
use super::types::render_tokens;
use super::{prepare, CallSite, LocalDecl, TokenStream};

/// Words that read like a call when followed by `(` but are not.
const NOT_CALLS: [&str; 22] = [
    "if", "while", "for", "foreach", "switch", "catch", "using", "lock", "return", "new", "typeof",
    "sizeof", "nameof", "default", "checked", "unchecked", "base", "this", "fixed", "when", "throw",
    "await",
];

/// Words after which an identifier starts an expression, not a declaration.
const EXPR_LEAD: [&str; 13] = [
    "return", "await", "throw", "else", "in", "case", "yield", "is", "not", "and", "or", "when",
    "do",
];

/// Words that may precede a local declaration's type.
const DECL_LEAD: [&str; 7] = ["out", "ref", "using", "is", "const", "in", "scoped"];

/// Words that cannot start a type.
const NOT_TYPES: [&str; 20] = [
    "return", "new", "throw", "await", "else", "case", "goto", "yield", "in", "is", "as", "out",
    "ref", "using", "typeof", "sizeof", "nameof", "default", "this", "base",
];

const ACCESSORS: [&str; 5] = ["get", "set", "init", "add", "remove"];

#[derive(Debug, Default)]
pub(crate) struct BodyFacts {
    pub call_sites: Vec<CallSite>,
    pub anonymous_offsets: Vec<usize>,
    pub locals: Vec<LocalDecl>,
    /// `(code, offset, member)` for skipped chain links and bare calls.
    pub skipped: Vec<(DiagCode, usize, String)>,
}

/// Analyzes tokens `lo..hi` as the body of `method_id`.
pub(crate) fn analyze(ts: &TokenStream<'_>, lo: usize, hi: usize, method_id: &str) -> BodyFacts {
    let toks = &ts.toks;
    let mut facts = BodyFacts::default();

    // lambda extents, as inclusive token ranges
    let mut suppressed: Vec<(usize, usize)> = Vec::new();
    for k in lo..hi {
        if !toks[k].is("=>") {
            continue;
        }
        if k > lo && ACCESSORS.contains(&toks[k - 1].text) && toks[k - 1].is_ident() {
            continue;
        }
        facts.anonymous_offsets.push(toks[k].start);
        let param_start = if k > lo && toks[k - 1].is(")") && ts.pair[k - 1] != usize::MAX {
            ts.pair[k - 1].max(lo)
        } else {
            k.saturating_sub(1).max(lo)
        };
        let end = if k + 1 < hi && toks[k + 1].is("{") {
            ts.close_of(k + 1, hi)
        } else {
            lambda_expr_end(ts, k + 1, hi)
        };
        suppressed.push((param_start, end));
    }
    let is_suppressed = |i: usize| suppressed.iter().any(|&(a, b)| a <= i && i <= b);

    for k in lo..hi {
        if is_suppressed(k) {
            continue;
        }
        let t = toks[k];
        if t.is_member_access() {
            member_access(ts, lo, hi, k, method_id, &mut facts);
        } else if t.is_ident() {
            bare_call(ts, lo, hi, k, &mut facts);
            local_decl(ts, lo, hi, k, &mut facts);
        }
    }
    facts
}

/// End (exclusive bound, as an index) of an expression-bodied lambda.
fn lambda_expr_end(ts: &TokenStream<'_>, from: usize, hi: usize) -> usize {
    let mut k = from;
    while k < hi {
        let t = &ts.toks[k];
        if ts.is_open(k) {
            k = ts.close_of(k, hi) + 1;
            continue;
        }
        if t.is(",") || t.is(";") || t.is(")") || t.is("]") || t.is("}") {
            return k.saturating_sub(1).max(from);
        }
        k += 1;
    }
    hi.saturating_sub(1)
}

fn member_access(
    ts: &TokenStream<'_>,
    lo: usize,
    hi: usize,
    k: usize,
    method_id: &str,
    facts: &mut BodyFacts,
) {
    let toks = &ts.toks;
    if k == lo || k + 1 >= hi || !toks[k + 1].is_ident() {
        return;
    }
    let member = toks[k + 1];
    let prev = toks[k - 1];
    match prev.kind {
        TokKind::Ident => {
            // walk back over `a.b.` to collect the qualifier
            let mut m = k - 1;
            while m >= lo + 2 && toks[m - 1].is_member_access() && toks[m - 2].is_ident() {
                m -= 2;
            }
            let qualifier = (m..k - 1)
                .step_by(2)
                .map(|i| toks[i].text.to_string())
                .collect();
            facts.call_sites.push(CallSite {
                receiver_token: prev.text.to_string(),
                member_token: member.text.to_string(),
                is_invocation: is_invoked(ts, k + 2, hi),
                enclosing_method: method_id.to_string(),
                char_offset: prev.start,
                qualifier,
            });
        }
        TokKind::Punct if prev.is(")") || prev.is("]") => {
            facts
                .skipped
                .push((DiagCode::ChainLinkSkipped, member.start, member.text.to_string()));
        }
        _ => {}
    }
}

/// `(` directly after the member, or after generic arguments.
fn is_invoked(ts: &TokenStream<'_>, at: usize, hi: usize) -> bool {
    if at >= hi {
        return false;
    }
    let t = &ts.toks[at];
    if t.is("(") {
        return true;
    }
    if t.is("<") {
        if let Some(after) = ts.generic_close(at, hi) {
            return after < hi && ts.toks[after].is("(");
        }
    }
    false
}

fn bare_call(ts: &TokenStream<'_>, lo: usize, hi: usize, k: usize, facts: &mut BodyFacts) {
    let toks = &ts.toks;
    let t = toks[k];
    if k + 1 >= hi || !toks[k + 1].is("(") || NOT_CALLS.contains(&t.text) {
        return;
    }
    if k > lo {
        let prev = toks[k - 1];
        if prev.is_member_access() || prev.is(">") || prev.is("]") || prev.is("::") {
            return;
        }
        // a type before the name makes it a local function declaration
        if prev.is_ident() && !EXPR_LEAD.contains(&prev.text) {
            return;
        }
    }
    facts.skipped.push((DiagCode::BareCallSkipped, t.start, t.text.to_string()));
}

fn local_decl(ts: &TokenStream<'_>, lo: usize, hi: usize, k: usize, facts: &mut BodyFacts) {
    let toks = &ts.toks;
    if k + 1 >= hi || k == lo || NOT_TYPES.contains(&toks[k].text) {
        return;
    }
    let next = toks[k + 1];
    if !(next.is("=") || next.is(";") || next.is(",") || next.is(")") || next.is_word("in")) {
        return;
    }
    let Some(ts_start) = type_start(toks, lo, k - 1) else { return };
    if NOT_TYPES.contains(&toks[ts_start].text) {
        return;
    }
    let boundary = ts_start == lo || {
        let b = toks[ts_start - 1];
        b.is(";") || b.is("{") || b.is("}") || b.is("(") || (b.is_ident() && DECL_LEAD.contains(&b.text))
    };
    if !boundary {
        return;
    }
    let ty = render_tokens(&toks[ts_start..k]);
    let ty = if ty == "var" { infer_var(ts, k, hi) } else { Some(ty) };
    facts.locals.push(LocalDecl {
        name: toks[k].text.to_string(),
        ty,
        offset: toks[k].start,
    });
}

/// Start index of a type whose last token is at `e`, if it is one.
fn type_start(toks: &[Token<'_>], lo: usize, mut e: usize) -> Option<usize> {
    if e < lo {
        return None;
    }
    if toks[e].is("?") {
        e = e.checked_sub(1).filter(|&e| e >= lo)?;
    }
    while toks[e].is("]") && e > lo {
        let mut s = e - 1;
        while s > lo && toks[s].is(",") {
            s -= 1;
        }
        if !toks[s].is("[") {
            return None;
        }
        e = s.checked_sub(1).filter(|&e| e >= lo)?;
    }
    if toks[e].is(">") {
        let mut depth = 0usize;
        let mut s = e;
        loop {
            let t = toks[s];
            if t.is(">") {
                depth += 1;
            } else if t.is("<") {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            } else if !(t.is_ident() || t.is(",") || t.is(".") || t.is("?") || t.is("[") || t.is("]")) {
                return None;
            }
            if s == lo {
                return None;
            }
            s -= 1;
        }
        e = s.checked_sub(1).filter(|&e| e >= lo)?;
    }
    if !toks[e].is_ident() {
        return None;
    }
    while e >= lo + 2 && toks[e - 1].is(".") && toks[e - 2].is_ident() {
        e -= 2;
    }
    Some(e)
}

/// Type of `var name = new T(...)` or `var name = (T)expr`.
fn infer_var(ts: &TokenStream<'_>, k: usize, hi: usize) -> Option<String> {
    let toks = &ts.toks;
    if k + 2 >= hi || !toks[k + 1].is("=") {
        return None;
    }
    let at = k + 2;
    if toks[at].is_word("new") {
        let mut e = at + 1;
        while e < hi && (toks[e].is_ident() || toks[e].is(".")) {
            e += 1;
        }
        if e < hi && toks[e].is("<") {
            e = ts.generic_close(e, hi)?;
        }
        let ty = &toks[at + 1..e];
        return (!ty.is_empty() && ty[0].is_ident()).then(|| render_tokens(ty));
    }
    if toks[at].is("(") {
        let close = ts.close_of(at, hi);
        let inner = &toks[at + 1..close.min(hi)];
        let type_like = !inner.is_empty()
            && inner[0].is_ident()
            && inner.iter().all(|t| t.is_ident() || t.is(".") || t.is("<") || t.is(">") || t.is(","));
        let after = toks.get(close + 1);
        let operand = after.is_some_and(|t| t.is_ident() || t.is("("));
        if type_like && operand && close < hi {
            return Some(render_tokens(inner));
        }
    }
    None
}

/// Call sites of a noise-stripped body text; offsets are relative to it.
pub fn extract_call_sites(method_body: &str, method_id: &str) -> Vec<CallSite> {
    let stripped = prepare(method_body);
    let ts = TokenStream::new(&stripped.text);
    analyze(&ts, 0, ts.len(), method_id).call_sites
}

/// `=>` offsets of lambdas in a body text, ascending.
pub fn detect_anonymous(method_body: &str) -> (bool, Vec<usize>) {
    let stripped = prepare(method_body);
    let ts = TokenStream::new(&stripped.text);
    let offsets = analyze(&ts, 0, ts.len(), "").anonymous_offsets;
    (!offsets.is_empty(), offsets)
}
