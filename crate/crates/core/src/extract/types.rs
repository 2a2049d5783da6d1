//! Type-token helpers: rendering, generic stripping and the builtin
//! exclusion list used for composition members.

use std::collections::BTreeSet;

use super::lexer::{tokenize, TokKind, Token};

/// Language-provided types never treated as composition links.
pub const BUILTIN_TYPES: [&str; 17] = [
    "bool", "byte", "sbyte", "char", "decimal", "double", "float", "int", "uint", "long", "ulong",
    "short", "ushort", "object", "string", "void", "var",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuiltinTypes(BTreeSet<String>);

impl Default for BuiltinTypes {
    fn default() -> Self {
        BuiltinTypes(BUILTIN_TYPES.iter().map(|s| s.to_string()).collect())
    }
}

impl BuiltinTypes {
    pub fn with_extra<I, S>(extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut b = BuiltinTypes::default();
        b.0.extend(extra.into_iter().map(Into::into));
        b
    }

    /// `int`, `int?`, `int[]` and `string[,]` are all builtin.
    pub fn contains(&self, ty: &str) -> bool {
        self.0.contains(strip_suffixes(ty))
    }
}

pub fn is_builtin_keyword(word: &str) -> bool {
    BUILTIN_TYPES.contains(&word)
}

fn strip_suffixes(ty: &str) -> &str {
    let mut t = ty.trim();
    loop {
        if let Some(rest) = t.strip_suffix('?') {
            t = rest.trim_end();
        } else if t.ends_with(']') {
            match t.rfind('[') {
                Some(p) if t[p + 1..t.len() - 1].chars().all(|c| c == ',' || c.is_whitespace()) => {
                    t = t[..p].trim_end();
                }
                _ => return t,
            }
        } else {
            return t;
        }
    }
}

/// Drops generic arguments, array/nullable suffixes and `ref`/`out`-style
/// modifiers: `List<Order>` → `List`, `ref Shop.Data.Repo[]` → `Shop.Data.Repo`.
pub fn base_type_name(ty: &str) -> String {
    let t = strip_suffixes(ty);
    let t = t
        .split_whitespace()
        .last()
        .map(|last| {
            // modifiers sit before the type: `ref int`, `params string[]`
            if t.contains('<') { t } else { last }
        })
        .unwrap_or(t);
    let t = ["ref ", "out ", "in ", "params ", "this ", "readonly "]
        .iter()
        .fold(t, |acc, m| acc.strip_prefix(m).unwrap_or(acc));
    let mut out = String::with_capacity(t.len());
    let mut depth = 0usize;
    for c in t.chars() {
        match c {
            '<' => depth += 1,
            '>' => depth = depth.saturating_sub(1),
            c if depth == 0 && !c.is_whitespace() => out.push(c),
            _ => {}
        }
    }
    strip_suffixes(&out).to_string()
}

/// Last dotted segment of the base type name.
pub fn simple_type_name(ty: &str) -> String {
    let base = base_type_name(ty);
    base.rsplit('.').next().unwrap_or(&base).to_string()
}

/// Number of top-level generic parameters in `<...>`, 0 when absent.
pub fn generic_arity(ty: &str) -> usize {
    let Some(open) = ty.find('<') else { return 0 };
    let mut depth = 0usize;
    let mut commas = 0usize;
    for c in ty[open..].chars() {
        match c {
            '<' => depth += 1,
            '>' => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            ',' if depth == 1 => commas += 1,
            _ => {}
        }
    }
    commas + 1
}

fn word_like(t: &Token<'_>) -> bool {
    matches!(t.kind, TokKind::Ident | TokKind::Number)
}

/// Joins tokens with a single space only between two word-like tokens.
pub fn render_tokens(tokens: &[Token<'_>]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 && word_like(&tokens[i - 1]) && word_like(t) {
            out.push(' ');
        }
        out.push_str(t.text);
    }
    out
}

/// Whitespace normalization used to compare parameter lists.
pub fn normalize_whitespace(text: &str) -> String {
    render_tokens(&tokenize(text))
}
