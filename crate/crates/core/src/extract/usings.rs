//! `using` directive extraction: one directive per line that starts with the
//! keyword, tokenized up to the terminating semicolon and split on dots.

use serde::{Deserialize, Serialize};

use crate::diag::DiagCode;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UsingDirective {
    pub segments: Vec<String>,
    pub raw: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_static: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
    pub offset: usize,
}

impl UsingDirective {
    pub fn namespace(&self) -> String {
        self.segments.join(".")
    }
}

/// Extracts directives from noise-stripped source.
pub fn extract_usings(source: &str) -> Vec<UsingDirective> {
    extract_usings_with_problems(source).0
}

pub(crate) fn extract_usings_with_problems(
    source: &str,
) -> (Vec<UsingDirective>, Vec<(DiagCode, usize)>) {
    let mut out = Vec::new();
    let mut problems = Vec::new();
    let mut line_start = 0;
    for line in source.split_inclusive('\n') {
        let offset = line_start;
        line_start += line.len();
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        let rest = trimmed
            .strip_prefix("global ")
            .map(str::trim_start)
            .unwrap_or(trimmed);
        let Some(after) = rest.strip_prefix("using") else { continue };
        if !after.starts_with(char::is_whitespace) {
            continue;
        }
        match parse_directive(after) {
            Parsed::Directive { raw, is_static, alias } => out.push(UsingDirective {
                segments: raw.split('.').map(str::to_string).collect(),
                raw,
                is_static,
                alias,
                offset: offset + indent,
            }),
            Parsed::MissingSemicolon => problems.push((DiagCode::UsingWithoutSemicolon, offset + indent)),
            Parsed::NotADirective => {}
        }
    }
    (out, problems)
}

enum Parsed {
    Directive {
        raw: String,
        is_static: bool,
        alias: Option<String>,
    },
    MissingSemicolon,
    NotADirective,
}

fn parse_directive(after_keyword: &str) -> Parsed {
    let line = after_keyword.trim_end_matches(['\n', '\r']);
    let Some(semi) = line.find(';') else {
        // `using (...)` and `using var x = ...` statements are not directives
        let head = line.trim_start();
        return if head.is_empty() || head.starts_with('(') || head.starts_with("var ") {
            Parsed::NotADirective
        } else if looks_dotted(head.split_whitespace().next().unwrap_or("")) {
            Parsed::MissingSemicolon
        } else {
            Parsed::NotADirective
        };
    };
    let body = line[..semi].trim();
    let (is_static, body) = match body.strip_prefix("static ") {
        Some(rest) => (true, rest.trim_start()),
        None => (false, body),
    };
    let (alias, target) = match body.split_once('=') {
        Some((a, t)) => (Some(a.trim().to_string()), t.trim()),
        None => (None, body),
    };
    if alias.as_deref().is_some_and(|a| !is_identifier(a)) {
        return Parsed::NotADirective;
    }
    let raw: String = target.split_whitespace().collect();
    if looks_dotted(&raw) {
        Parsed::Directive {
            raw,
            is_static,
            alias,
        }
    } else {
        Parsed::NotADirective
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c == '_' || c.is_alphabetic())
        && chars.all(|c| c == '_' || c.is_alphanumeric())
}

fn looks_dotted(s: &str) -> bool {
    !s.is_empty() && s.split('.').all(is_identifier)
}
