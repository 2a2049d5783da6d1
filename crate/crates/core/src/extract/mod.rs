//! Token-rule extraction of usings, classes, members, call sites and
//! anonymous functions from one source file.
//!
//! Every stage runs over noise-stripped text (see [`strip_noise`]), so byte
//! offsets reported here index the original file.

mod body;
mod decl;
pub mod lexer;
pub mod noise;
pub mod types;
pub mod usings;

use serde::{Deserialize, Serialize};

use crate::config::ProjectConfig;
use crate::diag::Diagnostic;

pub use body::{detect_anonymous, extract_call_sites};
pub use decl::{extract_classes, extract_members};
pub use noise::{strip_noise, Stripped};
pub use types::BuiltinTypes;
pub use usings::{extract_usings, UsingDirective};

use lexer::{tokenize, Token};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
    pub ty: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<String>,
}

impl Parameter {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for a in &self.attributes {
            s.push_str(a);
            s.push(' ');
        }
        if !self.ty.is_empty() {
            s.push_str(&self.ty);
            s.push(' ');
        }
        s.push_str(&self.name);
        if let Some(d) = &self.default {
            s.push_str(" = ");
            s.push_str(d);
        }
        s
    }
}

/// Renders a parameter list the way it would appear between the parens.
pub fn render_parameters(params: &[Parameter]) -> String {
    params.iter().map(Parameter::render).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDecl {
    pub name: String,
    /// `None` for `var` whose initializer does not name a type.
    pub ty: Option<String>,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub receiver_token: String,
    pub member_token: String,
    pub is_invocation: bool,
    pub enclosing_method: String,
    /// Offset of the receiver token.
    pub char_offset: usize,
    /// Dotted segments written before the receiver: `a.b` in `a.b.c.D()`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub qualifier: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodModel {
    pub id: String,
    pub accessibility: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modifiers: Vec<String>,
    /// Empty for constructors.
    pub return_type: String,
    pub name: String,
    pub type_param_count: usize,
    pub parameters: Vec<Parameter>,
    /// Byte range of the body, `None` for abstract/extern/partial heads.
    pub body_span: Option<(usize, usize)>,
    pub call_sites: Vec<CallSite>,
    pub contains_anonymous: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anonymous_offsets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<LocalDecl>,
    pub is_static: bool,
    pub is_constructor: bool,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyModel {
    pub id: String,
    pub access: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modifiers: Vec<String>,
    pub return_type: String,
    pub name: String,
    pub is_static: bool,
    /// An accessor (or the whole property) has code: `get { ... }`, `=> expr`.
    pub has_body: bool,
    pub body_span: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub call_sites: Vec<CallSite>,
    pub contains_anonymous: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anonymous_offsets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub locals: Vec<LocalDecl>,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldModel {
    pub declared_type: String,
    pub name: String,
    pub is_custom: bool,
    pub is_static: bool,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassModel {
    /// `namespace.Name`, or `namespace.Outer.Name` when nested.
    pub id: String,
    pub qualifier: String,
    pub name: String,
    pub type_param_count: usize,
    pub parents: Vec<String>,
    pub namespace: String,
    pub file: String,
    pub project_id: String,
    pub is_static: bool,
    pub is_partial: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<String>,
    pub offset: usize,
    pub methods: Vec<MethodModel>,
    pub properties: Vec<PropertyModel>,
    pub fields: Vec<FieldModel>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileModel {
    /// `project/path`.
    pub file: String,
    pub project_id: String,
    pub path: String,
    pub usings: Vec<UsingDirective>,
    pub namespaces: Vec<String>,
    pub classes: Vec<ClassModel>,
    /// Configured file markers found in the raw text.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub markers: Vec<String>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Debug, Default)]
pub struct ExtractOptions {
    pub builtins: BuiltinTypes,
    pub file_markers: Vec<String>,
}

impl ExtractOptions {
    pub fn for_project(cfg: &ProjectConfig, extra_builtins: &[String]) -> Self {
        ExtractOptions {
            builtins: BuiltinTypes::with_extra(extra_builtins.iter().cloned()),
            file_markers: cfg.proxy_file_markers().map(str::to_string).collect(),
        }
    }
}

/// Tokens plus bracket matching, shared by the declaration and body passes.
pub(crate) struct TokenStream<'a> {
    pub toks: Vec<Token<'a>>,
    /// For `(`, `[` and `{`: index of the matching close, `toks.len()` when
    /// unmatched. For closes: index of the matching open, `usize::MAX` when
    /// unmatched. `usize::MAX` for everything else.
    pub pair: Vec<usize>,
}

impl<'a> TokenStream<'a> {
    pub fn new(text: &'a str) -> Self {
        let toks = tokenize(text);
        let n = toks.len();
        let mut pair = vec![usize::MAX; n];
        let mut stack: Vec<(usize, &str)> = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            if t.kind != lexer::TokKind::Punct {
                continue;
            }
            match t.text {
                "(" | "[" | "{" => stack.push((i, t.text)),
                ")" | "]" | "}" => {
                    let want = match t.text {
                        ")" => "(",
                        "]" => "[",
                        _ => "{",
                    };
                    // unwind past unmatched opens of other kinds
                    if let Some(pos) = stack.iter().rposition(|&(_, o)| o == want) {
                        for &(j, _) in &stack[pos + 1..] {
                            pair[j] = n;
                        }
                        let (j, _) = stack[pos];
                        stack.truncate(pos);
                        pair[j] = i;
                        pair[i] = j;
                    }
                }
                _ => {}
            }
        }
        for (j, _) in stack {
            pair[j] = n;
        }
        TokenStream { toks, pair }
    }

    pub fn len(&self) -> usize {
        self.toks.len()
    }

    /// Matching close of the open bracket at `i`, clamped to `hi`.
    pub fn close_of(&self, i: usize, hi: usize) -> usize {
        self.pair[i].min(hi)
    }

    pub fn is_open(&self, i: usize) -> bool {
        let t = &self.toks[i];
        t.is("(") || t.is("[") || t.is("{")
    }

    /// Index of the first `;` at this nesting level from `from`, or of an
    /// unmatched close, or `hi`.
    pub fn statement_end(&self, from: usize, hi: usize) -> usize {
        let mut k = from;
        while k < hi {
            let t = &self.toks[k];
            if self.is_open(k) {
                k = self.close_of(k, hi) + 1;
            } else if t.is(";") || t.is(")") || t.is("]") || t.is("}") {
                return k;
            } else {
                k += 1;
            }
        }
        hi
    }

    /// Index one past the `>` matching a `<` at `lt`, if the run between
    /// them looks like type arguments.
    pub fn generic_close(&self, lt: usize, hi: usize) -> Option<usize> {
        let mut depth = 0usize;
        let mut k = lt;
        while k < hi {
            let t = &self.toks[k];
            if t.is("<") {
                depth += 1;
            } else if t.is(">") {
                depth -= 1;
                if depth == 0 {
                    return Some(k + 1);
                }
            } else if !(t.is_ident()
                || t.is(",")
                || t.is(".")
                || t.is("?")
                || t.is("[")
                || t.is("]")
                || t.is("::"))
            {
                return None;
            }
            k += 1;
        }
        None
    }
}

/// Blanks preprocessor lines (`#region`, `#if`, ...) keeping offsets.
fn blank_directives(text: &mut String) {
    let mut ranges = Vec::new();
    let mut start = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') {
            let body = line.trim_end_matches(['\n', '\r']);
            ranges.push((start + line.len() - trimmed.len(), start + body.len()));
        }
        start += line.len();
    }
    let mut bytes = std::mem::take(text).into_bytes();
    for (a, b) in ranges {
        bytes[a..b].fill(b' ');
    }
    *text = String::from_utf8(bytes).expect("whole lines replaced");
}

pub(crate) fn prepare(source: &str) -> Stripped {
    let mut s = strip_noise(source);
    blank_directives(&mut s.text);
    s
}

/// Extracts the full model of one code-behind file. Never fails; problems
/// end up in [`FileModel::diagnostics`].
pub fn extract_file(project_id: &str, path: &str, source: &str, opts: &ExtractOptions) -> FileModel {
    let file = format!("{project_id}/{path}");
    let stripped = prepare(source);
    let mut diagnostics: Vec<Diagnostic> = stripped
        .problems
        .iter()
        .map(|&(code, off)| Diagnostic::new(&file, off, code, code.as_str()))
        .collect();

    let (usings, using_problems) = usings::extract_usings_with_problems(&stripped.text);
    diagnostics.extend(using_problems.into_iter().map(|(code, off)| {
        Diagnostic::new(&file, off, code, "using directive without terminating `;`")
    }));

    let ts = TokenStream::new(&stripped.text);
    let ex = decl::walk_file(&ts, "", &file, project_id, &opts.builtins, true);
    diagnostics.extend(ex.diags);

    let markers = opts
        .file_markers
        .iter()
        .filter(|m| !m.is_empty() && source.contains(m.as_str()))
        .cloned()
        .collect();

    diagnostics.sort();
    for d in &diagnostics {
        d.log();
    }
    FileModel {
        file,
        project_id: project_id.to_string(),
        path: path.to_string(),
        usings,
        namespaces: ex.namespaces,
        classes: ex.classes,
        markers,
        diagnostics,
    }
}
