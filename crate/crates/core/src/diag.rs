//! Structured diagnostics. Extraction and resolution never abort on bad
//! input; they record one of these and carry on.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagCode {
    UnterminatedComment,
    UnterminatedString,
    UsingWithoutSemicolon,
    ClassWithoutName,
    AmbiguousMember,
    /// A `.member` whose receiver is a call or index result.
    ChainLinkSkipped,
    /// A call without a dot operator; outside the dot-operator rule.
    BareCallSkipped,
    DuplicateClass,
    AmbiguousType,
    UnresolvedReceiver,
    MemberNotFound,
    UnboundLayer,
    UnreadableFile,
}

impl DiagCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagCode::UnterminatedComment => "unterminated-comment",
            DiagCode::UnterminatedString => "unterminated-string",
            DiagCode::UsingWithoutSemicolon => "using-without-semicolon",
            DiagCode::ClassWithoutName => "class-without-name",
            DiagCode::AmbiguousMember => "ambiguous-member",
            DiagCode::ChainLinkSkipped => "chain-link-skipped",
            DiagCode::BareCallSkipped => "bare-call-skipped",
            DiagCode::DuplicateClass => "duplicate-class",
            DiagCode::AmbiguousType => "ambiguous-type",
            DiagCode::UnresolvedReceiver => "unresolved-receiver",
            DiagCode::MemberNotFound => "member-not-found",
            DiagCode::UnboundLayer => "unbound-layer",
            DiagCode::UnreadableFile => "unreadable-file",
        }
    }

    /// Codes that explain a call the graph could not follow.
    pub fn explains_missing_call(self) -> bool {
        matches!(
            self,
            DiagCode::ChainLinkSkipped
                | DiagCode::BareCallSkipped
                | DiagCode::UnresolvedReceiver
                | DiagCode::MemberNotFound
        )
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub offset: usize,
    pub code: DiagCode,
    pub message: String,
    /// Member token involved, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub member: Option<String>,
    /// Enclosing method id, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
}

impl Diagnostic {
    pub fn new(file: impl Into<String>, offset: usize, code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic {
            file: file.into(),
            offset,
            code,
            message: message.into(),
            member: None,
            method: None,
        }
    }

    pub fn with_member(mut self, member: impl Into<String>) -> Self {
        self.member = Some(member.into());
        self
    }

    pub fn with_method(mut self, method: impl Into<String>) -> Self {
        self.method = Some(method.into());
        self
    }

    /// Emits the record on the structured log.
    pub fn log(&self) {
        tracing::debug!(
            file = %self.file,
            offset = self.offset,
            code = %self.code,
            member = self.member.as_deref().unwrap_or(""),
            "{}",
            self.message
        );
    }
}

pub fn summarize<'a>(diags: impl IntoIterator<Item = &'a Diagnostic>) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for d in diags {
        *out.entry(d.code.as_str().to_string()).or_insert(0) += 1;
    }
    out
}
