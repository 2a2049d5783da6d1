//! Tokenizer over noise-stripped source.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokKind {
    Ident,
    Number,
    /// A (blanked) string literal, prefix and delimiters included.
    Str,
    /// A (blanked) character literal.
    Char,
    Punct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokKind,
    pub text: &'a str,
    /// Byte offset of the first byte in the source.
    pub start: usize,
}

impl<'a> Token<'a> {
    pub fn end(&self) -> usize {
        self.start + self.text.len()
    }

    pub fn is(&self, punct: &str) -> bool {
        self.kind == TokKind::Punct && self.text == punct
    }

    pub fn is_ident(&self) -> bool {
        self.kind == TokKind::Ident
    }

    pub fn is_word(&self, word: &str) -> bool {
        self.kind == TokKind::Ident && self.text == word
    }

    /// `.` or the null-conditional `?.`.
    pub fn is_member_access(&self) -> bool {
        self.kind == TokKind::Punct && (self.text == "." || self.text == "?.")
    }
}

const TWO_CHAR_PUNCT: [&str; 17] = [
    "=>", ">=", "<=", "==", "!=", "&&", "||", "??", "?.", "::", "++", "--", "+=", "-=", "*=",
    "/=", "->",
];

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();

    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }

        // @identifier (verbatim identifier); @"..." and $"..." are strings
        if (c == '@' || c == '$') && is_string_prefix(bytes, i) {
            let q = i + bytes[i..].iter().take_while(|&&b| b == b'@' || b == b'$').count();
            let end = string_end(bytes, q);
            tokens.push(Token { kind: TokKind::Str, text: &text[i..end], start: i });
            advance_to(&mut chars, end);
            continue;
        }
        if c == '@' && text[i + 1..].chars().next().is_some_and(is_ident_start) {
            chars.next();
            let start = i + 1;
            let end = ident_end(text, start);
            tokens.push(Token { kind: TokKind::Ident, text: &text[start..end], start });
            advance_to(&mut chars, end);
            continue;
        }

        if is_ident_start(c) {
            let end = ident_end(text, i);
            tokens.push(Token { kind: TokKind::Ident, text: &text[i..end], start: i });
            advance_to(&mut chars, end);
            continue;
        }

        if c.is_ascii_digit() {
            let mut end = i;
            while end < bytes.len() {
                let b = bytes[end];
                let fraction = b == b'.' && end + 1 < bytes.len() && bytes[end + 1].is_ascii_digit();
                if b.is_ascii_alphanumeric() || b == b'_' || fraction {
                    end += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token { kind: TokKind::Number, text: &text[i..end], start: i });
            advance_to(&mut chars, end);
            continue;
        }

        if c == '"' {
            let end = string_end(bytes, i);
            tokens.push(Token { kind: TokKind::Str, text: &text[i..end], start: i });
            advance_to(&mut chars, end);
            continue;
        }

        if c == '\'' {
            let end = bytes[i + 1..]
                .iter()
                .take(12)
                .position(|&b| b == b'\'')
                .map_or(i + 1, |p| i + 1 + p + 1);
            let kind = if end > i + 1 { TokKind::Char } else { TokKind::Punct };
            tokens.push(Token { kind, text: &text[i..end], start: i });
            advance_to(&mut chars, end);
            continue;
        }

        let two = text.get(i..i + 2);
        if let Some(op) = two.filter(|t| TWO_CHAR_PUNCT.contains(t)) {
            // `a ?.5 : b` is a conditional, not member access
            let conditional = op == "?." && bytes.get(i + 2).is_some_and(u8::is_ascii_digit);
            if !conditional {
                tokens.push(Token { kind: TokKind::Punct, text: &text[i..i + 2], start: i });
                advance_to(&mut chars, i + 2);
                continue;
            }
        }
        let end = i + c.len_utf8();
        tokens.push(Token { kind: TokKind::Punct, text: &text[i..end], start: i });
        chars.next();
    }
    tokens
}

fn is_string_prefix(bytes: &[u8], i: usize) -> bool {
    let run = bytes[i..].iter().take_while(|&&b| b == b'@' || b == b'$').count();
    bytes.get(i + run) == Some(&b'"')
}

fn ident_end(text: &str, start: usize) -> usize {
    text[start..]
        .char_indices()
        .find(|&(_, c)| !is_ident_continue(c))
        .map_or(text.len(), |(p, _)| start + p)
}

/// End of a blanked string literal starting at quote `q`.
fn string_end(bytes: &[u8], q: usize) -> usize {
    let run = bytes[q..].iter().take_while(|&&b| b == b'"').count();
    if run >= 3 {
        let mut i = q + run;
        while i < bytes.len() {
            if bytes[i] == b'"' {
                let r = bytes[i..].iter().take_while(|&&b| b == b'"').count();
                if r >= run {
                    return i + run;
                }
                i += r;
            } else {
                i += 1;
            }
        }
        return bytes.len();
    }
    // contents are blank, so the next quote closes the literal
    memchr::memchr(b'"', &bytes[q + 1..]).map_or(bytes.len(), |p| q + 1 + p + 1)
}

fn advance_to(chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>, end: usize) {
    while chars.peek().is_some_and(|&(i, _)| i < end) {
        chars.next();
    }
}
