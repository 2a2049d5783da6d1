//! Blanks comments and literal contents so the token rules never fire inside
//! them. Every byte keeps its offset.

use crate::diag::DiagCode;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stripped {
    pub text: String,
    /// `(code, offset)` for each unterminated comment or literal.
    pub problems: Vec<(DiagCode, usize)>,
}

/// Replaces line comments, block comments and the contents of string and
/// character literals with spaces.
///
/// Comments are blanked entirely; literals keep their delimiters (and any
/// `@`/`$` prefix) so later stages still see an operand. Line breaks inside
/// a blanked region are kept so line numbers stay meaningful. An
/// unterminated comment or string blanks through end of input and is
/// reported in [`Stripped::problems`].
pub fn strip_noise(source: &str) -> Stripped {
    let src = source.as_bytes();
    let mut out = src.to_vec();
    let mut problems = Vec::new();
    let n = src.len();
    let mut i = 0;

    let blank = |out: &mut Vec<u8>, from: usize, to: usize| {
        for b in &mut out[from..to] {
            if *b != b'\n' && *b != b'\r' {
                *b = b' ';
            }
        }
    };

    while i < n {
        match src[i] {
            b'/' if i + 1 < n && src[i + 1] == b'/' => {
                let end = memchr::memchr(b'\n', &src[i..]).map_or(n, |p| i + p);
                blank(&mut out, i, end);
                i = end;
            }
            b'/' if i + 1 < n && src[i + 1] == b'*' => {
                match memchr::memmem::find(&src[i + 2..], b"*/") {
                    Some(p) => {
                        let end = i + 2 + p + 2;
                        blank(&mut out, i, end);
                        i = end;
                    }
                    None => {
                        problems.push((DiagCode::UnterminatedComment, i));
                        blank(&mut out, i, n);
                        i = n;
                    }
                }
            }
            b'"' => {
                let run = quote_run(src, i);
                let (body_start, end, ok) = scan_string(src, i);
                // the closing delimiter stays when terminated
                let close_len = match (ok, run >= 3) {
                    (false, _) => 0,
                    (true, true) => run,
                    (true, false) => 1,
                };
                let body_end = if ok { end - close_len } else { n };
                blank(&mut out, body_start, body_end);
                if !ok {
                    problems.push((DiagCode::UnterminatedString, i));
                }
                i = end;
            }
            b'\'' => {
                if let Some(end) = scan_char_literal(src, i) {
                    blank(&mut out, i + 1, end - 1);
                    i = end;
                } else {
                    i += 1;
                }
            }
            _ => i += 1,
        }
    }

    let text = String::from_utf8(out).expect("only whole literal/comment regions are blanked");
    Stripped { text, problems }
}

fn quote_run(src: &[u8], at: usize) -> usize {
    src[at..].iter().take_while(|&&b| b == b'"').count()
}

/// Scans a string literal whose opening quote is at `q`. Returns
/// `(first content byte, one past the literal, terminated)`.
fn scan_string(src: &[u8], q: usize) -> (usize, usize, bool) {
    let n = src.len();
    // Prefix characters (`@`, `$`, `$@`, `@$`) directly before the quote.
    let mut verbatim = false;
    let mut p = q;
    while p > 0 && matches!(src[p - 1], b'@' | b'$') {
        if src[p - 1] == b'@' {
            verbatim = true;
        }
        p -= 1;
    }

    let run = quote_run(src, q);
    if run >= 3 {
        // raw string literal: closes at the same number of quotes
        let start = q + run;
        let mut i = start;
        while i < n {
            if src[i] == b'"' {
                let r = quote_run(src, i);
                if r >= run {
                    return (start, i + run, true);
                }
                i += r;
            } else {
                i += 1;
            }
        }
        return (start, n, false);
    }

    let start = q + 1;
    let mut i = start;
    while i < n {
        match src[i] {
            b'\\' if !verbatim => i += 2,
            b'"' if verbatim && i + 1 < n && src[i + 1] == b'"' => i += 2,
            b'"' => return (start, i + 1, true),
            _ => i += 1,
        }
    }
    (start, n, false)
}

/// A character literal starting at `q`, returning one past its closing quote.
fn scan_char_literal(src: &[u8], q: usize) -> Option<usize> {
    let n = src.len();
    let mut i = q + 1;
    if i >= n || src[i] == b'\n' || src[i] == b'\'' {
        return None;
    }
    // an already-blanked literal: spaces up to the closing quote
    let spaces = src[i..].iter().take(11).take_while(|&&b| b == b' ').count();
    if spaces > 0 && i + spaces < n && src[i + spaces] == b'\'' {
        return Some(i + spaces + 1);
    }
    if src[i] == b'\\' {
        i += 2;
        // A, \x41 and friends
        while i < n && i < q + 12 && src[i] != b'\'' && src[i] != b'\n' {
            i += 1;
        }
    } else {
        // one UTF-8 scalar
        let width = match src[i] {
            b if b < 0x80 => 1,
            b if b >= 0xF0 => 4,
            b if b >= 0xE0 => 3,
            _ => 2,
        };
        i += width;
    }
    (i < n && src[i] == b'\'').then_some(i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn strip(s: &str) -> String {
        strip_noise(s).text
    }

    #[test]
    fn line_comment_blanked() {
        assert_eq!(strip("a.B(); // c.D()"), "a.B();         ");
    }

    #[test]
    fn string_contents_blanked() {
        let src = r#"var s = "x.Y()";"#;
        let out = strip(src);
        assert_eq!(out.len(), src.len());
        assert_eq!(out, r#"var s = "     ";"#);
    }

    #[test]
    fn clean_source_unchanged() {
        let src = "class A { void M() { b.C(1 / 2); } }";
        assert_eq!(strip(src), src);
    }

    #[test]
    fn block_comment_keeps_newlines() {
        assert_eq!(strip("a/* x\ny */b"), "a    \n    b");
    }

    #[test]
    fn escapes_and_verbatim() {
        assert_eq!(strip(r#"f("a\"b.C()") + g"#), r#"f("        ") + g"#);
        assert_eq!(strip(r#"@"a""b.C" + x.Y"#), r#"@"      " + x.Y"#);
        assert_eq!(strip(r#"$"{o.Id}" + o.Id"#), r#"$"      " + o.Id"#);
    }

    #[test]
    fn raw_string_literal() {
        let src = "var j = \"\"\"{\"a\": x.Y}\"\"\"; z.W();";
        let out = strip(src);
        assert_eq!(out.len(), src.len());
        assert!(out.ends_with("\"\"\"; z.W();"));
        assert!(!out.contains("x.Y"));
    }

    #[test]
    fn char_literals() {
        assert_eq!(strip("c == '.' && d == '\\n'"), "c == ' ' && d == '  '");
        assert_eq!(strip("x = '\"'; y.Z();"), "x = ' '; y.Z();");
    }

    #[test]
    fn comment_markers_inside_strings_are_not_comments() {
        assert_eq!(strip(r#"u = "http://x"; a.B();"#), r#"u = "        "; a.B();"#);
    }

    #[test]
    fn unterminated_regions_run_to_end() {
        let s = strip_noise("a.B(); /* open\nc.D();");
        assert_eq!(s.text, "a.B();        \n      ");
        assert_eq!(s.problems, vec![(DiagCode::UnterminatedComment, 7)]);
        let s = strip_noise("x = \"abc\ny.Z();");
        assert_eq!(s.problems, vec![(DiagCode::UnterminatedString, 4)]);
        assert!(!s.text.contains("y.Z"));
    }

    #[test]
    fn non_ascii_inside_literals() {
        let src = "s = \"héllo\"; // ünïcode\nt.U();";
        let out = strip(src);
        assert_eq!(out.len(), src.len());
        assert!(out.ends_with("\nt.U();"));
    }

    fn source_like() -> impl Strategy<Value = String> {
        let pieces = prop::sample::select(vec![
            "a", "b.C", "(", ")", ";", " ", "\n", "//", "/*", "*/", "\"", "\\", "'", "@", "$",
            "x", ".", "é", "{", "}", "\"\"\"", "''", "'\\''",
        ]);
        prop::collection::vec(pieces, 0..40).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn preserves_length_and_is_idempotent(src in source_like()) {
            let once = strip(&src);
            prop_assert_eq!(once.len(), src.len());
            prop_assert_eq!(strip(&once), once.clone());
            // every byte either survives or became a space
            for (a, b) in src.bytes().zip(once.bytes()) {
                prop_assert!(a == b || b == b' ');
            }
        }
    }
}
