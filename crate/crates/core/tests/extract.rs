use std::path::Path;

use tiergraph_core::extract::{extract_file, strip_noise, ExtractOptions};

fn corpus_sources() -> Vec<(String, String)> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/shopdemo");
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(&root) {
        let entry = entry.unwrap();
        let p = entry.path();
        if p.extension().is_some_and(|e| e == "cs") {
            let rel = p.strip_prefix(&root).unwrap().to_string_lossy().replace('\\', "/");
            out.push((rel, std::fs::read_to_string(p).unwrap()));
        }
    }
    out.sort();
    out
}

fn is_word_byte(b: u8) -> bool {
    b == b'_' || b.is_ascii_alphanumeric()
}

/// Every `identifier . identifier` pair in `text[lo..hi]`, found by trying
/// each dot: `(receiver, member, receiver offset)`.
fn brute_force_pairs(text: &str, lo: usize, hi: usize) -> Vec<(String, String, usize)> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    for dot in lo..hi {
        if b[dot] != b'.' {
            continue;
        }
        let mut l = dot;
        if l > lo && b[l - 1] == b'?' {
            l -= 1;
        }
        while l > lo && b[l - 1].is_ascii_whitespace() {
            l -= 1;
        }
        let r_end = l;
        while l > lo && is_word_byte(b[l - 1]) {
            l -= 1;
        }
        let mut r = dot + 1;
        while r < hi && b[r].is_ascii_whitespace() {
            r += 1;
        }
        let m_start = r;
        while r < hi && is_word_byte(b[r]) {
            r += 1;
        }
        let recv = &text[l..r_end];
        let member = &text[m_start..r];
        let ident = |s: &str| s.as_bytes().first().is_some_and(|c| *c == b'_' || c.is_ascii_alphabetic());
        if ident(recv) && ident(member) {
            out.push((recv.to_string(), member.to_string(), l));
        }
    }
    out
}

#[test]
fn every_dot_pair_yields_exactly_one_call_site() {
    let mut checked = 0;
    for (path, src) in corpus_sources() {
        let model = extract_file("p", &path, &src, &ExtractOptions::default());
        let stripped = strip_noise(&src).text;
        for class in &model.classes {
            let bodies = class
                .methods
                .iter()
                .map(|m| (m.body_span, &m.call_sites, m.contains_anonymous))
                .chain(class.properties.iter().map(|p| (p.body_span, &p.call_sites, p.contains_anonymous)));
            for (span, sites, anon) in bodies {
                // lambda bodies are scoped out of the enclosing method
                let Some((lo, hi)) = span else { continue };
                if anon {
                    continue;
                }
                let mut expected = brute_force_pairs(&stripped, lo, hi);
                let mut got: Vec<_> = sites
                    .iter()
                    .map(|c| (c.receiver_token.clone(), c.member_token.clone(), c.char_offset))
                    .collect();
                expected.sort();
                got.sort();
                assert_eq!(got, expected, "{path} {lo}..{hi}");
                checked += 1;
            }
        }
    }
    assert!(checked > 40, "only {checked} bodies checked");
}

#[test]
fn call_site_offsets_index_the_original_file() {
    for (path, src) in corpus_sources() {
        let model = extract_file("p", &path, &src, &ExtractOptions::default());
        for class in &model.classes {
            for m in &class.methods {
                for c in &m.call_sites {
                    let at = &src[c.char_offset..c.char_offset + c.receiver_token.len()];
                    assert_eq!(at, c.receiver_token, "{path}");
                }
            }
        }
    }
}

#[test]
fn corpus_extracts_without_structural_diagnostics() {
    use tiergraph_core::DiagCode;
    for (path, src) in corpus_sources() {
        let model = extract_file("p", &path, &src, &ExtractOptions::default());
        for d in &model.diagnostics {
            assert!(
                matches!(d.code, DiagCode::ChainLinkSkipped | DiagCode::BareCallSkipped),
                "{path}: {d:?}"
            );
        }
    }
}

#[test]
fn malformed_input_never_panics() {
    let inputs = [
        "class",
        "namespace",
        "class A { void M( { a.B(; } ",
        "class A { int x = ; } }}}} {{{",
        "public class A : { }",
        "/* open",
        "\"open",
        "class A { void M() { a. } }",
        "class A { => ; = ; ( ) [ ] }",
    ];
    for src in inputs {
        let _ = extract_file("p", "x.cs", src, &ExtractOptions::default());
    }
}
