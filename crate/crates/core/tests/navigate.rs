use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use tiergraph_core::extract::{extract_file, ExtractOptions};
use tiergraph_core::navigate::{
    export_graph, generate_call_graph, graph_from_json, search, search_with, CallGraph, CorpusText, GraphFormat,
    GraphOptions, SearchOptions, StopReason,
};
use tiergraph_core::resolve::resolve_all;
use tiergraph_core::store::{GraphSnapshot, Rebuilder};
use tiergraph_core::{Config, Error, FileCategory, LayerKind, Parallelism, ProjectConfig};

fn layered(id: &str) -> ProjectConfig {
    ProjectConfig::new(id, id)
        .with_layer("App.Ui", LayerKind::UI)
        .with_layer("App.Biz", LayerKind::Business)
        .with_layer("App.Data", LayerKind::Data)
        .with_third_party("System")
}

/// Snapshot over in-memory sources, all in project `p`.
fn snapshot_of(sources: &[(&str, String)]) -> GraphSnapshot {
    let opts = ExtractOptions::default();
    let models: Vec<_> = sources.iter().map(|(path, src)| extract_file("p", path, src, &opts)).collect();
    let configs = vec![layered("p")];
    let r = resolve_all(&models, &configs, Parallelism::Sequential);
    GraphSnapshot::assemble(Vec::new(), &r, Vec::new(), &configs, Utc.timestamp_opt(0, 0).unwrap())
}

fn check_shape(g: &CallGraph) {
    assert_eq!(g.edges.len() + 1, g.nodes.len(), "tree property");
    let ids: BTreeSet<&str> = g.nodes.iter().map(|n| n.id.as_str()).collect();
    assert_eq!(ids.len(), g.nodes.len());
    let mut parents = BTreeSet::new();
    for e in &g.edges {
        assert!(ids.contains(e.from.as_str()) && ids.contains(e.to.as_str()));
        assert!(parents.insert(e.to.as_str()), "{} has two parents", e.to);
        assert_ne!(e.to, g.root);
    }
    for n in &g.nodes {
        let has_children = g.edges.iter().any(|e| e.from == n.id);
        if !has_children {
            assert!(g.stop_reasons.contains_key(&n.id), "leaf {} has no stop reason", n.id);
        }
        if g.stop_reasons.get(&n.id) == Some(&StopReason::DataLayerReached) {
            assert!(!has_children);
        }
    }
}

/// A ring of `n` classes whose `Run` calls the next one.
fn ring(n: usize) -> GraphSnapshot {
    let sources: Vec<(String, String)> = (0..n)
        .map(|i| {
            let src = format!(
                "namespace App.Biz {{ public class C{i} {{ public static void Run() {{ C{}.Run(); }} }} }}",
                (i + 1) % n
            );
            (format!("C{i}.cs"), src)
        })
        .collect();
    let refs: Vec<(&str, String)> = sources.iter().map(|(p, s)| (p.as_str(), s.clone())).collect();
    snapshot_of(&refs)
}

#[test]
fn empty_body_entry_is_a_single_node() {
    let s = snapshot_of(&[("A.cs", "namespace App.Biz { class A { public void Idle() { } } }".into())]);
    let g = generate_call_graph("App.Biz.A.Idle()", &s, GraphOptions::default()).unwrap();
    assert_eq!(g.nodes.len(), 1);
    assert_eq!(g.stop_reasons["App.Biz.A.Idle()"], StopReason::NoMatches);
    let dot = String::from_utf8(export_graph(&g, GraphFormat::Dot).unwrap()).unwrap();
    assert_eq!(dot.matches("[label=").count(), 1);
    assert_eq!(dot.matches("->").count(), 0);
}

#[test]
fn unknown_entry_is_not_found() {
    let s = ring(2);
    assert!(matches!(
        generate_call_graph("App.Biz.Nope()", &s, GraphOptions::default()),
        Err(Error::NotFound(_))
    ));
}

#[test]
fn mutual_recursion_has_one_back_edge() {
    let s = ring(2);
    let g = generate_call_graph("App.Biz.C0.Run()", &s, GraphOptions::default()).unwrap();
    assert_eq!(g.nodes.len(), 2);
    assert_eq!(g.edges.len(), 1);
    assert_eq!(g.back_edges.len(), 1);
    assert_eq!((g.back_edges[0].from.as_str(), g.back_edges[0].to.as_str()), ("App.Biz.C1.Run()", "App.Biz.C0.Run()"));
    check_shape(&g);
    let dot = String::from_utf8(export_graph(&g, GraphFormat::Dot).unwrap()).unwrap();
    assert!(dot.contains("style=dashed"));
}

#[test]
fn cycles_of_length_one_two_five_terminate() {
    for n in [1, 2, 5] {
        let s = ring(n);
        let g = generate_call_graph("App.Biz.C0.Run()", &s, GraphOptions::default()).unwrap();
        assert_eq!(g.nodes.len(), n, "ring {n}");
        assert_eq!(g.back_edges.len(), 1);
        check_shape(&g);
    }
}

#[test]
fn depth_cap_is_a_visible_stop() {
    let s = ring(5);
    let g = generate_call_graph("App.Biz.C0.Run()", &s, GraphOptions { max_depth: 2 }).unwrap();
    assert_eq!(g.nodes.len(), 3);
    assert_eq!(g.stop_reasons["App.Biz.C2.Run()"], StopReason::DepthCap);
    check_shape(&g);
}

#[test]
fn data_layer_is_included_not_expanded() {
    let s = snapshot_of(&[
        ("U.cs", "namespace App.Ui { class U { App.Biz.B b; void Go() { b.Work(); } } }".into()),
        ("B.cs", "namespace App.Biz { public class B { App.Data.D d; public void Work() { d.Load(); System.Console.WriteLine(1); } } }".into()),
        ("D.cs", "namespace App.Data { public class D { App.Data.E e; public void Load() { e.Deeper(); } } public class E { public void Deeper() {} } }".into()),
    ]);
    let g = generate_call_graph("App.Ui.U.Go()", &s, GraphOptions::default()).unwrap();
    check_shape(&g);
    assert_eq!(g.stop_reasons["App.Data.D.Load()"], StopReason::DataLayerReached);
    assert!(g.node("App.Data.E.Deeper()").is_none());
    assert_eq!(g.stop_reasons["ext:System.Console.WriteLine"], StopReason::ThirdPartyLeaf);
    // children follow source order
    let kids: Vec<&str> = g.edges.iter().filter(|e| e.from == "App.Biz.B.Work()").map(|e| e.to.as_str()).collect();
    assert_eq!(kids, ["App.Data.D.Load()", "ext:System.Console.WriteLine"]);
    // a data-layer entry still expands itself
    let d = generate_call_graph("App.Data.D.Load", &s, GraphOptions::default()).unwrap();
    assert_eq!(d.nodes.len(), 2);
}

#[test]
fn json_round_trip_and_bad_format() {
    let s = ring(5);
    let g = generate_call_graph("App.Biz.C0.Run()", &s, GraphOptions::default()).unwrap();
    let bytes = export_graph(&g, GraphFormat::Json).unwrap();
    assert_eq!(graph_from_json(&bytes).unwrap(), g);
    assert_eq!(export_graph(&g, GraphFormat::Json).unwrap(), bytes);
    assert!(matches!("svg".parse::<GraphFormat>(), Err(Error::Validation(_))));
}

fn corpus() -> (Config, GraphSnapshot, CorpusText) {
    let cfg = Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/shopdemo/tiergraph.toml")).unwrap();
    let snap = Rebuilder::default().rebuild(&cfg).unwrap();
    let text = CorpusText::load(&cfg.projects, Parallelism::Parallel).unwrap();
    (cfg, snap, text)
}

fn truth_nodes(name: &str) -> BTreeSet<String> {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/truth/shopdemo").join(name);
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.contains(':'))
        .map(str::to_string)
        .collect()
}

#[test]
fn submit_order_graph_covers_the_manual_trace() {
    let (_, snap, _) = corpus();
    let g = generate_call_graph("Shop.Web.Controllers.OrderController.SubmitOrder", &snap, GraphOptions::default()).unwrap();
    check_shape(&g);
    let truth = truth_nodes("submit_order.truth");
    let found = g.member_names();
    let missing: Vec<_> = truth.difference(&found).collect();
    assert!(missing.is_empty(), "missing {missing:?}");
    for n in &g.nodes {
        if n.layer == LayerKind::Data {
            assert_eq!(g.stop_reasons[&n.id], StopReason::DataLayerReached);
        }
    }
}

#[test]
fn search_partitions_hits_by_category() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("Counter.cs"), "namespace App.Biz { class Counter { public int GetCount() { return 0; } } }").unwrap();
    fs::write(dir.path().join("Strings.resx"), "<data name=\"GetCount\">count</data>").unwrap();
    fs::write(dir.path().join("Other.cs"), "namespace App.Biz { class Other { } }").unwrap();
    let cfg = Config::new(vec![layered("p").clone_with_root(dir.path())], dir.path().join(".data"));
    let snap = Rebuilder::default().rebuild(&cfg).unwrap();
    let text = CorpusText::load(&cfg.projects, Parallelism::Sequential).unwrap();

    let r = search("GetCount", &text, &snap, SearchOptions::default()).unwrap();
    assert_eq!(r.code_hits.len(), 1);
    assert_eq!(r.noncode_hits.len(), 1);
    assert_eq!(r.code_hits[0].file.path, "Counter.cs");
    assert_eq!(r.noncode_hits[0].file.category, FileCategory::NonCode);
    assert_eq!(r.entry_candidates, ["App.Biz.Counter.GetCount()"]);

    assert!(search("NotThere", &text, &snap, SearchOptions::default()).unwrap().is_empty());
    assert!(search("getcount", &text, &snap, SearchOptions::default()).unwrap().is_empty());
    let ci = search("getcount", &text, &snap, SearchOptions { case_insensitive: true }).unwrap();
    assert_eq!((ci.code_hits.len(), ci.noncode_hits.len(), ci.entry_candidates.len()), (1, 1, 1));
    assert!(matches!(search("", &text, &snap, SearchOptions::default()), Err(Error::Validation(_))));
}

trait WithRoot {
    fn clone_with_root(&self, root: &Path) -> ProjectConfig;
}

impl WithRoot for ProjectConfig {
    fn clone_with_root(&self, root: &Path) -> ProjectConfig {
        let mut c = self.clone();
        c.root_path = root.to_path_buf();
        c
    }
}

/// Non-overlapping occurrences, scanning byte by byte.
fn naive_offsets(hay: &[u8], needle: &[u8]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i + needle.len() <= hay.len() {
        if &hay[i..i + needle.len()] == needle {
            out.push(i);
            i += needle.len();
        } else {
            i += 1;
        }
    }
    out
}

fn corpus_tokens(text: &CorpusText) -> Vec<String> {
    let mut set = BTreeSet::new();
    for (_, bytes) in &text.files {
        for tok in String::from_utf8_lossy(bytes).split(|c: char| !c.is_alphanumeric() && c != '_') {
            if tok.len() >= 2 {
                set.insert(tok.to_string());
            }
        }
    }
    set.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn search_matches_brute_force_scan(pick in any::<prop::sample::Index>(), cut in any::<prop::sample::Index>(), ci in any::<bool>()) {
        use std::sync::OnceLock;
        static CORPUS: OnceLock<(GraphSnapshot, CorpusText, Vec<String>)> = OnceLock::new();
        let (snap, text, tokens) = CORPUS.get_or_init(|| {
            let (_, s, t) = corpus();
            let tokens = corpus_tokens(&t);
            (s, t, tokens)
        });
        let tok = pick.get(tokens);
        // a token or one of its prefixes
        let keyword = &tok[..tok.len() - cut.index(tok.len() / 2 + 1)];
        let opts = SearchOptions { case_insensitive: ci };
        let r = search_with(keyword, text, snap, opts, Parallelism::Parallel).unwrap();
        let fold = |b: &[u8]| if ci { b.to_ascii_lowercase() } else { b.to_vec() };
        let mut code = Vec::new();
        let mut noncode = Vec::new();
        for (rec, bytes) in &text.files {
            let offs = naive_offsets(&fold(bytes), &fold(keyword.as_bytes()));
            if offs.is_empty() { continue; }
            let key = (rec.key(), offs);
            match rec.category {
                FileCategory::CodeBehind => code.push(key),
                FileCategory::NonCode => noncode.push(key),
            }
        }
        let got = |hits: &[tiergraph_core::navigate::FileHit]| hits.iter().map(|h| (h.file.key(), h.offsets.clone())).collect::<Vec<_>>();
        prop_assert_eq!(got(&r.code_hits), code);
        prop_assert_eq!(got(&r.noncode_hits), noncode);
        prop_assert!(!r.code_hits.is_empty() || !r.noncode_hits.is_empty());
    }

    #[test]
    fn random_call_graphs_are_trees(
        calls in prop::collection::vec(prop::collection::vec(0usize..8, 0..4), 8),
        layers in prop::collection::vec(0usize..3, 8),
        max_depth in 1usize..10,
        entry in 0usize..8,
    ) {
        let ns = ["App.Ui", "App.Biz", "App.Data"];
        let sources: Vec<(String, String)> = (0..8).map(|i| {
            let body: String = calls[i].iter().map(|j| format!("{}.K{j}.Run(); ", ns[layers[*j]])).collect();
            (format!("K{i}.cs"), format!("namespace {} {{ public class K{i} {{ public static void Run() {{ {body}}} }} }}", ns[layers[i]]))
        }).collect();
        let refs: Vec<(&str, String)> = sources.iter().map(|(p, s)| (p.as_str(), s.clone())).collect();
        let s = snapshot_of(&refs);
        let id = format!("{}.K{entry}.Run()", ns[layers[entry]]);
        let g = generate_call_graph(&id, &s, GraphOptions { max_depth }).unwrap();
        check_shape(&g);
        prop_assert!(g.nodes.iter().all(|n| n.depth <= max_depth));
        prop_assert_eq!(graph_from_json(&export_graph(&g, GraphFormat::Json).unwrap()).unwrap(), g);
    }
}
