use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use proptest::prelude::*;
use tiergraph_core::extract::{extract_file, strip_noise, ExtractOptions, FileModel};
use tiergraph_core::resolve::{
    bind_receiver, build_symbol_index, resolve_all, BindingSource, EdgeKind, Enclosing, TypeRef,
};
use tiergraph_core::{Config, DiagCode, LayerKind, Parallelism, ProjectConfig};

fn shop_configs() -> Vec<ProjectConfig> {
    let mk = |id: &str| {
        ProjectConfig::new(id, id)
            .with_layer("Shop.Web", LayerKind::UI)
            .with_layer("Shop.Business", LayerKind::Business)
            .with_layer("Shop.Data", LayerKind::Data)
            .with_layer("Shop.Services", LayerKind::WebService)
            .with_third_party("System")
            .with_third_party("Acme")
            .with_proxy_marker("SoapHttpClientProtocol")
    };
    vec![mk("Web"), mk("Biz"), mk("Data")]
}

fn model(project: &str, path: &str, src: &str) -> FileModel {
    extract_file(project, path, src, &ExtractOptions::default())
}

fn edges_from(models: &[FileModel], from: &str) -> Vec<(String, EdgeKind)> {
    let r = resolve_all(models, &shop_configs(), Parallelism::Sequential);
    r.edges
        .iter()
        .filter(|e| e.from == from)
        .map(|e| (e.to.clone(), e.kind))
        .collect()
}

const REPO: &str = "namespace Shop.Data { public class OrderRepository {
    public int Save(int id) { return id; }
    public int Save(string key) { return 0; }
    public int Count { get; set; }
} }";

#[test]
fn empty_model_list_gives_empty_index() {
    let ix = build_symbol_index(&[], &[]);
    assert_eq!(ix.class_count(), 0);
    assert!(ix.classes_by_name.is_empty() && ix.static_class_names.is_empty());
}

#[test]
fn one_class_three_methods() {
    let m = model("Biz", "A.cs", "namespace Shop.Business { class A { void X() {} void Y() {} int Z(int a) { return a; } } }");
    let ix = build_symbol_index(&[m], &shop_configs());
    assert_eq!(ix.class("Shop.Business.A").unwrap().model.methods.len(), 3);
    assert_eq!(ix.member_owner.len(), 3);
}

#[test]
fn field_binding_and_inter_layer_edge() {
    let svc = "using Shop.Data;\nnamespace Shop.Business { public class OrderService {
        private OrderRepository repo;
        public void Place() { repo.Save(1); }
    } }";
    let models = vec![model("Biz", "S.cs", svc), model("Data", "R.cs", REPO)];
    let ix = build_symbol_index(&models, &shop_configs());
    let owner = ix.class("Shop.Business.OrderService").unwrap();
    let m = &owner.model.methods[0];
    let enc = Enclosing {
        id: &m.id,
        parameters: &m.parameters,
        locals: &m.locals,
        call_sites: &m.call_sites,
        anonymous_offsets: &m.anonymous_offsets,
    };
    let b = bind_receiver(&m.call_sites[0], &enc, owner, &ix, &shop_configs()[1]);
    assert_eq!(b.binding_source, BindingSource::Field);
    assert_eq!(b.resolved_type, Some(TypeRef::Class("Shop.Data.OrderRepository".into())));

    let r = resolve_all(&models, &shop_configs(), Parallelism::Sequential);
    // the overload fixture: a one-argument site names both Save candidates
    let got: Vec<_> = r.edges.iter().map(|e| (e.to.as_str(), e.kind, e.from_layer, e.to_layer, e.crosses_project)).collect();
    assert_eq!(
        got,
        vec![
            ("Shop.Data.OrderRepository.Save(int)", EdgeKind::InterLayer, LayerKind::Business, LayerKind::Data, true),
            ("Shop.Data.OrderRepository.Save(string)", EdgeKind::InterLayer, LayerKind::Business, LayerKind::Data, true),
        ]
    );
}

#[test]
fn binding_order_and_sources() {
    let src = "using Shop.Data;\nusing System;\nnamespace Shop.Business {
      public static class MathUtil { public static decimal Round(decimal d) { return d; } }
      public class S {
        private OrderRepository repo;
        public void M(OrderRepository p) {
            MathUtil.Round(1m);
            var tmp = Make();
            tmp.Save(1);
            p.Save(2);
            OrderRepository repo = null;
            repo.Save(3);
            Console.WriteLine(1);
        }
      } }";
    let models = vec![model("Biz", "S.cs", src), model("Data", "R.cs", REPO)];
    let ix = build_symbol_index(&models, &shop_configs());
    assert!(ix.static_class_names.contains("MathUtil"));
    let owner = ix.class("Shop.Business.S").unwrap();
    let m = &owner.model.methods[0];
    let enc = Enclosing {
        id: &m.id,
        parameters: &m.parameters,
        locals: &m.locals,
        call_sites: &m.call_sites,
        anonymous_offsets: &m.anonymous_offsets,
    };
    let sources: Vec<_> = m
        .call_sites
        .iter()
        .map(|s| (s.receiver_token.as_str(), bind_receiver(s, &enc, owner, &ix, &shop_configs()[1]).binding_source))
        .collect();
    assert_eq!(
        sources,
        vec![
            ("MathUtil", BindingSource::StaticClass),
            ("tmp", BindingSource::Unresolved),
            ("p", BindingSource::Parameter),
            ("repo", BindingSource::LocalVar),
            ("Console", BindingSource::ExternalType),
        ]
    );
    let r = resolve_all(&models, &shop_configs(), Parallelism::Sequential);
    let kinds: BTreeSet<_> = r.edges.iter().filter(|e| e.from.ends_with(".M(OrderRepository)")).map(|e| e.kind).collect();
    assert!(kinds.contains(&EdgeKind::Static));
    assert!(kinds.contains(&EdgeKind::ThirdParty));
    assert!(kinds.contains(&EdgeKind::Unresolved));
    assert!(r.diagnostics.iter().any(|d| d.code == DiagCode::UnresolvedReceiver && d.member.as_deref() == Some("Save")));
}

#[test]
fn intra_layer_and_third_party_leaf() {
    let src = "using Acme.Logging;\nnamespace Shop.Business {
      public class A { private B b; private Logger log; public void M() { b.N(); log.Info(); } }
      public class B { public void N() { } } }";
    let got = edges_from(&[model("Biz", "A.cs", src)], "Shop.Business.A.M()");
    assert_eq!(
        got,
        vec![("Shop.Business.B.N()".to_string(), EdgeKind::IntraLayer), ("ext:Logger.Info".to_string(), EdgeKind::ThirdParty)]
    );
}

#[test]
fn inheritance_lookup_and_shadowing() {
    let src = "namespace Shop.Business {
      public class Base { public void Run() { } public void Only() { } }
      public class Child : Base { public void Run() { } }
      public class Grand : Child { }
      public class User { private Grand g; private Child c;
        public void M() { g.Run(); g.Only(); c.Run(); g.Missing(); } } }";
    let got = edges_from(&[model("Biz", "A.cs", src)], "Shop.Business.User.M()");
    let to: Vec<_> = got.iter().map(|(t, _)| t.as_str()).collect();
    assert_eq!(
        to,
        vec!["Shop.Business.Child.Run()", "Shop.Business.Base.Only()", "Shop.Business.Child.Run()", "unresolved:Grand.Missing"]
    );
}

#[test]
fn this_and_base_calls() {
    let src = "namespace Shop.Business {
      public class Base { protected void V() { } }
      public class C : Base { public void M() { this.V(); base.V(); this.W(); } void W() { } } }";
    let got = edges_from(&[model("Biz", "A.cs", src)], "Shop.Business.C.M()");
    let to: Vec<_> = got.iter().map(|(t, k)| (t.as_str(), *k)).collect();
    assert_eq!(
        to,
        vec![
            ("Shop.Business.Base.V()", EdgeKind::IntraLayer),
            ("Shop.Business.Base.V()", EdgeKind::IntraLayer),
            ("Shop.Business.C.W()", EdgeKind::IntraLayer),
        ]
    );
}

#[test]
fn interface_receivers_fan_out_to_implementers() {
    let src = "namespace Shop.Business {
      public class Mail : INotifier { public void Send() { } }
      public class Sms : INotifier { public void Send() { } }
      public class U { private INotifier n; public void M() { n.Send(); } } }";
    let got = edges_from(&[model("Biz", "A.cs", src)], "Shop.Business.U.M()");
    let to: Vec<_> = got.iter().map(|(t, _)| t.as_str()).collect();
    assert_eq!(to, vec!["Shop.Business.Mail.Send()", "Shop.Business.Sms.Send()"]);
}

#[test]
fn upward_and_proxy_edges() {
    let data = "using Shop.Business;\nnamespace Shop.Data { public class R { private Svc s; public void M() { s.Go(); } } }";
    let biz = "namespace Shop.Business { public class Svc { private Shop.Services.Client c; public void Go() { c.Call(); } } }";
    let proxy = "using System.Web.Services.Protocols;\nnamespace Shop.Services { public class Client : SoapHttpClientProtocol { public void Call() { this.Invoke(); } } }";
    let models = vec![model("Data", "R.cs", data), model("Biz", "S.cs", biz), model("Biz", "C.cs", proxy)];
    let r = resolve_all(&models, &shop_configs(), Parallelism::Sequential);
    let by_from: BTreeMap<_, _> = r.edges.iter().map(|e| (e.from.as_str(), (e.to.as_str(), e.kind, e.to_layer))).collect();
    assert_eq!(by_from["Shop.Data.R.M()"], ("Shop.Business.Svc.Go()", EdgeKind::InvertedLayer, LayerKind::Business));
    assert_eq!(by_from["Shop.Business.Svc.Go()"], ("Shop.Services.Client.Call()", EdgeKind::WebServiceProxy, LayerKind::WebService));
    assert_eq!(by_from["Shop.Services.Client.Call()"].1, EdgeKind::ThirdParty);
}

#[test]
fn partial_classes_merge_and_duplicates_are_reported() {
    let a = model("Biz", "A.cs", "namespace Shop.Business { public partial class P { void X() { } } public class D { } }");
    let b = model("Biz", "B.cs", "namespace Shop.Business { public partial class P { int Y { get; set; } } public class D { void Z() { } } }");
    let ix = build_symbol_index(&[a, b], &shop_configs());
    let p = ix.class("Shop.Business.P").unwrap();
    assert_eq!((p.model.methods.len(), p.model.properties.len()), (1, 1));
    assert_eq!(p.files, vec!["Biz/A.cs", "Biz/B.cs"]);
    // first-seen wins
    assert!(ix.class("Shop.Business.D").unwrap().model.methods.is_empty());
    assert_eq!(ix.diagnostics.len(), 1);
    assert_eq!(ix.diagnostics[0].code, DiagCode::DuplicateClass);
}

fn corpus_models() -> (Vec<FileModel>, Config) {
    let cfg = Config::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/shopdemo/tiergraph.toml")).unwrap();
    let mut models = Vec::new();
    for p in &cfg.projects {
        for e in walkdir::WalkDir::new(&p.root_path).sort_by_file_name() {
            let e = e.unwrap();
            if e.path().extension().is_some_and(|x| x == "cs") {
                let rel = e.path().strip_prefix(&p.root_path).unwrap().to_string_lossy().replace('\\', "/");
                let src = std::fs::read_to_string(e.path()).unwrap();
                models.push(extract_file(&p.project_id, &rel, &src, &ExtractOptions::for_project(p, &[])));
            }
        }
    }
    (models, cfg)
}

/// Independent count: `class` followed by a name in stripped text, skipping
/// `where T : class` constraints.
fn grep_class_keywords(src: &str) -> Vec<String> {
    let text = strip_noise(src).text;
    let words: Vec<&str> = text
        .split(|c: char| !(c.is_alphanumeric() || c == '_' || c == ':'))
        .filter(|w| !w.is_empty())
        .collect();
    words
        .windows(2)
        .filter(|w| w[0] == "class")
        .map(|w| w[1].to_string())
        .collect()
}

#[test]
fn corpus_class_count_matches_grep_oracle() {
    let (models, cfg) = corpus_models();
    let mut keywords = 0;
    let mut names = BTreeSet::new();
    for p in &cfg.projects {
        for e in walkdir::WalkDir::new(&p.root_path) {
            let e = e.unwrap();
            if e.path().extension().is_some_and(|x| x == "cs") {
                let found = grep_class_keywords(&std::fs::read_to_string(e.path()).unwrap());
                keywords += found.len();
                names.extend(found);
            }
        }
    }
    // frozen: 23 keywords, Order declared partially twice
    assert_eq!(keywords, 23);
    assert_eq!(names.len(), 22);
    let ix = build_symbol_index(&models, &cfg.projects);
    assert_eq!(ix.class_count(), 22);
    assert!(ix.diagnostics.is_empty());
}

#[test]
fn corpus_resolution_is_deterministic_across_modes() {
    let (models, cfg) = corpus_models();
    let a = resolve_all(&models, &cfg.projects, Parallelism::Sequential);
    let b = resolve_all(&models, &cfg.projects, Parallelism::default());
    let mut rev = models.clone();
    rev.reverse();
    let c = resolve_all(&rev, &cfg.projects, Parallelism::default());
    assert_eq!(a.edges, b.edges);
    assert_eq!(a.edges, c.edges);
    assert_eq!(a.diagnostics, b.diagnostics);
}

fn check_invariants(models: &[FileModel], configs: &[ProjectConfig]) -> Result<(), TestCaseError> {
    let r = resolve_all(models, configs, Parallelism::default());
    let mut kinds_by_site: BTreeMap<(String, String, usize), BTreeSet<EdgeKind>> = BTreeMap::new();
    for e in &r.edges {
        prop_assert!(r.index.member_owner.contains_key(&e.from), "from {}", e.from);
        let external = ["ext:", "anon:", "unresolved:"].iter().any(|p| e.to.starts_with(p));
        prop_assert!(external || r.index.member_owner.contains_key(&e.to), "to {}", e.to);
        match e.kind {
            EdgeKind::IntraLayer => prop_assert_eq!(e.from_layer, e.to_layer),
            EdgeKind::InterLayer => prop_assert!(
                e.to_layer == LayerKind::WebService
                    || matches!((e.from_layer.rank(), e.to_layer.rank()), (Some(a), Some(b)) if a > b)
            ),
            EdgeKind::ThirdParty | EdgeKind::AnonymousLeaf => {
                prop_assert!(!r.edges.iter().any(|o| o.from == e.to))
            }
            _ => {}
        }
        if e.kind != EdgeKind::AnonymousLeaf {
            kinds_by_site.entry((e.from.clone(), e.file.clone(), e.offset)).or_default().insert(e.kind);
        }
    }
    for kinds in kinds_by_site.values() {
        prop_assert_eq!(kinds.len(), 1);
    }
    Ok(())
}

/// Small layered code base: every class holds a field of a random other
/// class and calls a random member on it.
fn synthetic() -> impl Strategy<Value = Vec<FileModel>> {
    let layers = ["Shop.Web", "Shop.Business", "Shop.Data", "Shop.Services", "Other"];
    prop::collection::vec((0..layers.len(), 0usize..6, 0usize..3, any::<bool>()), 2..8).prop_map(move |specs| {
        let n = specs.len();
        specs
            .iter()
            .enumerate()
            .map(|(i, &(layer, target, member, invoke))| {
                let ns = layers[layer];
                let t = target % n;
                let (tns, _, _, _) = specs[t];
                let call = if invoke { format!("f.M{member}(1)") } else { format!("f.P{member}") };
                let src = format!(
                    "using System;\nusing {tns};\nnamespace {ns} {{ public class C{i} {{
                        private {tty} f;
                        public void M0(int a) {{ {call}; Console.Write(a); }}
                        public void M1(string a) {{ }}
                        public int M1(int a) {{ return a; }}
                        public int P0 {{ get; set; }}
                        public int P1 => f.P0;
                        public void L() {{ Items.ForEach(x => x.Go()); }}
                    }} }}",
                    tns = layers[tns],
                    tty = format!("C{t}"),
                );
                extract_file("P", &format!("C{i}.cs"), &src, &ExtractOptions::default())
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn edge_invariants_hold(models in synthetic()) {
        let cfg = ProjectConfig::new("P", ".")
            .with_layer("Shop.Web", LayerKind::UI)
            .with_layer("Shop.Business", LayerKind::Business)
            .with_layer("Shop.Data", LayerKind::Data)
            .with_layer("Shop.Services", LayerKind::WebService)
            .with_third_party("System");
        check_invariants(&models, &[cfg])?;
    }
}

#[test]
fn corpus_edges_satisfy_invariants() {
    let (models, cfg) = corpus_models();
    check_invariants(&models, &cfg.projects).unwrap();
}
