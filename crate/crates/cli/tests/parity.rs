use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use tiergraph_service::{router, AppState, RouterOptions};
use tower::ServiceExt;

fn copy_tree(from: &Path, to: &Path) {
    for e in fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        let dest = to.join(p.file_name().unwrap());
        if p.is_dir() {
            fs::create_dir_all(&dest).unwrap();
            copy_tree(&p, &dest);
        } else {
            fs::copy(&p, &dest).unwrap();
        }
    }
}

fn tiergraph(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiergraph"))
        .arg("--config")
        .arg(dir.join("tiergraph.toml"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .unwrap()
}

fn ok(o: Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

async fn http(app: &axum::Router, uri: &str) -> (StatusCode, String) {
    let resp = app.clone().oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
    let status = resp.status();
    let body = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, String::from_utf8(body.to_vec()).unwrap())
}

fn scratch() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_tree(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/shopdemo"), dir.path());
    dir
}

#[tokio::test]
async fn cli_and_api_agree_byte_for_byte() {
    let dir = scratch();
    let d = dir.path();
    ok(tiergraph(d, &["sweep", "--once"]));
    let cfg = tiergraph_core::Config::load(&d.join("tiergraph.toml")).unwrap();
    let state = Arc::new(AppState::new(cfg));
    state.reload().unwrap();
    let app = router(state, RouterOptions::default());

    let pairs: [(&[&str], &str); 6] = [
        (&["search", "GetCount"], "/api/search?q=GetCount"),
        (&["search", "save", "--ci"], "/api/search?q=save&ci=true"),
        (&["search", "zzz_nomatch"], "/api/search?q=zzz_nomatch"),
        (
            &["graph", "--entry", "Shop.Web.Controllers.OrderController.SubmitOrder", "--format", "json"],
            "/api/graph?entry=Shop.Web.Controllers.OrderController.SubmitOrder",
        ),
        (&["metrics", "export"], "/api/metrics/daily"),
        (&["snapshot"], "/api/snapshot"),
    ];
    for (args, uri) in pairs {
        let cli = ok(tiergraph(d, args));
        let (status, body) = http(&app, uri).await;
        assert_eq!(status, StatusCode::OK, "{uri}");
        assert_eq!(cli, body, "{args:?} vs {uri}");
    }
}

#[test]
fn sweep_once_persists_exactly_one_snapshot() {
    let dir = scratch();
    let d = dir.path();
    assert_eq!(ok(tiergraph(d, &["snapshots", "list"])), "");
    ok(tiergraph(d, &["sweep", "--once"]));
    let list = ok(tiergraph(d, &["snapshots", "list"]));
    assert_eq!(list.lines().count(), 1);
    ok(tiergraph(d, &["sweep"]));
    assert_eq!(ok(tiergraph(d, &["snapshots", "list"])).lines().count(), 2);
    let removed = ok(tiergraph(d, &["prune", "--keep", "1"]));
    assert_eq!(removed, format!("removed {}", list));
    assert_eq!(ok(tiergraph(d, &["snapshots", "list"])).lines().count(), 1);
}

#[test]
fn exports_and_errors() {
    let dir = scratch();
    let d = dir.path();
    ok(tiergraph(d, &["sweep", "--once"]));

    let csv = d.join("out/metrics.csv");
    ok(tiergraph(d, &["metrics", "export", "--csv", csv.to_str().unwrap()]));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("date,project,graph_size,function_count\n"));
    assert_eq!(text.lines().count(), 4);

    let dot = ok(tiergraph(d, &["graph", "--entry", "Shop.Business.Util.MathUtil.Round", "--format", "dot"]));
    assert!(dot.starts_with("digraph"));

    let suite = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/truth/shopdemo");
    let bench_csv = d.join("bench.csv");
    let report = ok(tiergraph(d, &["bench", "--suite", suite.to_str().unwrap(), "--csv", bench_csv.to_str().unwrap()]));
    assert!(report.contains("\"aggregate_accuracy\":0.84"));
    assert_eq!(fs::read_to_string(&bench_csv).unwrap().lines().count(), 5);

    let model = ok(tiergraph(d, &["extract", d.join("Shop.Data/DbHelper.cs").to_str().unwrap()]));
    assert!(model.contains("\"classes\""));

    for bad in [
        vec!["graph", "--entry", "Shop.Nope.Run"],
        vec!["graph", "--entry", "Shop.Business.Util.MathUtil.Round", "--format", "svg"],
        vec!["graph", "--entry", "Shop.Business.Util.MathUtil.Round", "--max-depth", "0"],
        vec!["search", ""],
        vec!["snapshot", "--id", "missing"],
    ] {
        let o = tiergraph(d, &bad);
        assert!(!o.status.success(), "{bad:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{bad:?}");
    }
}

#[test]
fn missing_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tiergraph"))
        .current_dir(dir.path())
        .env_remove("TIERGRAPH_CONFIG")
        .args(["snapshots", "list"])
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("no config file"));
}
