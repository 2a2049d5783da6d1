use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use chrono::{DateTime, TimeZone, Utc};
use proptest::prelude::*;
use tiergraph_core::store::{
    append_metrics, metrics_path, rebuild, sweep, MetricsEntry, MetricsSeries, NodeKind, Rebuilder, Scheduler,
    SnapshotStore, Tick,
};
use tiergraph_core::{Config, Error, Parallelism, ProjectConfig};

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/shopdemo")
}

fn copy_tree(from: &Path, to: &Path) {
    for entry in walkdir(from) {
        let rel = entry.strip_prefix(from).unwrap();
        let dest = to.join(rel);
        fs::create_dir_all(dest.parent().unwrap()).unwrap();
        fs::copy(&entry, &dest).unwrap();
    }
}

fn walkdir(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            if !p.file_name().unwrap().to_string_lossy().starts_with('.') {
                out.extend(walkdir(&p));
            }
        } else {
            out.push(p);
        }
    }
    out
}

/// A private copy of the bundled corpus with its own data directory.
fn scratch_corpus() -> (tempfile::TempDir, Config) {
    let dir = tempfile::tempdir().unwrap();
    copy_tree(&corpus_dir(), dir.path());
    let cfg = Config::load(&dir.path().join("tiergraph.toml")).unwrap();
    (dir, cfg)
}

fn day(d: u32) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2026, 3, d, 6, 0, 0).unwrap()
}

/// Count of `Name(` method declarations a simple line grep finds in a file.
fn grep_method_count(src: &str) -> usize {
    src.lines()
        .filter(|l| {
            let t = l.trim_start();
            t.starts_with("public ") || t.starts_with("private ") || t.starts_with("protected ") || t.starts_with("internal ")
        })
        .filter(|l| l.contains('(') && !l.contains(" class ") && !l.contains('=') && !l.trim_end().ends_with(';'))
        .count()
}

#[test]
fn empty_corpus_gives_empty_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::new(vec![ProjectConfig::new("p", dir.path())], dir.path().join("data"));
    let s = rebuild(&cfg).unwrap();
    assert!(s.nodes.is_empty() && s.edges.is_empty());
    assert_eq!(s.per_project_counts["p"].graph_size(), 0);
}

#[test]
fn missing_root_aborts_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = Config::new(vec![ProjectConfig::new("p", dir.path().join("gone"))], dir.path());
    assert!(matches!(rebuild(&cfg), Err(Error::Config { .. })));
}

#[test]
fn bundled_corpus_rebuilds_deterministically() {
    let cfg = Config::load(&corpus_dir().join("tiergraph.toml")).unwrap();
    let a = Rebuilder::new(Parallelism::Sequential).rebuild_at(&cfg, day(1)).unwrap();
    let b = Rebuilder::new(Parallelism::Parallel).rebuild_at(&cfg, day(2)).unwrap();
    assert!(a.content_eq(&b));
    assert_ne!(a.snapshot_id, b.snapshot_id);
    a.check_integrity().unwrap();
    assert_eq!(a.per_project_counts.len(), 3);
    for n in &a.nodes {
        if n.kind == NodeKind::Method {
            assert!(n.id.contains('('), "{}", n.id);
        }
    }
}

#[test]
fn function_counts_match_method_nodes_and_grep_oracle() {
    let cfg = Config::load(&corpus_dir().join("tiergraph.toml")).unwrap();
    let s = Rebuilder::default().rebuild_at(&cfg, day(1)).unwrap();
    for (project, counts) in &s.per_project_counts {
        let nodes = s
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Method && n.project.as_deref() == Some(project.as_str()))
            .count();
        assert_eq!(counts.function_count, nodes);
        let root = cfg.project(project).unwrap().root_path.clone();
        let grep: usize = walkdir(&root)
            .iter()
            .filter(|p| p.extension().is_some_and(|e| e == "cs"))
            .map(|p| grep_method_count(&fs::read_to_string(p).unwrap()))
            .sum();
        assert_eq!(counts.function_count, grep, "{project}");
    }
    let series = append_metrics(&s, &MetricsSeries::default());
    for e in &series.entries {
        assert_eq!(e.function_count, s.per_project_counts[&e.project].function_count);
    }
}

#[test]
fn persist_load_round_trip_and_listing() {
    let (_dir, cfg) = scratch_corpus();
    let s = Rebuilder::default().rebuild_at(&cfg, day(1)).unwrap();
    let store = SnapshotStore::new(&cfg.data_dir);
    assert!(store.list().unwrap().is_empty());
    store.persist(&s).unwrap();
    assert_eq!(store.load(&s.snapshot_id).unwrap(), s);
    let t = Rebuilder::default().rebuild_at(&cfg, day(2)).unwrap();
    store.persist(&t).unwrap();
    assert_eq!(store.list().unwrap(), vec![s.snapshot_id.clone(), t.snapshot_id.clone()]);
    assert_eq!(store.load_latest().unwrap().snapshot_id, t.snapshot_id);
    assert_eq!(store.prune(1).unwrap(), vec![s.snapshot_id.clone()]);
    assert_eq!(store.list().unwrap(), vec![t.snapshot_id]);
}

#[test]
fn unknown_id_is_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let store = SnapshotStore::new(dir.path());
    assert!(matches!(store.load("20260101T000000.000Z-abc"), Err(Error::NotFound(_))));
    assert!(matches!(store.load_latest(), Err(Error::NotFound(_))));
    assert!(matches!(store.load("../x"), Err(Error::Validation(_))));
}

#[test]
fn truncated_or_edited_store_file_is_an_integrity_error() {
    let (_dir, cfg) = scratch_corpus();
    let s = Rebuilder::default().rebuild_at(&cfg, day(1)).unwrap();
    let store = SnapshotStore::new(&cfg.data_dir);
    let path = store.persist(&s).unwrap();
    let bytes = fs::read(&path).unwrap();

    fs::write(&path, &bytes[..bytes.len() - 40]).unwrap();
    assert!(matches!(store.load(&s.snapshot_id), Err(Error::Integrity { .. })));

    let mut edited = bytes.clone();
    let at = edited.len() / 2;
    edited[at] = if edited[at] == b'a' { b'b' } else { b'a' };
    fs::write(&path, &edited).unwrap();
    assert!(matches!(store.load(&s.snapshot_id), Err(Error::Integrity { .. })));

    fs::write(&path, b"").unwrap();
    assert!(matches!(store.load(&s.snapshot_id), Err(Error::Integrity { .. })));
}

#[test]
fn dangling_edge_is_refused_on_persist() {
    let (_dir, cfg) = scratch_corpus();
    let mut s = Rebuilder::default().rebuild_at(&cfg, day(1)).unwrap();
    s.edges[0].to = "Nowhere.Missing()".into();
    let store = SnapshotStore::new(&cfg.data_dir);
    assert!(matches!(store.persist(&s), Err(Error::Integrity { .. })));
    assert!(store.list().unwrap().is_empty());
}

#[test]
fn deleting_a_class_file_lowers_function_count() {
    let (dir, cfg) = scratch_corpus();
    let before = rebuild(&cfg).unwrap();
    let victim = dir.path().join("Shop.Business/Services/ShippingService.cs");
    let removed = grep_method_count(&fs::read_to_string(&victim).unwrap());
    assert!(removed > 0);
    fs::remove_file(victim).unwrap();
    let after = rebuild(&cfg).unwrap();
    let b = before.per_project_counts["Shop.Business"].function_count;
    let a = after.per_project_counts["Shop.Business"].function_count;
    assert_eq!(a, b - removed);
}

const ADDED: &str = "namespace Shop.Business.Services
{
    public class AuditService
    {
        public void Record(string what) { System.Console.WriteLine(what); }
        public void Flush() { }
        public int Pending(int since) { return since; }
    }
}
";

#[test]
fn metrics_follow_a_scripted_mutation() {
    let (dir, cfg) = scratch_corpus();
    let mut r = Rebuilder::new(Parallelism::Parallel);
    let s1 = sweep(&cfg, &mut r, day(1)).unwrap();
    fs::write(dir.path().join("Shop.Business/Services/AuditService.cs"), ADDED).unwrap();
    let s2 = sweep(&cfg, &mut r, day(2)).unwrap();
    assert!(r.last_cache_hits() > 0);
    fs::remove_file(dir.path().join("Shop.Business/Services/ShippingService.cs")).unwrap();
    let s3 = sweep(&cfg, &mut r, day(3)).unwrap();

    let series = MetricsSeries::load(&metrics_path(&cfg.data_dir)).unwrap();
    assert_eq!(series.entries.len(), 9);
    let biz: Vec<&MetricsEntry> = series.project("Shop.Business").collect();
    assert_eq!(biz[1].function_count, biz[0].function_count + 3);
    assert!(biz[2].function_count < biz[1].function_count);
    assert!(biz[1].graph_size > biz[0].graph_size);
    // untouched projects stay flat
    let data: Vec<usize> = series.project("Shop.Data").map(|e| e.function_count).collect();
    assert_eq!(data[0], data[1]);
    assert_eq!(SnapshotStore::new(&cfg.data_dir).list().unwrap().len(), 3);
    for s in [s1, s2, s3] {
        assert!(s.check_integrity().is_ok());
    }
}

#[test]
fn incremental_rebuild_equals_full_rebuild() {
    let (dir, cfg) = scratch_corpus();
    let mut inc = Rebuilder::new(Parallelism::Parallel);
    inc.rebuild_at(&cfg, day(1)).unwrap();
    let edits: [(&str, Option<&str>); 3] = [
        ("Shop.Business/Services/AuditService.cs", Some(ADDED)),
        ("Shop.Data/DbHelper.cs", None),
        ("Shop.Web/Controllers/CatalogController.cs", Some("namespace Shop.Web.Controllers { public class CatalogController { public void Index() { } } }")),
    ];
    for (path, content) in edits {
        let p = dir.path().join(path);
        match content {
            Some(c) => fs::write(p, c).unwrap(),
            None => fs::remove_file(p).unwrap(),
        }
        let a = inc.rebuild_at(&cfg, day(2)).unwrap();
        let b = Rebuilder::new(Parallelism::Sequential).rebuild_at(&cfg, day(2)).unwrap();
        assert_eq!(a, b, "after editing {path}");
    }
}

#[test]
fn metrics_append_is_idempotent_per_day() {
    let cfg = Config::load(&corpus_dir().join("tiergraph.toml")).unwrap();
    let s = Rebuilder::default().rebuild_at(&cfg, day(1)).unwrap();
    let once = append_metrics(&s, &MetricsSeries::default());
    assert_eq!(once.entries.len(), 3);
    assert_eq!(append_metrics(&s, &once), once);
    let later = Rebuilder::default().rebuild_at(&cfg, day(1) + chrono::Duration::hours(5)).unwrap();
    assert_eq!(append_metrics(&later, &once), once);
}

fn entry() -> impl Strategy<Value = MetricsEntry> {
    (0u32..400, "[A-Za-z.]{1,12}", 0usize..10_000, 0usize..5_000).prop_map(|(d, project, graph_size, function_count)| {
        MetricsEntry {
            date: chrono::NaiveDate::from_ymd_opt(2025, 1, 1).unwrap() + chrono::Days::new(d as u64),
            project,
            graph_size,
            function_count,
        }
    })
}

proptest! {
    #[test]
    fn metrics_csv_round_trips(mut entries in prop::collection::vec(entry(), 0..30)) {
        entries.sort();
        entries.dedup_by(|a, b| a.date == b.date && a.project == b.project);
        let series = MetricsSeries { entries };
        let csv = series.to_csv().unwrap();
        prop_assert!(csv.starts_with(b"date,project,graph_size,function_count\n"));
        prop_assert_eq!(MetricsSeries::from_csv(&csv).unwrap(), series);
    }
}

#[test]
fn scheduler_skips_overlapping_ticks_and_survives_failures() {
    let started = Arc::new(AtomicUsize::new(0));
    let gate = Arc::new(AtomicBool::new(false));
    let (s2, g2) = (Arc::clone(&started), Arc::clone(&gate));
    let mut sched = Scheduler::new(move || {
        let n = s2.fetch_add(1, Ordering::SeqCst);
        while !g2.load(Ordering::SeqCst) {
            std::thread::sleep(Duration::from_millis(2));
        }
        if n == 0 {
            Err(Error::Validation("boom".into()))
        } else {
            Ok(())
        }
    });
    assert_eq!(sched.tick(), Tick::Started);
    assert_eq!(sched.tick(), Tick::Skipped);
    assert_eq!(sched.tick(), Tick::Skipped);
    gate.store(true, Ordering::SeqCst);
    sched.join();
    assert_eq!((sched.runs(), sched.failures()), (1, 1));
    assert_eq!(sched.tick(), Tick::Started);
    sched.join();
    assert_eq!((started.load(Ordering::SeqCst), sched.runs(), sched.failures()), (2, 2, 1));
}

#[test]
fn scheduled_sweeps_produce_content_equal_snapshots() {
    let (_dir, cfg) = scratch_corpus();
    let stop = Arc::new(AtomicBool::new(false));
    let stopper = Arc::clone(&stop);
    let data = cfg.data_dir.clone();
    let watcher = std::thread::spawn(move || {
        let store = SnapshotStore::new(&data);
        while store.list().unwrap().len() < 2 {
            std::thread::sleep(Duration::from_millis(10));
        }
        stopper.store(true, Ordering::SeqCst);
    });
    let mut sched = Scheduler::for_sweeps(cfg.clone(), Parallelism::Parallel);
    sched.run(Duration::from_millis(20), &stop).unwrap();
    watcher.join().unwrap();
    let store = SnapshotStore::new(&cfg.data_dir);
    let ids = store.list().unwrap();
    assert!(ids.len() >= 2);
    let a = store.load(&ids[0]).unwrap();
    let b = store.load(&ids[1]).unwrap();
    assert!(a.content_eq(&b));
    assert!(sched.run(Duration::ZERO, &stop).is_err());
}
