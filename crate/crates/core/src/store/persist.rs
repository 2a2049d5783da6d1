//! One JSON-lines file per snapshot under `<data_dir>/snapshots/`.
//!
//! Line 1 is a header carrying the format version, the record count and the
//! SHA-256 of every byte after the header line. Each following line is one
//! tagged record: `file`, `node`, `edge`, `diag`, then a closing `summary`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::snapshot::{GraphSnapshot, Node, ProjectCounts};
use crate::corpus::FileRecord;
use crate::diag::Diagnostic;
use crate::resolve::ResolvedEdge;
use crate::{Error, Result};

pub const FORMAT: &str = "tiergraph-snapshot";
pub const FORMAT_VERSION: u32 = 1;
const EXTENSION: &str = "jsonl";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    snapshot_id: String,
    created_at: DateTime<Utc>,
    corpus_hash: String,
    records: usize,
    sha256: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Record {
    File(FileRecord),
    Node(Node),
    Edge(ResolvedEdge),
    Diag(Diagnostic),
    Summary {
        per_project_counts: BTreeMap<String, ProjectCounts>,
        diagnostics_summary: BTreeMap<String, usize>,
    },
}

/// Snapshot directory handle. Readers may run concurrently with a writer:
/// files appear atomically via rename.
#[derive(Clone, Debug)]
pub struct SnapshotStore {
    dir: PathBuf,
}

impl SnapshotStore {
    pub fn new(data_dir: impl AsRef<Path>) -> Self {
        SnapshotStore {
            dir: data_dir.as_ref().join("snapshots"),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, snapshot_id: &str) -> PathBuf {
        self.dir.join(format!("{snapshot_id}.{EXTENSION}"))
    }

    pub fn persist(&self, snapshot: &GraphSnapshot) -> Result<PathBuf> {
        snapshot.check_integrity()?;
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let bytes = encode(snapshot)?;
        let path = self.path_of(&snapshot.snapshot_id);
        write_atomic(&path, &bytes)?;
        tracing::info!(snapshot = %snapshot.snapshot_id, path = %path.display(), "snapshot persisted");
        Ok(path)
    }

    pub fn load(&self, snapshot_id: &str) -> Result<GraphSnapshot> {
        if snapshot_id.is_empty() || snapshot_id.contains(['/', '\\']) || snapshot_id.starts_with('.') {
            return Err(Error::Validation(format!("bad snapshot id `{snapshot_id}`")));
        }
        let path = self.path_of(snapshot_id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(Error::NotFound(format!("snapshot `{snapshot_id}`")))
            }
            Err(e) => return Err(Error::io(&path, e)),
        };
        decode(&bytes, &path)
    }

    /// Stored snapshot ids, oldest first. Ids begin with the creation
    /// timestamp so lexical order is chronological.
    pub fn list(&self) -> Result<Vec<String>> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(Error::io(&self.dir, e)),
        };
        let mut ids = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(&self.dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if let Some(id) = name.strip_suffix(&format!(".{EXTENSION}")) {
                if !id.starts_with('.') {
                    ids.push(id.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn latest_id(&self) -> Result<Option<String>> {
        Ok(self.list()?.pop())
    }

    pub fn load_latest(&self) -> Result<GraphSnapshot> {
        match self.latest_id()? {
            Some(id) => self.load(&id),
            None => Err(Error::NotFound("no snapshot has been persisted".into())),
        }
    }

    /// Deletes all but the newest `keep` snapshots; returns the removed ids.
    pub fn prune(&self, keep: usize) -> Result<Vec<String>> {
        let ids = self.list()?;
        let cut = ids.len().saturating_sub(keep);
        let removed = ids[..cut].to_vec();
        for id in &removed {
            let p = self.path_of(id);
            fs::remove_file(&p).map_err(|e| Error::io(&p, e))?;
        }
        Ok(removed)
    }
}

fn encode(s: &GraphSnapshot) -> Result<Vec<u8>> {
    let mut body = Vec::new();
    let mut records = 0usize;
    let mut push = |r: &Record, body: &mut Vec<u8>| -> Result<()> {
        serde_json::to_writer(&mut *body, r)?;
        body.push(b'\n');
        records += 1;
        Ok(())
    };
    for f in &s.files {
        push(&Record::File(f.clone()), &mut body)?;
    }
    for n in &s.nodes {
        push(&Record::Node(n.clone()), &mut body)?;
    }
    for e in &s.edges {
        push(&Record::Edge(e.clone()), &mut body)?;
    }
    for d in &s.diagnostics {
        push(&Record::Diag(d.clone()), &mut body)?;
    }
    push(
        &Record::Summary {
            per_project_counts: s.per_project_counts.clone(),
            diagnostics_summary: s.diagnostics_summary.clone(),
        },
        &mut body,
    )?;
    let header = Header {
        format: FORMAT.into(),
        version: FORMAT_VERSION,
        snapshot_id: s.snapshot_id.clone(),
        created_at: s.created_at,
        corpus_hash: s.corpus_hash.clone(),
        records,
        sha256: hex::encode(Sha256::digest(&body)),
    };
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    out.extend(body);
    Ok(out)
}

fn decode(bytes: &[u8], path: &Path) -> Result<GraphSnapshot> {
    let bad = |message: String| Error::Integrity {
        path: path.to_path_buf(),
        message,
    };
    let split = memchr::memchr(b'\n', bytes).ok_or_else(|| bad("missing header line".into()))?;
    let header: Header =
        serde_json::from_slice(&bytes[..split]).map_err(|e| bad(format!("unreadable header: {e}")))?;
    if header.format != FORMAT || header.version != FORMAT_VERSION {
        return Err(bad(format!("unsupported format {} v{}", header.format, header.version)));
    }
    let body = &bytes[split + 1..];
    let digest = hex::encode(Sha256::digest(body));
    if digest != header.sha256 {
        return Err(bad("checksum mismatch".into()));
    }
    let text = std::str::from_utf8(body).map_err(|e| bad(e.to_string()))?;
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != header.records {
        return Err(bad(format!("expected {} records, found {}", header.records, lines.len())));
    }
    let mut snap = GraphSnapshot {
        snapshot_id: header.snapshot_id,
        created_at: header.created_at,
        corpus_hash: header.corpus_hash,
        files: Vec::new(),
        nodes: Vec::new(),
        edges: Vec::new(),
        per_project_counts: BTreeMap::new(),
        diagnostics: Vec::new(),
        diagnostics_summary: BTreeMap::new(),
    };
    let mut summary_seen = false;
    for (i, line) in lines.iter().enumerate() {
        let rec: Record = serde_json::from_str(line).map_err(|e| bad(format!("record {}: {e}", i + 1)))?;
        if summary_seen {
            return Err(bad("records after summary".into()));
        }
        match rec {
            Record::File(f) => snap.files.push(f),
            Record::Node(n) => snap.nodes.push(n),
            Record::Edge(e) => snap.edges.push(e),
            Record::Diag(d) => snap.diagnostics.push(d),
            Record::Summary {
                per_project_counts,
                diagnostics_summary,
            } => {
                snap.per_project_counts = per_project_counts;
                snap.diagnostics_summary = diagnostics_summary;
                summary_seen = true;
            }
        }
    }
    if !summary_seen {
        return Err(bad("missing summary record".into()));
    }
    snap.check_integrity().map_err(|e| bad(e.to_string()))?;
    Ok(snap)
}

/// Writes to a sibling temp file and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}
