//! File discovery and categorization across project roots.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::config::ProjectConfig;
use crate::exec::{self, Parallelism};
use crate::{Error, Result};

/// Extension of the analyzed language's source files.
pub const CODE_EXTENSION: &str = "cs";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FileCategory {
    CodeBehind,
    NonCode,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FileRecord {
    /// Path relative to the project root, `/`-separated.
    pub path: String,
    pub project_id: String,
    pub category: FileCategory,
    /// Hex SHA-256 of the file bytes; empty when the file was unreadable.
    pub content_hash: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
}

impl FileRecord {
    /// Globally unique key, `project/path`.
    pub fn key(&self) -> String {
        format!("{}/{}", self.project_id, self.path)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileInventory {
    pub files: Vec<FileRecord>,
}

impl FileInventory {
    pub fn len(&self) -> usize {
        self.files.len()
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FileRecord> {
        self.files.iter()
    }
}

/// `.cs` is code-behind; everything else, extensionless files included, is
/// non-code. Matching is case-insensitive on the extension.
pub fn categorize_file(path: &Path, _config: &ProjectConfig) -> FileCategory {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case(CODE_EXTENSION) => FileCategory::CodeBehind,
        _ => FileCategory::NonCode,
    }
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn scan_corpus(configs: &[ProjectConfig]) -> Result<FileInventory> {
    scan_corpus_with(configs, Parallelism::default())
}

pub fn scan_corpus_with(configs: &[ProjectConfig], mode: Parallelism) -> Result<FileInventory> {
    let files = scan_with_contents(configs, mode)?
        .into_iter()
        .map(|s| s.record)
        .collect();
    Ok(FileInventory { files })
}

/// A scanned file together with its bytes (`None` when unreadable).
pub(crate) struct ScannedFile {
    pub record: FileRecord,
    pub bytes: Option<Vec<u8>>,
}

pub(crate) fn scan_with_contents(
    configs: &[ProjectConfig],
    mode: Parallelism,
) -> Result<Vec<ScannedFile>> {
    let mut candidates = Vec::new();
    for cfg in configs {
        for rel in list_files(cfg)? {
            candidates.push((cfg, rel));
        }
    }
    let mut scanned = exec::map(&candidates, mode, |(cfg, rel)| {
        let full = cfg.root_path.join(rel);
        let category = categorize_file(Path::new(rel), cfg);
        match std::fs::read(&full) {
            Ok(bytes) => ScannedFile {
                record: FileRecord {
                    path: rel.clone(),
                    project_id: cfg.project_id.clone(),
                    category,
                    content_hash: content_hash(&bytes),
                    skipped: false,
                },
                bytes: Some(bytes),
            },
            Err(e) => {
                tracing::warn!(path = %full.display(), error = %e, "unreadable file skipped");
                ScannedFile {
                    record: FileRecord {
                        path: rel.clone(),
                        project_id: cfg.project_id.clone(),
                        category,
                        content_hash: String::new(),
                        skipped: true,
                    },
                    bytes: None,
                }
            }
        }
    });
    scanned.sort_by(|a, b| {
        (&a.record.project_id, &a.record.path).cmp(&(&b.record.project_id, &b.record.path))
    });
    Ok(scanned)
}

/// Regular files under the project root, relative and `/`-separated.
/// Dot-prefixed files and directories below the root are skipped.
fn list_files(cfg: &ProjectConfig) -> Result<Vec<String>> {
    let root = &cfg.root_path;
    let meta = std::fs::metadata(root).map_err(|e| Error::Config {
        project: cfg.project_id.clone(),
        message: format!("root {} is not accessible: {e}", root.display()),
    })?;
    if !meta.is_dir() {
        return Err(Error::Config {
            project: cfg.project_id.clone(),
            message: format!("root {} is not a directory", root.display()),
        });
    }
    let mut out = Vec::new();
    let walker = WalkDir::new(root)
        .follow_links(false)
        .into_iter()
        .filter_entry(|e| e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.'));
    for entry in walker {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                tracing::warn!(project = %cfg.project_id, error = %e, "directory entry skipped");
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir yields paths under its root");
        let rel = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        out.push(rel);
    }
    out.sort();
    Ok(out)
}
