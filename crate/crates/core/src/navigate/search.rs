//! Keyword search over every inventory file.

use memchr::memmem;
use serde::{Deserialize, Serialize};

use crate::config::ProjectConfig;
use crate::corpus::{scan_with_contents, FileCategory, FileRecord};
use crate::exec::{self, Parallelism};
use crate::store::{member_name, GraphSnapshot};
use crate::{Error, Result};

/// File contents held in memory for repeated searches.
#[derive(Clone, Debug, Default)]
pub struct CorpusText {
    pub files: Vec<(FileRecord, Vec<u8>)>,
}

impl CorpusText {
    pub fn load(configs: &[ProjectConfig], mode: Parallelism) -> Result<CorpusText> {
        let files = scan_with_contents(configs, mode)?
            .into_iter()
            .filter_map(|s| Some((s.record, s.bytes?)))
            .collect();
        Ok(CorpusText { files })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// ASCII case-insensitive matching (`--ci`).
    pub case_insensitive: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHit {
    pub file: FileRecord,
    /// Byte offsets of non-overlapping matches, ascending.
    pub offsets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub keyword: String,
    pub code_hits: Vec<FileHit>,
    pub noncode_hits: Vec<FileHit>,
    /// Methods whose simple name contains the keyword. Never auto-picked.
    pub entry_candidates: Vec<String>,
}

impl SearchResult {
    pub fn is_empty(&self) -> bool {
        self.code_hits.is_empty() && self.noncode_hits.is_empty() && self.entry_candidates.is_empty()
    }
}

pub fn search(keyword: &str, corpus: &CorpusText, snapshot: &GraphSnapshot, opts: SearchOptions) -> Result<SearchResult> {
    search_with(keyword, corpus, snapshot, opts, Parallelism::default())
}

pub fn search_with(
    keyword: &str,
    corpus: &CorpusText,
    snapshot: &GraphSnapshot,
    opts: SearchOptions,
    mode: Parallelism,
) -> Result<SearchResult> {
    if keyword.is_empty() {
        return Err(Error::Validation("search keyword must not be empty".into()));
    }
    let needle = fold(keyword.as_bytes(), opts);
    let finder = memmem::Finder::new(&needle);
    let hits = exec::map(&corpus.files, mode, |(record, bytes)| {
        let offsets: Vec<usize> = if opts.case_insensitive {
            finder.find_iter(&fold(bytes, opts)).collect()
        } else {
            finder.find_iter(bytes).collect()
        };
        (!offsets.is_empty()).then(|| FileHit {
            file: record.clone(),
            offsets,
        })
    });
    let (mut code_hits, mut noncode_hits) = (Vec::new(), Vec::new());
    for hit in hits.into_iter().flatten() {
        match hit.file.category {
            FileCategory::CodeBehind => code_hits.push(hit),
            FileCategory::NonCode => noncode_hits.push(hit),
        }
    }
    let entry_candidates = snapshot
        .method_ids()
        .filter(|id| {
            let name = simple_name(id);
            if opts.case_insensitive {
                name.to_ascii_lowercase().contains(&keyword.to_ascii_lowercase())
            } else {
                name.contains(keyword)
            }
        })
        .map(str::to_string)
        .collect();
    Ok(SearchResult {
        keyword: keyword.to_string(),
        code_hits,
        noncode_hits,
        entry_candidates,
    })
}

/// `Ns.Class.Method(int)` -> `Method`.
pub fn simple_name(id: &str) -> &str {
    let name = member_name(id);
    name.rsplit('.').next().unwrap_or(name)
}

fn fold(bytes: &[u8], opts: SearchOptions) -> Vec<u8> {
    if opts.case_insensitive {
        bytes.to_ascii_lowercase()
    } else {
        bytes.to_vec()
    }
}
