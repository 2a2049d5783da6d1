//! Layered call-graph mining for multi-project, curly-brace object-oriented
//! code bases.
//!
//! The crate is split along the batch/navigator line:
//!
//! * [`corpus`], [`extract`], [`resolve`] and [`store`] sweep the code base,
//!   pull out classes, members and dot-operator call sites, resolve them into
//!   layer-classified edges and persist the result as a [`store::GraphSnapshot`].
//! * [`navigate`] answers keyword searches and expands top-down call graphs
//!   from a selected entry method over a snapshot.
//! * [`eval`] scores generated call graphs against hand-traced ground truth.
//!
//! Per-file extraction, call resolution, search and benchmark runs fan out
//! over rayon when the `parallel` feature is enabled (the default); see
//! [`exec::Parallelism`].

pub mod config;
pub mod corpus;
pub mod diag;
pub mod error;
pub mod eval;
pub mod exec;
pub mod extract;
pub mod json;
pub mod navigate;
pub mod resolve;
pub mod store;

pub use config::{Config, LayerBinding, LayerKind, ProjectConfig};
pub use corpus::{categorize_file, scan_corpus, FileCategory, FileInventory, FileRecord};
pub use diag::{DiagCode, Diagnostic};
pub use error::{Error, Result};
pub use exec::Parallelism;
