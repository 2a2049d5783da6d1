//! Keyword search and top-down call-graph generation over a snapshot.

mod callgraph;
mod export;
mod search;

pub use callgraph::{
    generate_call_graph, BackEdge, CallGraph, GraphEdge, GraphNode, GraphOptions, Navigator, StopReason,
    DEFAULT_MAX_DEPTH,
};
pub use export::{export_graph, graph_from_json, to_dot, GraphFormat};
pub use search::{search, search_with, simple_name, CorpusText, FileHit, SearchOptions, SearchResult};
