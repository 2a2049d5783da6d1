//! Project configuration: roots, namespace-to-layer bindings and the lists
//! that steer third-party and web-service proxy classification.
//!
//! Configuration is read from a TOML document:
//!
//! ```toml
//! data_dir = ".tiergraph"            # relative to the config file
//! extra_builtin_types = ["Guid"]     # appended to the builtin exclusion list
//!
//! [defaults]                         # merged into every project
//! third_party_namespaces = ["System"]
//! webservice_proxy_markers = ["SoapHttpClientProtocol", "file:<auto-generated>"]
//! non_code_extensions = ["xml", "resx"]
//! [[defaults.layers]]
//! prefix = "Shop.Web"
//! layer = "UI"
//!
//! [[projects]]
//! id = "Shop.Web"
//! root = "Shop.Web"                  # relative to the config file
//! [[projects.layers]]                # overrides a default with the same prefix
//! prefix = "Shop.Web.Admin"
//! layer = "Business"
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Environment variable consulted for the config path when no flag is given.
pub const CONFIG_ENV: &str = "TIERGRAPH_CONFIG";

/// Extensions always treated as non-code, in addition to configured ones.
pub const DEFAULT_NON_CODE_EXTENSIONS: [&str; 4] = ["xml", "xslt", "html", "resx"];

/// Marker prefix that turns a proxy marker into a file-content marker
/// instead of a base-class name.
pub const FILE_MARKER_PREFIX: &str = "file:";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LayerKind {
    UI,
    Business,
    Data,
    WebService,
    ThirdParty,
    Unknown,
}

impl LayerKind {
    pub const ALL: [LayerKind; 6] = [
        LayerKind::UI,
        LayerKind::Business,
        LayerKind::Data,
        LayerKind::WebService,
        LayerKind::ThirdParty,
        LayerKind::Unknown,
    ];

    /// Position in the UI > Business > Data stack. Web services, third-party
    /// code and unbound namespaces have no rank.
    pub fn rank(self) -> Option<u8> {
        match self {
            LayerKind::UI => Some(3),
            LayerKind::Business => Some(2),
            LayerKind::Data => Some(1),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::UI => "UI",
            LayerKind::Business => "Business",
            LayerKind::Data => "Data",
            LayerKind::WebService => "WebService",
            LayerKind::ThirdParty => "ThirdParty",
            LayerKind::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayerKind::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation(format!("unknown layer `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerBinding {
    pub prefix: String,
    pub layer: LayerKind,
}

impl LayerBinding {
    pub fn new(prefix: impl Into<String>, layer: LayerKind) -> Self {
        LayerBinding {
            prefix: prefix.into(),
            layer,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectConfig {
    pub project_id: String,
    pub root_path: PathBuf,
    pub layer_bindings: Vec<LayerBinding>,
    pub non_code_extensions: BTreeSet<String>,
    pub webservice_proxy_markers: Vec<String>,
    pub third_party_namespaces: Vec<String>,
}

impl ProjectConfig {
    pub fn new(project_id: impl Into<String>, root_path: impl Into<PathBuf>) -> Self {
        ProjectConfig {
            project_id: project_id.into(),
            root_path: root_path.into(),
            layer_bindings: Vec::new(),
            non_code_extensions: DEFAULT_NON_CODE_EXTENSIONS
                .iter()
                .map(|s| s.to_string())
                .collect(),
            webservice_proxy_markers: Vec::new(),
            third_party_namespaces: Vec::new(),
        }
    }

    pub fn with_layer(mut self, prefix: impl Into<String>, layer: LayerKind) -> Self {
        self.layer_bindings.push(LayerBinding::new(prefix, layer));
        self
    }

    pub fn with_third_party(mut self, prefix: impl Into<String>) -> Self {
        self.third_party_namespaces.push(prefix.into());
        self
    }

    pub fn with_proxy_marker(mut self, marker: impl Into<String>) -> Self {
        self.webservice_proxy_markers.push(marker.into());
        self
    }

    /// Layer of a dotted namespace: the longest matching binding or
    /// third-party prefix wins, `Unknown` when nothing matches.
    pub fn layer_of(&self, namespace: &str) -> LayerKind {
        let bound = self
            .layer_bindings
            .iter()
            .map(|b| (b.prefix.as_str(), b.layer));
        let third_party = self
            .third_party_namespaces
            .iter()
            .map(|p| (p.as_str(), LayerKind::ThirdParty));
        bound
            .chain(third_party)
            .filter(|(prefix, _)| namespace_has_prefix(namespace, prefix))
            // max_by_key keeps the last maximum; bindings come first, so a
            // binding and a third-party prefix of equal length resolve to
            // the third-party entry. Reverse so the binding wins instead.
            .rev()
            .max_by_key(|(prefix, _)| prefix.len())
            .map(|(_, layer)| layer)
            .unwrap_or(LayerKind::Unknown)
    }

    pub fn is_third_party(&self, namespace: &str) -> bool {
        self.layer_of(namespace) == LayerKind::ThirdParty
    }

    /// Base-class names that mark a generated web-service proxy.
    pub fn proxy_base_markers(&self) -> impl Iterator<Item = &str> {
        self.webservice_proxy_markers
            .iter()
            .filter(|m| !m.starts_with(FILE_MARKER_PREFIX))
            .map(String::as_str)
    }

    /// File-content markers (configured with the `file:` prefix).
    pub fn proxy_file_markers(&self) -> impl Iterator<Item = &str> {
        self.webservice_proxy_markers
            .iter()
            .filter_map(|m| m.strip_prefix(FILE_MARKER_PREFIX))
    }

    pub fn validate(&self) -> Result<()> {
        let err = |message: String| Error::Config {
            project: self.project_id.clone(),
            message,
        };
        if self.project_id.trim().is_empty() {
            return Err(err("project id is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for binding in &self.layer_bindings {
            if binding.prefix.is_empty() {
                return Err(err("layer binding with empty prefix".into()));
            }
            if !seen.insert(binding.prefix.as_str()) {
                return Err(err(format!("duplicate layer prefix `{}`", binding.prefix)));
            }
            if !matches!(
                binding.layer,
                LayerKind::UI | LayerKind::Business | LayerKind::Data | LayerKind::WebService
            ) {
                return Err(err(format!(
                    "prefix `{}` bound to {}; only UI, Business, Data and WebService may be bound",
                    binding.prefix, binding.layer
                )));
            }
        }
        Ok(())
    }
}

/// `ns` equals `prefix` or continues it at a `.` boundary.
pub fn namespace_has_prefix(ns: &str, prefix: &str) -> bool {
    ns == prefix
        || (ns.len() > prefix.len()
            && ns.starts_with(prefix)
            && ns.as_bytes()[prefix.len()] == b'.')
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub projects: Vec<ProjectConfig>,
    pub data_dir: PathBuf,
    pub extra_builtin_types: Vec<String>,
}

impl Config {
    pub fn new(projects: Vec<ProjectConfig>, data_dir: impl Into<PathBuf>) -> Self {
        Config {
            projects,
            data_dir: data_dir.into(),
            extra_builtin_types: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Config::from_toml_str(&text, base).map_err(|e| match e {
            Error::ConfigFile { message, .. } => Error::ConfigFile {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Parses a config document; relative paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Config> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::ConfigFile {
            path: PathBuf::from("<inline>"),
            message: e.to_string(),
        })?;
        let defaults = raw.defaults.unwrap_or_default();

        let mut ids = BTreeSet::new();
        let mut projects = Vec::with_capacity(raw.projects.len());
        for p in raw.projects {
            if !ids.insert(p.id.clone()) {
                return Err(Error::Config {
                    project: p.id,
                    message: "project id declared twice".into(),
                });
            }
            // Project bindings override defaults with the same prefix.
            let mut bindings: BTreeMap<String, LayerKind> = BTreeMap::new();
            let mut order = Vec::new();
            for b in defaults.layers.iter().chain(p.layers.iter()) {
                if bindings.insert(b.prefix.clone(), b.layer).is_none() {
                    order.push(b.prefix.clone());
                }
            }
            if has_duplicates(p.layers.iter().map(|b| b.prefix.as_str())) {
                return Err(Error::Config {
                    project: p.id,
                    message: "duplicate layer prefix".into(),
                });
            }
            let mut cfg = ProjectConfig::new(p.id, base_dir.join(p.root));
            cfg.layer_bindings = order
                .into_iter()
                .map(|prefix| {
                    let layer = bindings[&prefix];
                    LayerBinding { prefix, layer }
                })
                .collect();
            cfg.non_code_extensions.extend(
                defaults
                    .non_code_extensions
                    .iter()
                    .chain(&p.non_code_extensions)
                    .map(|e| e.trim_start_matches('.').to_ascii_lowercase()),
            );
            cfg.webservice_proxy_markers =
                concat_unique(&defaults.webservice_proxy_markers, &p.webservice_proxy_markers);
            cfg.third_party_namespaces =
                concat_unique(&defaults.third_party_namespaces, &p.third_party_namespaces);
            cfg.validate()?;
            projects.push(cfg);
        }

        Ok(Config {
            projects,
            data_dir: base_dir.join(raw.data_dir.unwrap_or_else(|| ".tiergraph".into())),
            extra_builtin_types: raw.extra_builtin_types,
        })
    }

    pub fn project(&self, id: &str) -> Option<&ProjectConfig> {
        self.projects.iter().find(|p| p.project_id == id)
    }
}

/// Picks the config path: explicit flag first, then `TIERGRAPH_CONFIG`.
pub fn resolve_config_path(flag: Option<&Path>) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from))
}

fn has_duplicates<'a>(items: impl Iterator<Item = &'a str>) -> bool {
    let mut seen = BTreeSet::new();
    items.into_iter().any(|i| !seen.insert(i))
}

fn concat_unique(a: &[String], b: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(a.len() + b.len());
    for s in a.iter().chain(b) {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data_dir: Option<PathBuf>,
    #[serde(default)]
    extra_builtin_types: Vec<String>,
    defaults: Option<RawDefaults>,
    #[serde(default)]
    projects: Vec<RawProject>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDefaults {
    #[serde(default)]
    layers: Vec<LayerBinding>,
    #[serde(default)]
    non_code_extensions: Vec<String>,
    #[serde(default)]
    webservice_proxy_markers: Vec<String>,
    #[serde(default)]
    third_party_namespaces: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProject {
    id: String,
    root: PathBuf,
    #[serde(default)]
    layers: Vec<LayerBinding>,
    #[serde(default)]
    non_code_extensions: Vec<String>,
    #[serde(default)]
    webservice_proxy_markers: Vec<String>,
    #[serde(default)]
    third_party_namespaces: Vec<String>,
}
