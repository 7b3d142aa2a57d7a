//! `report/1` documents: the candidates of one technique run together with
//! the effective configuration and the facts fingerprint.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::combine::CombinedCandidate;
use crate::concepts::{mine_grouped, ConceptCandidate, ConceptError, GroupedCallsConfig};
use crate::error::ConfigError;
use crate::facts::{FilterConfig, ProgramFacts};
use crate::fanin::{mine_fanin, FanInCandidate, FanInConfig};
use crate::redirect::{mine_redirections, RedirectionCandidate, RedirectionConfig};

pub const REPORT_SCHEMA: &str = "report/1";

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed document {path}: {message}")]
    Json { path: String, message: String },
    #[error("{path}: expected schema `{expected}`, found `{found}`")]
    Schema {
        path: String,
        expected: &'static str,
        found: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    Fanin,
    Grouped,
    Redirection,
    Combined,
}

impl Technique {
    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Fanin => "fanin",
            Technique::Grouped => "grouped",
            Technique::Redirection => "redirection",
            Technique::Combined => "combined",
        }
    }

    fn id_prefix(self) -> &'static str {
        match self {
            Technique::Fanin => "fi",
            Technique::Grouped => "gc",
            Technique::Redirection => "rf",
            Technique::Combined => "cc",
        }
    }
}

impl std::fmt::Display for Technique {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Candidate {
    Fanin(FanInCandidate),
    Grouped(ConceptCandidate),
    Redirection(RedirectionCandidate),
    Combined(CombinedCandidate),
}

impl Candidate {
    pub fn technique(&self) -> Technique {
        match self {
            Candidate::Fanin(_) => Technique::Fanin,
            Candidate::Grouped(_) => Technique::Grouped,
            Candidate::Redirection(_) => Technique::Redirection,
            Candidate::Combined(_) => Technique::Combined,
        }
    }

    /// Content hash, stable across re-runs with the same facts and config.
    pub fn content_id(&self) -> String {
        let body = serde_json::to_vec(self).expect("candidate serializes");
        let digest = Sha256::digest(&body);
        format!("{}-{}", self.technique().id_prefix(), &hex::encode(digest)[..16])
    }

    /// Callees naming the concern; empty for redirections.
    pub fn callees(&self) -> Vec<&str> {
        match self {
            Candidate::Fanin(c) => vec![c.callee.as_str()],
            Candidate::Grouped(c) => c.callees.iter().map(String::as_str).collect(),
            Candidate::Combined(c) => c.callee_set.iter().map(String::as_str).collect(),
            Candidate::Redirection(_) => Vec::new(),
        }
    }

    /// Callers, or redirector methods for redirections.
    pub fn callers(&self) -> Vec<&str> {
        match self {
            Candidate::Fanin(c) => c.callers.iter().map(String::as_str).collect(),
            Candidate::Grouped(c) => c.callers.iter().map(String::as_str).collect(),
            Candidate::Combined(c) => c.callers.iter().map(String::as_str).collect(),
            Candidate::Redirection(c) => c.pairs.iter().map(|p| p.pair.redirector.as_str()).collect(),
        }
    }

    /// Sort key used by the triage views: callers, concept size or pairs.
    pub fn size(&self) -> usize {
        match self {
            Candidate::Fanin(c) => c.caller_count,
            Candidate::Grouped(c) => c.callers.len() * c.callees.len(),
            Candidate::Redirection(c) => c.pairs.len(),
            Candidate::Combined(c) => c.callers.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportEntry {
    pub id: String,
    pub candidate: Candidate,
}

impl ReportEntry {
    pub fn new(candidate: Candidate) -> Self {
        Self {
            id: candidate.content_id(),
            candidate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    /// Scope name, e.g. `fanin` or `grouped-p2`.
    pub name: String,
    pub technique: Technique,
    pub fingerprint: String,
    /// Effective configuration of the run.
    pub config: serde_json::Value,
    pub candidates: Vec<ReportEntry>,
}

impl Report {
    pub fn new(
        name: impl Into<String>,
        technique: Technique,
        fingerprint: impl Into<String>,
        config: serde_json::Value,
        candidates: Vec<Candidate>,
    ) -> Self {
        Self {
            schema: REPORT_SCHEMA.to_string(),
            name: name.into(),
            technique,
            fingerprint: fingerprint.into(),
            config,
            candidates: candidates.into_iter().map(ReportEntry::new).collect(),
        }
    }

    pub fn fanin(facts: &ProgramFacts, filter: &FilterConfig, cfg: &FanInConfig) -> Result<Self, ConfigError> {
        let found = mine_fanin(facts, filter, cfg)?;
        Ok(Self::new(
            "fanin",
            Technique::Fanin,
            facts.fingerprint(),
            serde_json::json!({ "filters": filter, "fanin": cfg }),
            found.into_iter().map(Candidate::Fanin).collect(),
        ))
    }

    pub fn grouped(
        facts: &ProgramFacts,
        filter: &FilterConfig,
        cfg: &GroupedCallsConfig,
    ) -> Result<Self, ConceptError> {
        let found = mine_grouped(facts, filter, cfg)?;
        Ok(Self::new(
            "grouped",
            Technique::Grouped,
            facts.fingerprint(),
            serde_json::json!({ "filters": filter, "grouped": cfg }),
            found.into_iter().map(Candidate::Grouped).collect(),
        ))
    }

    pub fn redirections(
        facts: &ProgramFacts,
        filter: &FilterConfig,
        cfg: &RedirectionConfig,
    ) -> Result<Self, ConfigError> {
        let found = mine_redirections(facts, filter, cfg)?;
        Ok(Self::new(
            "redirection",
            Technique::Redirection,
            facts.fingerprint(),
            serde_json::json!({ "filters": filter, "redirection": cfg }),
            found.into_iter().map(Candidate::Redirection).collect(),
        ))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn get(&self, id: &str) -> Option<&Candidate> {
        self.candidates.iter().find(|e| e.id == id).map(|e| &e.candidate)
    }

    pub fn fanin_candidates(&self) -> impl Iterator<Item = (&str, &FanInCandidate)> {
        self.candidates.iter().filter_map(|e| match &e.candidate {
            Candidate::Fanin(c) => Some((e.id.as_str(), c)),
            _ => None,
        })
    }

    pub fn grouped_candidates(&self) -> impl Iterator<Item = (&str, &ConceptCandidate)> {
        self.candidates.iter().filter_map(|e| match &e.candidate {
            Candidate::Grouped(c) => Some((e.id.as_str(), c)),
            _ => None,
        })
    }

    pub fn to_json(&self) -> String {
        to_document_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let report: Report = parse_document(text, "<report>")?;
        check_schema("<report>", REPORT_SCHEMA, &report.schema)?;
        Ok(report)
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = read_document(path)?;
        let report: Report = parse_document(&text, &path.display().to_string())?;
        check_schema(&path.display().to_string(), REPORT_SCHEMA, &report.schema)?;
        Ok(report)
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        write_atomic(path, self.to_json().as_bytes())
    }
}

/// Candidates of several reports by id.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    entries: BTreeMap<String, Candidate>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a Report>) -> Self {
        let mut catalog = Self::new();
        for r in reports {
            catalog.add(r);
        }
        catalog
    }

    pub fn add(&mut self, report: &Report) {
        for e in &report.candidates {
            self.entries.insert(e.id.clone(), e.candidate.clone());
        }
    }

    pub fn get(&self, id: &str) -> Option<&Candidate> {
        self.entries.get(id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub(crate) fn to_document_json<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("document serializes");
    out.push('\n');
    out
}

pub(crate) fn read_document(path: &Path) -> Result<String, DocumentError> {
    std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn parse_document<T: serde::de::DeserializeOwned>(text: &str, path: &str) -> Result<T, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Json {
        path: path.to_string(),
        message: e.to_string(),
    })
}

pub(crate) fn check_schema(path: &str, expected: &'static str, found: &str) -> Result<(), DocumentError> {
    if found != expected {
        return Err(DocumentError::Schema {
            path: path.to_string(),
            expected,
            found: found.to_string(),
        });
    }
    Ok(())
}

/// Write to a temporary sibling, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DocumentError> {
    use std::io::Write;
    let io = |source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
