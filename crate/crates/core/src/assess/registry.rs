use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::facts::Sort;
use crate::redirect::RedirectionPair;
use crate::report::{self, Candidate, Catalog, DocumentError};

use super::LabelError;

pub const SEEDS_SCHEMA: &str = "seeds/1";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Seed,
    NonSeed,
    #[default]
    Undecided,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Seed => "seed",
            Verdict::NonSeed => "non_seed",
            Verdict::Undecided => "undecided",
        }
    }
}

/// A verdict on one candidate with per-element validity marks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedLabel {
    pub candidate_id: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sort: Option<Sort>,
    #[serde(default)]
    pub valid_callers: BTreeSet<String>,
    #[serde(default)]
    pub relevant_callees: BTreeSet<String>,
    #[serde(default)]
    pub valid_pairs: BTreeSet<RedirectionPair>,
    #[serde(default)]
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
}

impl SeedLabel {
    pub fn new(candidate_id: impl Into<String>, verdict: Verdict) -> Self {
        Self {
            candidate_id: candidate_id.into(),
            verdict,
            sort: None,
            valid_callers: BTreeSet::new(),
            relevant_callees: BTreeSet::new(),
            valid_pairs: BTreeSet::new(),
            note: String::new(),
            timestamp: None,
        }
    }

    pub fn with_sort(mut self, sort: Sort) -> Self {
        self.sort = Some(sort);
        self
    }

    fn same_content(&self, other: &SeedLabel) -> bool {
        SeedLabel {
            timestamp: None,
            ..self.clone()
        } == SeedLabel {
            timestamp: None,
            ..other.clone()
        }
    }

    /// Checks the label against the candidate it describes.
    pub fn validate(&self, candidate: &Candidate) -> Result<(), LabelError> {
        if self.verdict == Verdict::Seed && self.sort.is_none() {
            return Err(LabelError::MissingSort(self.candidate_id.clone()));
        }
        let foreign = |field: &'static str, element: &str| LabelError::ForeignElement {
            candidate: self.candidate_id.clone(),
            field,
            element: element.to_string(),
        };
        let callers: BTreeSet<&str> = candidate.callers().into_iter().collect();
        let callees: BTreeSet<&str> = candidate.callees().into_iter().collect();
        if let Some(c) = self.valid_callers.iter().find(|c| !callers.contains(c.as_str())) {
            return Err(foreign("valid_callers", c));
        }
        if let Some(c) = self.relevant_callees.iter().find(|c| !callees.contains(c.as_str())) {
            return Err(foreign("relevant_callees", c));
        }
        let pairs: BTreeSet<&RedirectionPair> = match candidate {
            Candidate::Redirection(r) => r.pairs.iter().map(|p| &p.pair).collect(),
            _ => BTreeSet::new(),
        };
        if let Some(p) = self.valid_pairs.iter().find(|p| !pairs.contains(p)) {
            return Err(foreign("valid_pairs", &format!("{} -> {}", p.redirector, p.target)));
        }
        Ok(())
    }
}

/// Persistent `seeds/1` document: current label per candidate plus the
/// history of every label applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRegistry {
    pub schema: String,
    pub labels: BTreeMap<String, SeedLabel>,
    #[serde(default)]
    pub history: BTreeMap<String, Vec<SeedLabel>>,
}

impl Default for SeedRegistry {
    fn default() -> Self {
        Self {
            schema: SEEDS_SCHEMA.to_string(),
            labels: BTreeMap::new(),
            history: BTreeMap::new(),
        }
    }
}

impl SeedRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, candidate_id: &str) -> Option<&SeedLabel> {
        self.labels.get(candidate_id)
    }

    pub fn history(&self, candidate_id: &str) -> &[SeedLabel] {
        self.history.get(candidate_id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Validates and stores `label`. Re-applying the current label (ignoring
    /// its timestamp) changes nothing.
    pub fn label(&mut self, catalog: &Catalog, label: SeedLabel) -> Result<&SeedLabel, LabelError> {
        let candidate = catalog
            .get(&label.candidate_id)
            .ok_or_else(|| LabelError::UnknownCandidate(label.candidate_id.clone()))?;
        label.validate(candidate)?;
        Ok(self.insert_validated(label))
    }

    pub(crate) fn insert_validated(&mut self, label: SeedLabel) -> &SeedLabel {
        let id = label.candidate_id.clone();
        let unchanged = self.labels.get(&id).is_some_and(|cur| cur.same_content(&label));
        if !unchanged {
            self.history.entry(id.clone()).or_default().push(label.clone());
            self.labels.insert(id.clone(), label);
        }
        &self.labels[&id]
    }

    /// Candidate ids labeled as seeds.
    pub fn seeds(&self) -> impl Iterator<Item = &SeedLabel> {
        self.labels.values().filter(|l| l.verdict == Verdict::Seed)
    }

    pub fn to_json(&self) -> String {
        report::to_document_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let reg: SeedRegistry = report::parse_document(text, "<seeds>")?;
        report::check_schema("<seeds>", SEEDS_SCHEMA, &reg.schema)?;
        Ok(reg)
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = report::read_document(path)?;
        let name = path.display().to_string();
        let reg: SeedRegistry = report::parse_document(&text, &name)?;
        report::check_schema(&name, SEEDS_SCHEMA, &reg.schema)?;
        Ok(reg)
    }

    /// Loads `path`, or starts empty when it does not exist yet.
    pub fn load_or_default(path: &Path) -> Result<Self, DocumentError> {
        if path.exists() {
            Self::load(path)
        } else {
            Ok(Self::new())
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), DocumentError> {
        report::write_atomic(path, self.to_json().as_bytes())
    }
}
