//! Synthetic program facts with planted crosscutting concerns and the
//! matching ground truth, for oracle-based evaluation.

mod generate;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use generate::generate;

use crate::facts::{FactsError, ProgramFacts, Sort};
use crate::redirect::RedirectionPair;
use crate::report::{self, DocumentError};

pub const TRUTH_SCHEMA: &str = "truth/1";

#[derive(Debug, thiserror::Error)]
pub enum ForgeError {
    #[error("impossible plant `{plant}`: {reason}")]
    Impossible { plant: String, reason: String },
    #[error("invalid background: {0}")]
    Background(String),
    #[error("generated facts do not load: {0}")]
    Facts(#[from] FactsError),
}

/// Consistent behavior / contract enforcement plant: concern callers each
/// invoke the planted callees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CallPlant {
    /// Naming seed; defaults to `concernNN` by position.
    #[serde(default)]
    pub name: Option<String>,
    pub concern_callers: usize,
    /// Callers of the first callee only, not part of the concern.
    #[serde(default)]
    pub noise_callers: usize,
    #[serde(default = "one")]
    pub callees: usize,
    /// Irrelevant callees invoked by every concern caller.
    #[serde(default)]
    pub decoy_callees: usize,
    /// Field-returning accessors invoked by every concern caller.
    #[serde(default)]
    pub accessor_callees: usize,
    /// Random background calls per concern caller.
    #[serde(default = "one")]
    pub work_calls: usize,
}

/// Redirection layer plant: a decorator class forwarding one-to-one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedirectPlant {
    #[serde(default)]
    pub name: Option<String>,
    pub pairs: usize,
    /// Non-constructor methods of the decorator; at least `pairs`.
    pub eligible_methods: usize,
    #[serde(default = "one_f64")]
    pub name_match_fraction: f64,
}

fn one() -> usize {
    1
}

fn one_f64() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sort")]
pub enum PlantSpec {
    ConsistentBehavior(CallPlant),
    ContractEnforcement(CallPlant),
    RedirectionLayer(RedirectPlant),
}

impl PlantSpec {
    pub fn sort(&self) -> Sort {
        match self {
            PlantSpec::ConsistentBehavior(_) => Sort::ConsistentBehavior,
            PlantSpec::ContractEnforcement(_) => Sort::ContractEnforcement,
            PlantSpec::RedirectionLayer(_) => Sort::RedirectionLayer,
        }
    }

    pub fn consistent(concern_callers: usize, noise_callers: usize) -> Self {
        PlantSpec::ConsistentBehavior(CallPlant::new(concern_callers, noise_callers))
    }

    pub fn redirection(pairs: usize, eligible_methods: usize) -> Self {
        PlantSpec::RedirectionLayer(RedirectPlant {
            name: None,
            pairs,
            eligible_methods,
            name_match_fraction: 1.0,
        })
    }
}

impl CallPlant {
    pub fn new(concern_callers: usize, noise_callers: usize) -> Self {
        Self {
            name: None,
            concern_callers,
            noise_callers,
            callees: 1,
            decoy_callees: 0,
            accessor_callees: 0,
            work_calls: 1,
        }
    }
}

/// Random background system the plants are woven into.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Background {
    pub classes: usize,
    /// Including one constructor per class.
    pub methods_per_class: usize,
    pub packages: usize,
    /// Mean outgoing calls per background method; the edge count is
    /// `round(methods * calls_per_method)`.
    pub calls_per_method: f64,
    pub accessor_fraction: f64,
    /// Classes under a `test` package.
    pub test_classes: usize,
    pub test_calls_per_method: usize,
    /// Collection wrappers under `util.collections`.
    pub wrapper_classes: usize,
    /// Calls into wrappers per background method, on average.
    pub wrapper_calls_per_method: f64,
}

impl Default for Background {
    fn default() -> Self {
        Self {
            classes: 40,
            methods_per_class: 8,
            packages: 4,
            calls_per_method: 3.0,
            accessor_fraction: 0.15,
            test_classes: 2,
            test_calls_per_method: 12,
            wrapper_classes: 1,
            wrapper_calls_per_method: 0.3,
        }
    }
}

impl Background {
    /// No background at all.
    pub fn none() -> Self {
        Self {
            classes: 0,
            methods_per_class: 0,
            packages: 1,
            calls_per_method: 0.0,
            accessor_fraction: 0.0,
            test_classes: 0,
            test_calls_per_method: 0,
            wrapper_classes: 0,
            wrapper_calls_per_method: 0.0,
        }
    }
}

/// Input of [`generate`]: a background and the plants to weave in.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    #[serde(default)]
    pub background: Background,
    #[serde(default)]
    pub plants: Vec<PlantSpec>,
}

impl CorpusSpec {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        report::parse_document(text, "<corpus spec>")
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = report::read_document(path)?;
        report::parse_document(&text, &path.display().to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedConcern {
    pub name: String,
    pub sort: Sort,
    /// Concern callees (consistent-call plants).
    #[serde(default)]
    pub callees: Vec<String>,
    /// Crosscut callers (consistent-call plants).
    #[serde(default)]
    pub callers: Vec<String>,
    /// Redirector class (redirection plants).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redirector_class: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_class: Option<String>,
    #[serde(default)]
    pub pairs: Vec<RedirectionPair>,
    /// Elements woven in around the concern that are not part of it.
    #[serde(default)]
    pub noise: Vec<String>,
}

/// The `truth/1` document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    pub schema: String,
    pub fingerprint: String,
    pub concerns: Vec<PlantedConcern>,
}

impl GroundTruth {
    pub fn to_json(&self) -> String {
        report::to_document_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let t: GroundTruth = report::parse_document(text, "<truth>")?;
        report::check_schema("<truth>", TRUTH_SCHEMA, &t.schema)?;
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = report::read_document(path)?;
        let name = path.display().to_string();
        let t: GroundTruth = report::parse_document(&text, &name)?;
        report::check_schema(&name, TRUTH_SCHEMA, &t.schema)?;
        Ok(t)
    }
}

/// A generated corpus.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub facts: ProgramFacts,
    pub truth: GroundTruth,
}
