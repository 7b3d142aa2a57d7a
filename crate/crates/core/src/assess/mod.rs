//! Seed labels, per-technique metrics, and oracle labeling from planted
//! ground truth.

mod metrics;
mod oracle;
mod registry;

pub use metrics::{
    candidate_quality, compute_metrics, labeled_seeds, write_metrics_csv, MetricsReport, ACCEPTANCE_BAR,
};
pub use oracle::auto_label_from_ground_truth;
pub use registry::{SeedLabel, SeedRegistry, Verdict, SEEDS_SCHEMA};

use crate::report::DocumentError;

#[derive(Debug, thiserror::Error)]
pub enum LabelError {
    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),
    #[error("candidate `{0}` is labeled a seed without a sort")]
    MissingSort(String),
    #[error("{field} of `{candidate}` names `{element}`, which is not part of the candidate")]
    ForeignElement {
        candidate: String,
        field: &'static str,
        element: String,
    },
    #[error("report fingerprint {report} does not match ground truth {truth}")]
    FingerprintMismatch { report: String, truth: String },
    #[error(transparent)]
    Document(#[from] DocumentError),
}
