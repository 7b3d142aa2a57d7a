use crate::facts::FactsError;

#[derive(Debug, thiserror::Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, thiserror::Error)]
pub enum LookupError {
    #[error("unknown method `{0}`")]
    Method(String),
    #[error("unknown candidate `{0}`")]
    Candidate(String),
}

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("degenerate candidate {0}: nothing to measure")]
    DegenerateCandidate(String),
}

/// Umbrella error for callers that drive several stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Facts(#[from] FactsError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lookup(#[from] LookupError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Concept(#[from] crate::concepts::ConceptError),
    #[error(transparent)]
    Combine(#[from] crate::combine::CombineError),
    #[error(transparent)]
    Label(#[from] crate::assess::LabelError),
    #[error(transparent)]
    Forge(#[from] crate::forge::ForgeError),
    #[error(transparent)]
    Document(#[from] crate::report::DocumentError),
}
