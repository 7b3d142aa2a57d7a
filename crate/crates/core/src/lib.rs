//! Aspect mining over static call facts: fan-in analysis, grouped calls by
//! formal concept analysis, and redirection finding, with combination,
//! seed assessment and a synthetic corpus generator.

pub mod assess;
pub mod combine;
pub mod concepts;
pub mod error;
pub mod facts;
pub mod fanin;
pub mod forge;
pub mod ratio;
pub mod redirect;
pub mod report;

pub use error::{ConfigError, Error, LookupError, MetricError};
pub use facts::{FactsError, FilterConfig, ProgramFacts, Sort, SortFamily};
pub use ratio::Fraction;
pub use report::{Candidate, Catalog, Report, Technique};
