//! Grouped calls analysis: formal concept analysis over the call relation.
//!
//! Callers are objects, callees attributes. A concept is a maximal group of
//! callees invoked by the same maximal group of callers. Concepts are mined
//! on the full context and accessor callees are hidden afterwards, keeping
//! the unfiltered groups as the extended result.

mod close_by_one;
mod context;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use close_by_one::{close_by_one, RawConcept};
pub use context::{build_context, FormalContext};

use crate::error::{ConfigError, MetricError};
use crate::facts::{is_accessor, EffectiveRelation, FilterConfig, ProgramFacts};
use crate::fanin::count_members;
use crate::ratio::Fraction;

#[derive(Debug, thiserror::Error)]
pub enum ConceptError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid formal context: {0}")]
    InvalidContext(String),
    #[error(
        "context of {objects} callers x {attributes} callees exceeds the {max_objects} x {max_attributes} cap; \
         analyze a subsystem instead or raise the cap"
    )]
    TooLarge {
        objects: usize,
        attributes: usize,
        max_objects: usize,
        max_attributes: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupedCallsConfig {
    pub min_callers: usize,
    pub min_callees: usize,
    #[serde(default = "default_cap")]
    pub max_context_objects: usize,
    #[serde(default = "default_cap")]
    pub max_context_attributes: usize,
}

fn default_cap() -> usize {
    10_000
}

impl Default for GroupedCallsConfig {
    fn default() -> Self {
        Self::profile(1)
    }
}

impl GroupedCallsConfig {
    /// Profile 1 groups at 10 callers, profile 2 at 7; both need 2 callees.
    pub fn profile(profile: u8) -> Self {
        Self {
            min_callers: if profile == 2 { 7 } else { 10 },
            min_callees: 2,
            max_context_objects: default_cap(),
            max_context_attributes: default_cap(),
        }
    }

    pub fn with_thresholds(min_callers: usize, min_callees: usize) -> Self {
        Self {
            min_callers,
            min_callees,
            ..Self::profile(1)
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_callers == 0 || self.min_callees == 0 {
            return Err(ConfigError("grouped calls thresholds must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptCandidate {
    /// Intent after display filtering, ascending.
    pub callees: Vec<String>,
    /// Extent, ascending.
    pub callers: Vec<String>,
    /// Unfiltered intent.
    pub extended_callees: Vec<String>,
    /// Unfiltered extent.
    pub extended_callers: Vec<String>,
}

impl ConceptCandidate {
    fn from_raw(ctx: &FormalContext, raw: &RawConcept) -> Self {
        let callees: Vec<String> = raw
            .intent
            .iter()
            .map(|&a| ctx.attributes()[a as usize].clone())
            .collect();
        let callers: Vec<String> = raw.extent.iter().map(|&o| ctx.objects()[o as usize].clone()).collect();
        Self {
            extended_callees: callees.clone(),
            extended_callers: callers.clone(),
            callees,
            callers,
        }
    }
}

fn canonical_order(a: &ConceptCandidate, b: &ConceptCandidate) -> std::cmp::Ordering {
    b.callers
        .len()
        .cmp(&a.callers.len())
        .then_with(|| a.callees.cmp(&b.callees))
        .then_with(|| a.extended_callees.cmp(&b.extended_callees))
}

/// All concepts with at least `min_callers` callers and `min_callees`
/// callees, ordered by extent size (descending) then intent ids.
pub fn enumerate_concepts(
    ctx: &FormalContext,
    cfg: &GroupedCallsConfig,
) -> Result<Vec<ConceptCandidate>, ConceptError> {
    cfg.validate()?;
    let (objects, attributes) = (ctx.objects().len(), ctx.attributes().len());
    if objects > cfg.max_context_objects || attributes > cfg.max_context_attributes {
        return Err(ConceptError::TooLarge {
            objects,
            attributes,
            max_objects: cfg.max_context_objects,
            max_attributes: cfg.max_context_attributes,
        });
    }
    let raw = close_by_one(ctx, cfg.min_callers, cfg.min_callees);
    let mut out: Vec<ConceptCandidate> = raw.iter().map(|r| ConceptCandidate::from_raw(ctx, r)).collect();
    out.sort_by(canonical_order);
    Ok(out)
}

/// Hides accessor callees. The concept is rejected (`None`) when fewer than
/// `min_callees` callees remain; the extended sets keep everything.
pub fn display_filter(
    c: &ConceptCandidate,
    facts: &ProgramFacts,
    filter: &FilterConfig,
    cfg: &GroupedCallsConfig,
) -> Option<ConceptCandidate> {
    let callees: Vec<String> = c
        .callees
        .iter()
        .filter(|id| match facts.method_by_id(id) {
            Some(m) => !is_accessor(facts.method(m), filter),
            None => true,
        })
        .cloned()
        .collect();
    if callees.len() < cfg.min_callees {
        return None;
    }
    Some(ConceptCandidate { callees, ..c.clone() })
}

/// Builds the context, enumerates concepts and applies the display filter.
pub fn mine_grouped(
    facts: &ProgramFacts,
    filter: &FilterConfig,
    cfg: &GroupedCallsConfig,
) -> Result<Vec<ConceptCandidate>, ConceptError> {
    let rel = EffectiveRelation::new(facts, filter);
    let ctx = context::context_from_relation(&rel);
    let mut out: Vec<ConceptCandidate> = enumerate_concepts(&ctx, cfg)?
        .iter()
        .filter_map(|c| display_filter(c, facts, filter, cfg))
        .collect();
    out.sort_by(canonical_order);
    Ok(out)
}

/// Product of the valid-caller share and the relevant-callee share.
pub fn grouped_seed_quality(
    c: &ConceptCandidate,
    valid_callers: &BTreeSet<String>,
    relevant_callees: &BTreeSet<String>,
) -> Result<Fraction, MetricError> {
    let owner = c.callees.join(",");
    let callers: BTreeSet<&str> = c.callers.iter().map(String::as_str).collect();
    let callees: BTreeSet<&str> = c.callees.iter().map(String::as_str).collect();
    let degenerate = || MetricError::DegenerateCandidate(format!("concept {{{owner}}} has an empty side"));
    let caller_share = Fraction::new(
        count_members(&callers, valid_callers, &owner, "caller"),
        callers.len() as u64,
    )
    .ok_or_else(degenerate)?;
    let callee_share = Fraction::new(
        count_members(&callees, relevant_callees, &owner, "callee"),
        callees.len() as u64,
    )
    .ok_or_else(degenerate)?;
    Ok(caller_share.product(callee_share))
}
