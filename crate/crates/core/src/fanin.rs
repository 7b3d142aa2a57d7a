//! Fan-in analysis targeting consistent behavior and contract enforcement.
//!
//! A method invoked from many distinct callers is reported as a candidate
//! seed: the callee is the crosscutting functionality, its callers are the
//! crosscut elements.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, LookupError, MetricError};
use crate::facts::{is_accessor, EffectiveRelation, FilterConfig, MethodIdx, ProgramFacts};
use crate::ratio::Fraction;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanInConfig {
    pub min_callers: usize,
}

impl Default for FanInConfig {
    fn default() -> Self {
        Self { min_callers: 10 }
    }
}

impl FanInConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_callers == 0 {
            return Err(ConfigError("fan-in min_callers must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FanIn {
    /// Distinct call sites, i.e. distinct `(caller, site_ordinal)` edges.
    pub call_site_count: usize,
    /// Distinct calling methods.
    pub caller_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanInCandidate {
    pub callee: String,
    /// Ascending by id.
    pub callers: Vec<String>,
    pub call_site_count: usize,
    pub caller_count: usize,
}

/// Fan-in of one method in the effective relation. Self calls are not counted.
pub fn fan_in(facts: &ProgramFacts, filter: &FilterConfig, method: &str) -> Result<FanIn, LookupError> {
    let m = facts
        .method_by_id(method)
        .ok_or_else(|| LookupError::Method(method.to_string()))?;
    let rel = EffectiveRelation::new(facts, filter);
    Ok(fan_in_of(&rel, m))
}

pub(crate) fn fan_in_of(rel: &EffectiveRelation<'_>, m: MethodIdx) -> FanIn {
    // edges are unique per (caller, callee, site), so each non-self edge is one call site
    let call_site_count = rel.incoming(m).filter(|c| !c.is_self_call()).count();
    FanIn {
        call_site_count,
        caller_count: rel.callers(m).len(),
    }
}

/// Methods with at least `min_callers` distinct callers, excluding utility
/// and accessor callees, ordered by caller count (descending) then callee id.
pub fn mine_fanin(
    facts: &ProgramFacts,
    filter: &FilterConfig,
    cfg: &FanInConfig,
) -> Result<Vec<FanInCandidate>, ConfigError> {
    cfg.validate()?;
    let rel = EffectiveRelation::new(facts, filter);
    Ok(mine_with_relation(&rel, filter, cfg))
}

pub(crate) fn mine_with_relation(
    rel: &EffectiveRelation<'_>,
    filter: &FilterConfig,
    cfg: &FanInConfig,
) -> Vec<FanInCandidate> {
    let facts = rel.facts();
    let mut out: Vec<FanInCandidate> = (0..facts.method_count() as u32)
        .map(MethodIdx)
        .filter(|&m| !rel.is_utility(m) && !is_accessor(facts.method(m), filter))
        .filter_map(|m| {
            let callers = rel.callers(m);
            if callers.len() < cfg.min_callers {
                return None;
            }
            let fi = fan_in_of(rel, m);
            Some(FanInCandidate {
                callee: facts.method_id(m).to_string(),
                callers: callers.iter().map(|&c| facts.method_id(c).to_string()).collect(),
                call_site_count: fi.call_site_count,
                caller_count: fi.caller_count,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.caller_count
            .cmp(&a.caller_count)
            .then_with(|| a.callee.cmp(&b.callee))
    });
    out
}

/// Share of the candidate's callers validated as crosscut by the concern.
pub fn fanin_seed_quality(c: &FanInCandidate, valid_callers: &BTreeSet<String>) -> Result<Fraction, MetricError> {
    let callers: BTreeSet<&str> = c.callers.iter().map(String::as_str).collect();
    let valid = count_members(&callers, valid_callers, &c.callee, "caller");
    Fraction::new(valid, callers.len() as u64)
        .ok_or_else(|| MetricError::DegenerateCandidate(format!("fan-in candidate `{}` has no callers", c.callee)))
}

/// `|marked ∩ members|`, warning about marks outside the candidate.
pub(crate) fn count_members(members: &BTreeSet<&str>, marked: &BTreeSet<String>, owner: &str, what: &str) -> u64 {
    let mut hits = 0;
    for m in marked {
        if members.contains(m.as_str()) {
            hits += 1;
        } else {
            log::warn!("{what} `{m}` is not part of candidate `{owner}`; ignored");
        }
    }
    hits
}
