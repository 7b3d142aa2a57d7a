//! Redirections finder: classes whose methods forward one-to-one to
//! dedicated methods of another class (decorators, adapters).
//!
//! `C.m` and `D.n` form a pair when `m` calls `n` and no other method of
//! `D`, and `n` is called by `m` and no other method of `C`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, MetricError};
use crate::facts::{is_accessor, EffectiveRelation, FilterConfig, MethodIdx, ProgramFacts, TypeIdx};
use crate::ratio::Fraction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedirectionConfig {
    pub min_redirectors: usize,
    /// Minimum share of eligible methods of the class that redirect, in `(0, 1]`.
    pub min_percentage: f64,
    #[serde(default)]
    pub require_name_match: bool,
}

impl Default for RedirectionConfig {
    fn default() -> Self {
        Self {
            min_redirectors: 3,
            min_percentage: 0.5,
            require_name_match: false,
        }
    }
}

impl RedirectionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_redirectors == 0 {
            return Err(ConfigError("min_redirectors must be at least 1".into()));
        }
        if !(self.min_percentage > 0.0 && self.min_percentage <= 1.0) {
            return Err(ConfigError(format!(
                "min_percentage must lie in (0, 1], got {}",
                self.min_percentage
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedirectionPair {
    pub redirector: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedPair {
    #[serde(flatten)]
    pub pair: RedirectionPair,
    /// Redirector and target share their unqualified name.
    pub name_match: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RedirectionCandidate {
    pub redirector_class: String,
    pub target_class: String,
    pub pairs: Vec<ReportedPair>,
    /// Methods of the redirector class that may redirect: declared,
    /// non-constructor, non-utility and, with accessor filters on, non-accessor.
    pub class_method_count: usize,
    /// All methods declared by the redirector class.
    pub declared_method_count: usize,
    pub redirector_percentage: Fraction,
}

fn eligible(rel: &EffectiveRelation<'_>, filter: &FilterConfig, m: MethodIdx) -> bool {
    let method = rel.facts().method(m);
    !rel.is_utility(m) && !method.is_constructor && !(filter.accessor_filtering() && is_accessor(method, filter))
}

/// Redirection candidates per ordered class pair, ordered by pair count
/// (descending), then redirector class id, then target class id.
pub fn mine_redirections(
    facts: &ProgramFacts,
    filter: &FilterConfig,
    cfg: &RedirectionConfig,
) -> Result<Vec<RedirectionCandidate>, ConfigError> {
    cfg.validate()?;
    let rel = EffectiveRelation::new(facts, filter);
    let mut by_pair: BTreeMap<(TypeIdx, TypeIdx), Vec<(MethodIdx, MethodIdx)>> = BTreeMap::new();

    for (t, _) in facts.types().iter().enumerate() {
        let class = TypeIdx(t as u32);
        for &m in facts.methods_of(class) {
            if !eligible(&rel, filter, m) {
                continue;
            }
            let mut into: BTreeMap<TypeIdx, Vec<MethodIdx>> = BTreeMap::new();
            for n in rel.callees(m) {
                let target = facts.declaring_type(n);
                if target != class {
                    into.entry(target).or_default().push(n);
                }
            }
            for (target, ns) in into {
                let [n] = ns[..] else { continue };
                let mut from_class = rel.callers(n).into_iter().filter(|&c| facts.declaring_type(c) == class);
                if from_class.next() == Some(m) && from_class.next().is_none() {
                    by_pair.entry((class, target)).or_default().push((m, n));
                }
            }
        }
    }

    let mut out = Vec::new();
    for ((class, target), raw) in by_pair {
        let pairs: Vec<ReportedPair> = raw
            .into_iter()
            .map(|(m, n)| ReportedPair {
                pair: RedirectionPair {
                    redirector: facts.method_id(m).to_string(),
                    target: facts.method_id(n).to_string(),
                },
                name_match: facts.method(m).name == facts.method(n).name,
            })
            .filter(|p| !cfg.require_name_match || p.name_match)
            .collect();
        if pairs.len() < cfg.min_redirectors {
            continue;
        }
        let declared = facts.methods_of(class);
        let eligible_count = declared.iter().filter(|&&m| eligible(&rel, filter, m)).count();
        let percentage =
            Fraction::new(pairs.len() as u64, eligible_count as u64).expect("pairs imply eligible methods");
        if !percentage.at_least(cfg.min_percentage) {
            continue;
        }
        out.push(RedirectionCandidate {
            redirector_class: facts.ty(class).id.clone(),
            target_class: facts.ty(target).id.clone(),
            pairs,
            class_method_count: eligible_count,
            declared_method_count: declared.len(),
            redirector_percentage: percentage,
        });
    }
    out.sort_by(|a, b| {
        b.pairs
            .len()
            .cmp(&a.pairs.len())
            .then_with(|| a.redirector_class.cmp(&b.redirector_class))
            .then_with(|| a.target_class.cmp(&b.target_class))
    });
    Ok(out)
}

/// Share of the reported pairs validated as redirectors.
pub fn redirection_seed_quality(
    c: &RedirectionCandidate,
    valid_pairs: &BTreeSet<RedirectionPair>,
) -> Result<Fraction, MetricError> {
    let reported: BTreeSet<&RedirectionPair> = c.pairs.iter().map(|p| &p.pair).collect();
    let mut valid = 0;
    for p in valid_pairs {
        if reported.contains(p) {
            valid += 1;
        } else {
            log::warn!(
                "pair {} -> {} is not part of candidate {} -> {}; ignored",
                p.redirector,
                p.target,
                c.redirector_class,
                c.target_class
            );
        }
    }
    Fraction::new(valid, reported.len() as u64).ok_or_else(|| {
        MetricError::DegenerateCandidate(format!(
            "redirection {} -> {} has no pairs",
            c.redirector_class, c.target_class
        ))
    })
}
