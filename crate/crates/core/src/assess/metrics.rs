use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::combine::{LabeledSeed, SeedKey};
use crate::concepts::grouped_seed_quality;
use crate::error::MetricError;
use crate::fanin::{count_members, fanin_seed_quality};
use crate::ratio::Fraction;
use crate::redirect::redirection_seed_quality;
use crate::report::{Candidate, Report};

use super::registry::{SeedLabel, SeedRegistry, Verdict};

/// Seed quality strictly above this percentage is accepted.
pub const ACCEPTANCE_BAR: u32 = 50;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub technique: String,
    pub candidate_count: usize,
    /// Seeds over all reported candidates; `None` when nothing was reported.
    pub precision: Option<Fraction>,
    /// `"30% (33/109)"`, or `"n/a"`.
    pub precision_display: String,
    pub absolute_recall: usize,
    pub per_candidate_quality: BTreeMap<String, Fraction>,
    pub acceptance_bar: u32,
}

/// Seed quality of a labeled candidate, by the formula of its technique.
pub fn candidate_quality(candidate: &Candidate, label: &SeedLabel) -> Result<Fraction, MetricError> {
    match candidate {
        Candidate::Fanin(c) => fanin_seed_quality(c, &label.valid_callers),
        Candidate::Grouped(c) => grouped_seed_quality(c, &label.valid_callers, &label.relevant_callees),
        Candidate::Redirection(c) => redirection_seed_quality(c, &label.valid_pairs),
        Candidate::Combined(c) => {
            let callers: BTreeSet<&str> = c.callers.iter().map(String::as_str).collect();
            let owner = c.callee_set.join(",");
            let valid = count_members(&callers, &label.valid_callers, &owner, "caller");
            Fraction::new(valid, callers.len() as u64).ok_or_else(|| {
                MetricError::DegenerateCandidate(format!("combined candidate {{{owner}}} has no callers"))
            })
        }
    }
}

/// Precision over every reported candidate (unlabeled and undecided count
/// as non-seeds), absolute recall, and quality of each labeled candidate.
pub fn compute_metrics(report: &Report, registry: &SeedRegistry) -> MetricsReport {
    let mut seeds = 0;
    let mut quality = BTreeMap::new();
    for entry in &report.candidates {
        let Some(label) = registry.get(&entry.id) else { continue };
        if label.verdict == Verdict::Seed {
            seeds += 1;
        }
        match candidate_quality(&entry.candidate, label) {
            Ok(q) => {
                quality.insert(entry.id.clone(), q);
            }
            Err(e) => log::warn!("{e}"),
        }
    }
    let precision = Fraction::new(seeds as u64, report.candidates.len() as u64);
    MetricsReport {
        technique: report.name.clone(),
        candidate_count: report.candidates.len(),
        precision,
        precision_display: precision.map_or_else(|| "n/a".to_string(), |p| p.display_with_counts()),
        absolute_recall: seeds,
        per_candidate_quality: quality,
        acceptance_bar: ACCEPTANCE_BAR,
    }
}

/// Seeds of `report` in the shape the union combination consumes. Grouped
/// seeds are keyed by their relevant callees when any are marked.
pub fn labeled_seeds(report: &Report, registry: &SeedRegistry) -> Vec<LabeledSeed> {
    report
        .candidates
        .iter()
        .filter_map(|entry| {
            let label = registry.get(&entry.id)?;
            if label.verdict != Verdict::Seed {
                return None;
            }
            let key = match &entry.candidate {
                Candidate::Redirection(r) => SeedKey::ClassPair {
                    redirector_class: r.redirector_class.clone(),
                    target_class: r.target_class.clone(),
                },
                Candidate::Grouped(g) if !label.relevant_callees.is_empty() => {
                    let own: BTreeSet<&String> = g.callees.iter().collect();
                    SeedKey::Callees(
                        label
                            .relevant_callees
                            .iter()
                            .filter(|c| own.contains(c))
                            .cloned()
                            .collect(),
                    )
                }
                other => SeedKey::Callees(other.callees().into_iter().map(str::to_string).collect()),
            };
            Some(LabeledSeed {
                technique: report.name.clone(),
                candidate_id: entry.id.clone(),
                sort: label.sort?,
                key,
            })
        })
        .collect()
}

/// CSV rows `technique,candidate_id,verdict,sort,quality` for every candidate.
pub fn write_metrics_csv<W: std::io::Write>(report: &Report, registry: &SeedRegistry, out: W) -> csv::Result<()> {
    let metrics = compute_metrics(report, registry);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["technique", "candidate_id", "verdict", "sort", "quality"])?;
    for entry in &report.candidates {
        let label = registry.get(&entry.id);
        let verdict = label.map_or(Verdict::Undecided, |l| l.verdict);
        let sort = label.and_then(|l| l.sort).map(|s| s.as_str()).unwrap_or("");
        let quality = metrics
            .per_candidate_quality
            .get(&entry.id)
            .map(|q| q.to_string())
            .unwrap_or_default();
        w.write_record([
            report.name.as_str(),
            entry.id.as_str(),
            verdict.as_str(),
            sort,
            quality.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
