use std::collections::BTreeSet;

use crate::forge::{GroundTruth, PlantedConcern};
use crate::ratio::Fraction;
use crate::redirect::RedirectionPair;
use crate::report::{Candidate, Report};

use super::metrics::{candidate_quality, ACCEPTANCE_BAR};
use super::registry::{SeedLabel, SeedRegistry, Verdict};
use super::LabelError;

fn overlap(members: &[String], truth: &[String]) -> BTreeSet<String> {
    let truth: BTreeSet<&String> = truth.iter().collect();
    members.iter().filter(|m| truth.contains(m)).cloned().collect()
}

fn call_label(id: &str, callers: &[String], callees: &[String], plant: &PlantedConcern) -> SeedLabel {
    let mut label = SeedLabel::new(id, Verdict::NonSeed).with_sort(plant.sort);
    label.valid_callers = overlap(callers, &plant.callers);
    label.relevant_callees = overlap(callees, &plant.callees);
    label.note = format!("planted concern {}", plant.name);
    label
}

fn pair_label(id: &str, pairs: &[RedirectionPair], plant: &PlantedConcern) -> SeedLabel {
    let mut label = SeedLabel::new(id, Verdict::NonSeed).with_sort(plant.sort);
    let truth: BTreeSet<&RedirectionPair> = plant.pairs.iter().collect();
    label.valid_pairs = pairs.iter().filter(|p| truth.contains(p)).cloned().collect();
    label.note = format!("planted concern {}", plant.name);
    label
}

/// Labels every candidate of `report` against the planted concerns: a
/// candidate is a seed when its best-matching plant gives it a seed quality
/// above the acceptance bar.
pub fn auto_label_from_ground_truth(report: &Report, truth: &GroundTruth) -> Result<SeedRegistry, LabelError> {
    if report.fingerprint != truth.fingerprint {
        return Err(LabelError::FingerprintMismatch {
            report: report.fingerprint.clone(),
            truth: truth.fingerprint.clone(),
        });
    }
    let mut registry = SeedRegistry::new();
    for entry in &report.candidates {
        let candidates: Vec<SeedLabel> = match &entry.candidate {
            Candidate::Redirection(r) => truth
                .concerns
                .iter()
                .filter(|p| {
                    p.redirector_class.as_deref() == Some(r.redirector_class.as_str())
                        && p.target_class.as_deref() == Some(r.target_class.as_str())
                })
                .map(|p| {
                    let pairs: Vec<RedirectionPair> = r.pairs.iter().map(|rp| rp.pair.clone()).collect();
                    pair_label(&entry.id, &pairs, p)
                })
                .collect(),
            other => {
                let callees: Vec<String> = other.callees().into_iter().map(str::to_string).collect();
                let callers: Vec<String> = other.callers().into_iter().map(str::to_string).collect();
                truth
                    .concerns
                    .iter()
                    .filter(|p| callees.iter().any(|c| p.callees.contains(c)))
                    .map(|p| call_label(&entry.id, &callers, &callees, p))
                    .collect()
            }
        };
        let mut best: Option<(SeedLabel, Fraction)> = None;
        for mut label in candidates {
            if !matches!(entry.candidate, Candidate::Grouped(_)) {
                label.relevant_callees.clear();
            }
            let Ok(q) = candidate_quality(&entry.candidate, &label) else {
                continue;
            };
            if best.as_ref().is_none_or(|(_, b)| q.cmp_value(b).is_gt()) {
                best = Some((label, q));
            }
        }
        let label = match best {
            Some((mut label, q)) => {
                if q.exceeds_percent(ACCEPTANCE_BAR) {
                    label.verdict = Verdict::Seed;
                } else {
                    label.sort = None;
                }
                label
            }
            None => SeedLabel::new(&entry.id, Verdict::NonSeed),
        };
        registry.insert_validated(label);
    }
    Ok(registry)
}
