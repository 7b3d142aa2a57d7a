//! Combining techniques: intersection for precision, caller refinement for
//! seed quality, deduplicated union for absolute recall.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::concepts::ConceptCandidate;
use crate::facts::{Sort, SortFamily};
use crate::fanin::FanInCandidate;
use crate::report::{Candidate, Report, Technique};

#[derive(Debug, thiserror::Error)]
pub enum CombineError {
    #[error("reports come from different facts ({left} vs {right})")]
    FingerprintMismatch { left: String, right: String },
    #[error("report `{name}` holds {found} candidates, expected {expected}")]
    WrongTechnique {
        name: String,
        expected: Technique,
        found: Technique,
    },
    #[error("callee `{0}` occurs in no grouped-calls candidate")]
    NotRefinable(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Fanin,
    Grouped,
    Redirection,
    FaninGrouped,
    Refined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombinedCandidate {
    pub origin: Origin,
    pub callee_set: Vec<String>,
    pub callers: Vec<String>,
    /// Ids of the contributing raw candidates.
    pub provenance: Vec<String>,
}

/// Every callee occurring in some grouped-calls candidate. This is the one
/// membership test behind both intersection and view highlighting.
pub fn grouped_callees<'a>(gc: impl IntoIterator<Item = &'a ConceptCandidate>) -> BTreeSet<&'a str> {
    gc.into_iter()
        .flat_map(|c| c.callees.iter().map(String::as_str))
        .collect()
}

fn content_id(c: &ConceptCandidate) -> String {
    Candidate::Grouped(c.clone()).content_id()
}

/// Fan-in candidates whose callee is grouped by at least one concept.
/// Callers come from the fan-in candidate.
pub fn intersect_candidates(fi: &[FanInCandidate], gc: &[ConceptCandidate]) -> Vec<CombinedCandidate> {
    let grouped = grouped_callees(gc);
    fi.iter()
        .filter(|c| grouped.contains(c.callee.as_str()))
        .map(|c| {
            let mut provenance = vec![Candidate::Fanin(c.clone()).content_id()];
            provenance.extend(gc.iter().filter(|g| g.callees.contains(&c.callee)).map(content_id));
            CombinedCandidate {
                origin: Origin::FaninGrouped,
                callee_set: vec![c.callee.clone()],
                callers: c.callers.clone(),
                provenance,
            }
        })
        .collect()
}

fn check_pair(fi: &Report, gc: &Report) -> Result<(Vec<FanInCandidate>, Vec<ConceptCandidate>), CombineError> {
    if fi.fingerprint != gc.fingerprint {
        return Err(CombineError::FingerprintMismatch {
            left: fi.fingerprint.clone(),
            right: gc.fingerprint.clone(),
        });
    }
    for (report, expected) in [(fi, Technique::Fanin), (gc, Technique::Grouped)] {
        if report.technique != expected {
            return Err(CombineError::WrongTechnique {
                name: report.name.clone(),
                expected,
                found: report.technique,
            });
        }
    }
    Ok((
        fi.fanin_candidates().map(|(_, c)| c.clone()).collect(),
        gc.grouped_candidates().map(|(_, c)| c.clone()).collect(),
    ))
}

/// Intersection of a fan-in report with a grouped-calls report.
pub fn intersect_fanin_grouped(fi: &Report, gc: &Report) -> Result<Report, CombineError> {
    let (fic, gcc) = check_pair(fi, gc)?;
    let combined = intersect_candidates(&fic, &gcc);
    Ok(Report::new(
        format!("{}+{}", fi.name, gc.name),
        Technique::Combined,
        fi.fingerprint.clone(),
        serde_json::json!({ "mode": "intersect", "fanin": fi.config, "grouped": gc.config }),
        combined.into_iter().map(Candidate::Combined).collect(),
    ))
}

/// Replaces the fan-in callers with the extent of the concept containing the
/// callee whose callers overlap most with them. Ties go to the smaller
/// extent, then to the lower candidate id.
pub fn refine_callers(fi: &FanInCandidate, gc: &[ConceptCandidate]) -> Result<CombinedCandidate, CombineError> {
    let fi_callers: BTreeSet<&str> = fi.callers.iter().map(String::as_str).collect();
    let best = gc
        .iter()
        .filter(|g| g.callees.contains(&fi.callee))
        .map(|g| {
            let overlap = g.callers.iter().filter(|c| fi_callers.contains(c.as_str())).count();
            (overlap, g, content_id(g))
        })
        .max_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| b.1.callers.len().cmp(&a.1.callers.len()))
                .then_with(|| b.2.cmp(&a.2))
        });
    let Some((_, chosen, chosen_id)) = best else {
        return Err(CombineError::NotRefinable(fi.callee.clone()));
    };
    Ok(CombinedCandidate {
        origin: Origin::Refined,
        callee_set: vec![fi.callee.clone()],
        callers: chosen.callers.clone(),
        provenance: vec![Candidate::Fanin(fi.clone()).content_id(), chosen_id],
    })
}

/// Refines every fan-in candidate that occurs in a concept; the others are
/// dropped from the result.
pub fn refine_report(fi: &Report, gc: &Report) -> Result<Report, CombineError> {
    let (fic, gcc) = check_pair(fi, gc)?;
    let refined: Vec<Candidate> = fic
        .iter()
        .filter_map(|c| refine_callers(c, &gcc).ok())
        .map(Candidate::Combined)
        .collect();
    Ok(Report::new(
        format!("{}~{}", fi.name, gc.name),
        Technique::Combined,
        fi.fingerprint.clone(),
        serde_json::json!({ "mode": "refine", "fanin": fi.config, "grouped": gc.config }),
        refined,
    ))
}

/// What identifies a seed's concern.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedKey {
    Callees(Vec<String>),
    ClassPair {
        redirector_class: String,
        target_class: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledSeed {
    /// Report scope the seed came from.
    pub technique: String,
    pub candidate_id: String,
    pub sort: Sort,
    pub key: SeedKey,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionSeed {
    pub family: SortFamily,
    pub sorts: Vec<Sort>,
    pub key: SeedKey,
    /// Raw seeds merged into this one, as `(technique, candidate id)`.
    pub merged: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnionReport {
    pub techniques: Vec<String>,
    /// Absolute recall of the combination.
    pub seed_count: usize,
    pub raw_seed_count: usize,
    pub seeds: Vec<UnionSeed>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Union of labeled seeds. Seeds of the same sort family are one concern
/// when their callee sets intersect (transitively) or their class pairs match.
pub fn union_seeds(seed_sets: &[(String, Vec<LabeledSeed>)]) -> UnionReport {
    let mut seeds: Vec<&LabeledSeed> = seed_sets.iter().flat_map(|(_, s)| s.iter()).collect();
    seeds.sort();
    seeds.dedup_by(|a, b| a.technique == b.technique && a.candidate_id == b.candidate_id);

    let mut parent: Vec<usize> = (0..seeds.len()).collect();
    let mut owner: BTreeMap<(SortFamily, SeedKey), usize> = BTreeMap::new();
    for (i, s) in seeds.iter().enumerate() {
        let family = s.sort.family();
        let keys: Vec<SeedKey> = match &s.key {
            SeedKey::Callees(callees) => callees.iter().map(|c| SeedKey::Callees(vec![c.clone()])).collect(),
            pair @ SeedKey::ClassPair { .. } => vec![pair.clone()],
        };
        for k in keys {
            match owner.get(&(family, k.clone())) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    owner.insert((family, k), i);
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..seeds.len() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    let mut out: Vec<UnionSeed> = groups
        .into_values()
        .map(|members| {
            let first = seeds[members[0]];
            let key = match &first.key {
                SeedKey::Callees(_) => {
                    let all: BTreeSet<String> = members
                        .iter()
                        .flat_map(|&m| match &seeds[m].key {
                            SeedKey::Callees(c) => c.clone(),
                            SeedKey::ClassPair { .. } => Vec::new(),
                        })
                        .collect();
                    SeedKey::Callees(all.into_iter().collect())
                }
                pair => pair.clone(),
            };
            let sorts: BTreeSet<Sort> = members.iter().map(|&m| seeds[m].sort).collect();
            UnionSeed {
                family: first.sort.family(),
                sorts: sorts.into_iter().collect(),
                key,
                merged: members
                    .iter()
                    .map(|&m| (seeds[m].technique.clone(), seeds[m].candidate_id.clone()))
                    .collect(),
            }
        })
        .collect();
    out.sort_by(|a, b| (a.family, &a.key).cmp(&(b.family, &b.key)));

    let techniques: BTreeSet<String> = seed_sets.iter().map(|(t, _)| t.clone()).collect();
    UnionReport {
        techniques: techniques.into_iter().collect(),
        seed_count: out.len(),
        raw_seed_count: seeds.len(),
        seeds: out,
    }
}
