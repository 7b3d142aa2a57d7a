//! Recorded evaluation of a mid-sized system: reports of every technique
//! with analyst labels, reduced to the element ids the metrics need.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use aspectmine::assess::{SeedLabel, SeedRegistry, Verdict};
use aspectmine::combine::intersect_fanin_grouped;
use aspectmine::concepts::ConceptCandidate;
use aspectmine::facts::Sort;
use aspectmine::fanin::FanInCandidate;
use aspectmine::ratio::Fraction;
use aspectmine::redirect::{RedirectionCandidate, RedirectionPair, ReportedPair};
use aspectmine::report::{Candidate, Report, Technique};

pub const FINGERPRINT: &str = "recorded-study";
pub const SCOPES: [&str; 5] = ["fanin", "grouped-p1", "grouped-p2", "redirection", "fanin+grouped-p1"];

pub struct Recorded {
    pub reports: Vec<Report>,
    pub labels: SeedRegistry,
}

impl Recorded {
    pub fn report(&self, name: &str) -> &Report {
        self.reports.iter().find(|r| r.name == name).expect("known scope")
    }
}

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/recorded")
}

fn service(i: usize) -> String {
    format!("app.fx.Service{i:03}.handle")
}

fn service_index(id: &str) -> usize {
    id["app.fx.Service".len()..][..3].parse().unwrap()
}

fn clients(from: usize, count: usize) -> Vec<String> {
    (from..from + count)
        .map(|j| format!("app.fx.Client{j:03}.run"))
        .collect()
}

fn call_sort(i: usize) -> Sort {
    if i.is_multiple_of(2) {
        Sort::ConsistentBehavior
    } else {
        Sort::ContractEnforcement
    }
}

fn concept(callees: Vec<String>, callers: Vec<String>) -> ConceptCandidate {
    let mut callees = callees;
    callees.sort();
    ConceptCandidate {
        extended_callees: callees.clone(),
        extended_callers: callers.clone(),
        callees,
        callers,
    }
}

fn seed(id: &str, sort: Sort, candidate: &Candidate) -> SeedLabel {
    let mut l = SeedLabel::new(id, Verdict::Seed).with_sort(sort);
    l.valid_callers = candidate.callers().into_iter().map(str::to_string).collect();
    l
}

/// Rebuilds the recorded reports and labels from their compact description.
pub fn build() -> Recorded {
    let mut labels = SeedRegistry::new();

    // 109 fan-in candidates; the first 33 are seeds.
    let mut fi: Vec<FanInCandidate> = (0..109)
        .map(|i| {
            let callers = clients(i % 40, 10 + i % 7);
            FanInCandidate {
                callee: service(i),
                call_site_count: callers.len() + i % 3,
                caller_count: callers.len(),
                callers,
            }
        })
        .collect();
    fi.sort_by(|a, b| {
        b.caller_count
            .cmp(&a.caller_count)
            .then_with(|| a.callee.cmp(&b.callee))
    });
    let fanin = Report::new(
        "fanin",
        Technique::Fanin,
        FINGERPRINT,
        serde_json::json!({ "fanin": { "min_callers": 10 } }),
        fi.into_iter().map(Candidate::Fanin).collect(),
    );
    for e in &fanin.candidates {
        let Candidate::Fanin(c) = &e.candidate else {
            unreachable!()
        };
        let i = service_index(&c.callee);
        let label = if i < 33 {
            seed(&e.id, call_sort(i), &e.candidate)
        } else {
            SeedLabel::new(&e.id, Verdict::NonSeed)
        };
        labels.insert(label);
    }

    // Profile 1: 11 concepts grouping 17 fan-in callees, 5 seeds.
    let grouped_fi: Vec<usize> = (0..7).chain(50..60).collect();
    let p1: Vec<ConceptCandidate> = (0..11)
        .map(|k| {
            let callees = if k < 6 {
                vec![service(grouped_fi[2 * k]), service(grouped_fi[2 * k + 1])]
            } else {
                vec![service(grouped_fi[6 + k]), format!("app.fx.Helper{k:02}.aux")]
            };
            concept(callees, clients(k, 10 + k % 3))
        })
        .collect();
    let grouped_p1 = Report::new(
        "grouped-p1",
        Technique::Grouped,
        FINGERPRINT,
        serde_json::json!({ "grouped": { "min_callers": 10, "min_callees": 2 } }),
        p1.into_iter().map(Candidate::Grouped).collect(),
    );
    for (k, e) in grouped_p1.candidates.iter().enumerate() {
        let label = if k < 5 {
            let mut l = seed(&e.id, call_sort(k), &e.candidate);
            l.relevant_callees = e.candidate.callees().into_iter().take(1).map(str::to_string).collect();
            l
        } else {
            SeedLabel::new(&e.id, Verdict::NonSeed)
        };
        labels.insert(label);
    }

    // Profile 2: 22 concepts, 12 seeds; the first 6 seeds share a callee
    // with a fan-in seed.
    let p2: Vec<ConceptCandidate> = (0..22)
        .map(|k| {
            let bus = format!("app.fx.Bus{k:02}.publish");
            let callees = if k < 6 {
                vec![service(k), bus]
            } else {
                vec![bus, format!("app.fx.Bus{k:02}.flush")]
            };
            concept(callees, clients(2 * k, 7 + k % 4))
        })
        .collect();
    let grouped_p2 = Report::new(
        "grouped-p2",
        Technique::Grouped,
        FINGERPRINT,
        serde_json::json!({ "grouped": { "min_callers": 7, "min_callees": 2 } }),
        p2.into_iter().map(Candidate::Grouped).collect(),
    );
    for (k, e) in grouped_p2.candidates.iter().enumerate() {
        let label = if k < 12 {
            let mut l = seed(&e.id, call_sort(k), &e.candidate);
            let relevant = if k < 6 {
                service(k)
            } else {
                format!("app.fx.Bus{k:02}.publish")
            };
            l.relevant_callees = BTreeSet::from([relevant]);
            l
        } else {
            SeedLabel::new(&e.id, Verdict::NonSeed)
        };
        labels.insert(label);
    }

    // 13 redirection candidates, 12 seeds.
    let rf: Vec<RedirectionCandidate> = (0..13)
        .map(|k| {
            let c = format!("app.fx.Decorator{k:02}");
            let d = format!("app.fx.Figure{k:02}");
            let n = 3 + k;
            RedirectionCandidate {
                pairs: (0..n)
                    .map(|i| ReportedPair {
                        pair: RedirectionPair {
                            redirector: format!("{c}.op{i:02}"),
                            target: format!("{d}.op{i:02}"),
                        },
                        name_match: true,
                    })
                    .collect(),
                redirector_class: c,
                target_class: d,
                class_method_count: n + 1,
                declared_method_count: n + 2,
                redirector_percentage: Fraction::new(n as u64, n as u64 + 1).unwrap(),
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    let redirection = Report::new(
        "redirection",
        Technique::Redirection,
        FINGERPRINT,
        serde_json::json!({ "redirection": { "min_redirectors": 3, "min_percentage": 0.5 } }),
        rf.into_iter().map(Candidate::Redirection).collect(),
    );
    for (k, e) in redirection.candidates.iter().enumerate() {
        let label = if k < 12 {
            let mut l = SeedLabel::new(&e.id, Verdict::Seed).with_sort(Sort::RedirectionLayer);
            let Candidate::Redirection(r) = &e.candidate else {
                unreachable!()
            };
            l.valid_pairs = r.pairs.iter().map(|p| p.pair.clone()).collect();
            l
        } else {
            SeedLabel::new(&e.id, Verdict::NonSeed)
        };
        labels.insert(label);
    }

    // Intersection of fan-in with profile 1: 17 candidates, 7 seeds.
    let combined = intersect_fanin_grouped(&fanin, &grouped_p1).expect("same fingerprint");
    for e in &combined.candidates {
        let callee = e.candidate.callees()[0].to_string();
        let i = service_index(&callee);
        let label = if i < 33 {
            seed(&e.id, call_sort(i), &e.candidate)
        } else {
            SeedLabel::new(&e.id, Verdict::NonSeed)
        };
        labels.insert(label);
    }

    Recorded {
        reports: vec![fanin, grouped_p1, grouped_p2, redirection, combined],
        labels,
    }
}

trait Insert {
    fn insert(&mut self, label: SeedLabel);
}

impl Insert for SeedRegistry {
    fn insert(&mut self, label: SeedLabel) {
        self.labels.insert(label.candidate_id.clone(), label.clone());
        self.history.entry(label.candidate_id.clone()).or_default().push(label);
    }
}

fn file_name(scope: &str) -> String {
    format!("{}.json", scope.replace('+', "_and_"))
}

/// Writes the fixture files.
pub fn write(rec: &Recorded, dir: &Path) {
    std::fs::create_dir_all(dir).unwrap();
    for r in &rec.reports {
        r.save(&dir.join(file_name(&r.name))).unwrap();
    }
    rec.labels.save(&dir.join("labels.json")).unwrap();
}

/// Loads the fixture files.
pub fn load(dir: &Path) -> Recorded {
    Recorded {
        reports: SCOPES
            .iter()
            .map(|s| Report::load(&dir.join(file_name(s))).unwrap())
            .collect(),
        labels: SeedRegistry::load(&dir.join("labels.json")).unwrap(),
    }
}

/// Loads the committed fixtures, first rewriting them when
/// `AMINE_REGENERATE_FIXTURES` is set.
pub fn load_committed() -> Recorded {
    if std::env::var_os("AMINE_REGENERATE_FIXTURES").is_some() {
        write(&build(), &dir());
    }
    load(&dir())
}
