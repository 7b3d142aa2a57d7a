//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero when any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use aspectmine::assess::{auto_label_from_ground_truth, candidate_quality, compute_metrics, labeled_seeds, Verdict};
use aspectmine::combine::{intersect_fanin_grouped, refine_report, union_seeds};
use aspectmine::concepts::{enumerate_concepts, mine_grouped, GroupedCallsConfig};
use aspectmine::facts::{FilterConfig, ProgramFacts};
use aspectmine::fanin::{mine_fanin, FanInConfig};
use aspectmine::forge::{generate, Background, CallPlant, Corpus, CorpusSpec, PlantSpec, RedirectPlant};
use aspectmine::redirect::RedirectionConfig;
use aspectmine::{Candidate, Fraction, Report};
use common::{brute_force_concepts, random_context, recorded, shuffled};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fca_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    let rounds = 250;
    let mut concepts = 0;
    for round in 0..rounds {
        let ctx = random_context(&mut rng, 12, 12);
        let expected = brute_force_concepts(&ctx, 1, 1);
        let got: BTreeSet<_> = enumerate_concepts(&ctx, &GroupedCallsConfig::with_thresholds(1, 1))
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|c| (c.callees, c.callers))
            .collect();
        ensure!(
            got == expected,
            "context #{round}: {} mined vs {} brute force",
            got.len(),
            expected.len()
        );
        concepts += got.len();
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{rounds} contexts, {concepts} concepts, {elapsed:.2?}"))
}

fn call_plant(concern: usize, noise: usize, callees: usize) -> CallPlant {
    let mut p = CallPlant::new(concern, noise);
    p.callees = callees;
    p
}

fn corpus(plants: Vec<PlantSpec>, seed: u64) -> Result<Corpus, String> {
    generate(
        &CorpusSpec {
            background: Background::default(),
            plants,
        },
        seed,
    )
    .map_err(|e| e.to_string())
}

fn planted_fanin() -> Outcome {
    let corpus = corpus(vec![PlantSpec::ConsistentBehavior(call_plant(18, 6, 1))], 18)?;
    let callee = &corpus.truth.concerns[0].callees[0];
    let report = Report::fanin(
        &corpus.facts,
        &FilterConfig::call_analysis_default(),
        &FanInConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let Some((id, c)) = report.fanin_candidates().find(|(_, c)| &c.callee == callee) else {
        return Err(format!("{callee} not reported"));
    };
    ensure!(c.caller_count == 24, "{} callers", c.caller_count);
    let labels = auto_label_from_ground_truth(&report, &corpus.truth).map_err(|e| e.to_string())?;
    let label = labels.get(id).ok_or("unlabeled")?;
    let q = candidate_quality(report.get(id).unwrap(), label).map_err(|e| e.to_string())?;
    ensure!(
        q.same_value(&Fraction::new(3, 4).unwrap()),
        "quality {}",
        q.display_with_counts()
    );
    ensure!(label.verdict == Verdict::Seed, "verdict {:?}", label.verdict);
    Ok(format!("24 callers, quality {}", q.display_with_counts()))
}

fn planted_redirection() -> Outcome {
    let corpus = corpus(vec![PlantSpec::redirection(22, 22)], 22)?;
    let report = Report::redirections(
        &corpus.facts,
        &FilterConfig::redirection_default(),
        &RedirectionConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure!(report.candidates.len() == 1, "{} candidates", report.candidates.len());
    let entry = &report.candidates[0];
    let Candidate::Redirection(r) = &entry.candidate else {
        unreachable!()
    };
    ensure!(r.pairs.len() == 22, "{} pairs", r.pairs.len());
    ensure!(
        r.redirector_percentage.same_value(&Fraction::one()),
        "percentage {}",
        r.redirector_percentage
    );
    let labels = auto_label_from_ground_truth(&report, &corpus.truth).map_err(|e| e.to_string())?;
    let q =
        candidate_quality(&entry.candidate, labels.get(&entry.id).ok_or("unlabeled")?).map_err(|e| e.to_string())?;
    ensure!(q.same_value(&Fraction::one()), "quality {q}");
    Ok(format!(
        "1 candidate, 22 pairs, percentage {}, quality {q}",
        r.redirector_percentage
    ))
}

fn metric_fixtures() -> Outcome {
    let rec = recorded::load_committed();
    let mut shown = Vec::new();
    for (scope, display) in [
        ("fanin", "30% (33/109)"),
        ("grouped-p1", "45% (5/11)"),
        ("grouped-p2", "55% (12/22)"),
        ("redirection", "92% (12/13)"),
        ("fanin+grouped-p1", "41% (7/17)"),
    ] {
        let m = compute_metrics(rec.report(scope), &rec.labels);
        ensure!(
            m.precision_display == display,
            "{scope}: {} != {display}",
            m.precision_display
        );
        shown.push(display.split(' ').next().unwrap());
    }
    let sets: Vec<_> = ["fanin", "grouped-p2", "redirection"]
        .iter()
        .map(|s| (s.to_string(), labeled_seeds(rec.report(s), &rec.labels)))
        .collect();
    let union = union_seeds(&sets);
    ensure!(union.seed_count == 51, "union {}", union.seed_count);
    Ok(format!("{}, union 51", shown.join(" ")))
}

fn combination_spec(rng: &mut ChaCha8Rng) -> Vec<PlantSpec> {
    let mut plants = Vec::new();
    for _ in 0..rng.gen_range(2..5) {
        let mut p = call_plant(rng.gen_range(8..22), rng.gen_range(0..8), rng.gen_range(1..4));
        p.decoy_callees = rng.gen_range(0..2);
        p.accessor_callees = rng.gen_range(0..2);
        plants.push(if rng.gen_bool(0.5) {
            PlantSpec::ConsistentBehavior(p)
        } else {
            PlantSpec::ContractEnforcement(p)
        });
    }
    let pairs = rng.gen_range(3..12);
    plants.push(PlantSpec::RedirectionLayer(RedirectPlant {
        name: None,
        pairs,
        eligible_methods: pairs + rng.gen_range(0..4),
        name_match_fraction: 0.5,
    }));
    plants
}

fn combination_properties() -> Outcome {
    let filter = FilterConfig::call_analysis_default();
    let mut checked = 0;
    let mut violations = Vec::new();
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let corpus = corpus(combination_spec(&mut rng), seed)?;
        let fi = Report::fanin(&corpus.facts, &filter, &FanInConfig::default()).map_err(|e| e.to_string())?;
        let gc = Report::grouped(&corpus.facts, &filter, &GroupedCallsConfig::profile(1)).map_err(|e| e.to_string())?;
        let both = intersect_fanin_grouped(&fi, &gc).map_err(|e| e.to_string())?;

        let fi_callees: BTreeSet<&str> = fi.fanin_candidates().map(|(_, c)| c.callee.as_str()).collect();
        let both_callees: BTreeSet<&str> = both.candidates.iter().flat_map(|e| e.candidate.callees()).collect();
        ensure!(
            both_callees.is_subset(&fi_callees),
            "corpus {seed}: intersection leaves the fan-in result"
        );

        let refined = refine_report(&fi, &gc).map_err(|e| e.to_string())?;
        for e in &refined.candidates {
            let Candidate::Combined(c) = &e.candidate else {
                unreachable!()
            };
            let Some(Candidate::Grouped(chosen)) = gc.get(&c.provenance[1]) else {
                return Err(format!("corpus {seed}: refined candidate without its concept"));
            };
            let extent: BTreeSet<&String> = chosen.callers.iter().collect();
            ensure!(
                c.callers.iter().all(|x| extent.contains(x)),
                "corpus {seed}: refined callers leave the extent"
            );
            ensure!(
                c.callee_set.len() == 1 && chosen.callees.contains(&c.callee_set[0]),
                "corpus {seed}: callee changed"
            );
        }

        let planted_in_fi: BTreeSet<&str> = corpus
            .truth
            .concerns
            .iter()
            .flat_map(|p| p.callees.iter().map(String::as_str))
            .filter(|c| fi_callees.contains(c))
            .collect();
        if both.candidates.is_empty() || !planted_in_fi.is_subset(&both_callees) {
            continue;
        }
        checked += 1;
        let p_fi = compute_metrics(
            &fi,
            &auto_label_from_ground_truth(&fi, &corpus.truth).map_err(|e| e.to_string())?,
        );
        let p_both = compute_metrics(
            &both,
            &auto_label_from_ground_truth(&both, &corpus.truth).map_err(|e| e.to_string())?,
        );
        let (a, b) = (p_fi.precision.unwrap(), p_both.precision.unwrap());
        if b.cmp_value(&a).is_lt() {
            violations.push(format!(
                "corpus {seed}: {} < {}",
                p_both.precision_display, p_fi.precision_display
            ));
        }
    }
    ensure!(checked > 0, "no corpus kept every plant through the intersection");
    ensure!(
        violations.is_empty(),
        "{} precision violations: {}",
        violations.len(),
        violations.join("; ")
    );
    Ok(format!(
        "50 corpora, subset and extent always hold, precision checked on {checked}, 0 violations"
    ))
}

fn grouped_quality_product() -> Outcome {
    let mut plant = call_plant(14, 0, 1);
    plant.decoy_callees = 1;
    let corpus = corpus(vec![PlantSpec::ContractEnforcement(plant)], 14)?;
    let report = Report::grouped(
        &corpus.facts,
        &FilterConfig::call_analysis_default(),
        &GroupedCallsConfig::profile(1),
    )
    .map_err(|e| e.to_string())?;
    let check = &corpus.truth.concerns[0].callees[0];
    let Some((id, c)) = report.grouped_candidates().find(|(_, c)| c.callees.contains(check)) else {
        return Err("planted concept not reported".into());
    };
    ensure!(
        c.callees.len() == 2 && c.callers.len() == 14,
        "{}x{} concept",
        c.callers.len(),
        c.callees.len()
    );
    let labels = auto_label_from_ground_truth(&report, &corpus.truth).map_err(|e| e.to_string())?;
    let label = labels.get(id).ok_or("unlabeled")?;
    ensure!(
        label.valid_callers.len() == 14 && label.relevant_callees.len() == 1,
        "unexpected marks"
    );
    let q = candidate_quality(report.get(id).unwrap(), label).map_err(|e| e.to_string())?;
    ensure!(q.same_value(&Fraction::new(1, 2).unwrap()), "quality {q}");
    ensure!(label.verdict == Verdict::NonSeed, "accepted at {q}");
    Ok(format!("quality {q} (14/14 x 1/2), rejected"))
}

fn all_outputs(facts: &ProgramFacts) -> Result<Vec<String>, String> {
    let call = FilterConfig::call_analysis_default();
    let fi = Report::fanin(facts, &call, &FanInConfig::default()).map_err(|e| e.to_string())?;
    let gc = Report::grouped(facts, &call, &GroupedCallsConfig::profile(2)).map_err(|e| e.to_string())?;
    let rf = Report::redirections(
        facts,
        &FilterConfig::redirection_default(),
        &RedirectionConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let both = intersect_fanin_grouped(&fi, &gc).map_err(|e| e.to_string())?;
    let refined = refine_report(&fi, &gc).map_err(|e| e.to_string())?;
    Ok(vec![
        facts.to_canonical_json(),
        fi.to_json(),
        gc.to_json(),
        rf.to_json(),
        both.to_json(),
        refined.to_json(),
    ])
}

fn determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let spec = CorpusSpec {
        background: Background::default(),
        plants: combination_spec(&mut rng),
    };
    let a = generate(&spec, 77).map_err(|e| e.to_string())?;
    let b = generate(&spec, 77).map_err(|e| e.to_string())?;
    ensure!(a.truth.to_json() == b.truth.to_json(), "truth differs across runs");
    let reference = all_outputs(&a.facts)?;
    ensure!(reference == all_outputs(&b.facts)?, "outputs differ across runs");
    let doc = a.facts.to_document();
    for shuffle in 0..5 {
        let text = serde_json::to_string(&shuffled(&doc, shuffle)).map_err(|e| e.to_string())?;
        let facts = ProgramFacts::from_json(&text).map_err(|e| e.to_string())?;
        ensure!(
            all_outputs(&facts)? == reference,
            "shuffle {shuffle} changes the output"
        );
    }
    let labels = auto_label_from_ground_truth(&Report::from_json(&reference[1]).unwrap(), &a.truth)
        .map_err(|e| e.to_string())?;
    let again = auto_label_from_ground_truth(&Report::from_json(&reference[1]).unwrap(), &b.truth)
        .map_err(|e| e.to_string())?;
    ensure!(labels.to_json() == again.to_json(), "labels differ");
    Ok(format!(
        "generator, 5 analyses and labels stable over 2 runs and 5 shuffles ({} bytes)",
        reference.concat().len()
    ))
}

fn timed_mining(facts: &ProgramFacts, label: &str) -> Outcome {
    let (methods, edges) = (facts.method_count(), facts.calls().len());
    ensure!(
        methods == 6000 && edges == 30000,
        "{label}: {methods} methods, {edges} edges"
    );
    let filter = FilterConfig::call_analysis_default();

    let start = Instant::now();
    let fi = mine_fanin(facts, &filter, &FanInConfig::default()).map_err(|e| e.to_string())?;
    let fanin_time = start.elapsed();
    ensure!(
        fanin_time < Duration::from_secs(10),
        "{label}: fan-in took {fanin_time:?}"
    );

    let start = Instant::now();
    let gc = mine_grouped(facts, &filter, &GroupedCallsConfig::profile(1)).map_err(|e| e.to_string())?;
    let concept_time = start.elapsed();
    ensure!(
        concept_time < Duration::from_secs(600),
        "{label}: concepts took {concept_time:?}"
    );
    Ok(format!(
        "{label} fan-in {fanin_time:.2?} ({} candidates), concepts {concept_time:.2?} ({} concepts)",
        fi.len(),
        gc.len()
    ))
}

fn performance() -> Outcome {
    let spec = CorpusSpec {
        background: Background {
            classes: 600,
            methods_per_class: 10,
            calls_per_method: 5.0,
            test_classes: 0,
            wrapper_classes: 0,
            ..Background::default()
        },
        plants: Vec::new(),
    };
    let uniform = generate(&spec, 6000).map_err(|e| e.to_string())?;
    let skewed = common::skewed_facts(6000, 600, 10, 30000, 1.0);
    Ok(format!(
        "6000 methods, 30000 edges; {}; {}",
        timed_mining(&uniform.facts, "uniform:")?,
        timed_mining(&skewed, "heavy-tailed:")?
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("concept enumeration equals brute force", fca_oracle),
        ("planted fan-in 18+6 callers", planted_fanin),
        ("planted redirection 22/22", planted_redirection),
        ("precision displays and union", metric_fixtures),
        ("combination properties", combination_properties),
        ("grouped quality product at the bar", grouped_quality_product),
        ("determinism", determinism),
        ("performance guardrail", performance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
