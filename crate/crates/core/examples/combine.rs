//! Intersection, caller refinement and union of technique results, scored
//! against the generator's ground truth.

use aspectmine::assess::{auto_label_from_ground_truth, compute_metrics, labeled_seeds};
use aspectmine::combine::{intersect_fanin_grouped, refine_report, union_seeds};
use aspectmine::concepts::GroupedCallsConfig;
use aspectmine::facts::FilterConfig;
use aspectmine::fanin::FanInConfig;
use aspectmine::forge::{generate, Background, CallPlant, CorpusSpec, PlantSpec};
use aspectmine::redirect::RedirectionConfig;
use aspectmine::Report;

fn main() -> Result<(), aspectmine::Error> {
    let mut observer = CallPlant::new(18, 6);
    observer.callees = 2;
    let mut checks = CallPlant::new(12, 0);
    checks.decoy_callees = 1;
    let spec = CorpusSpec {
        background: Background::default(),
        plants: vec![
            PlantSpec::ConsistentBehavior(observer),
            PlantSpec::ContractEnforcement(checks),
            PlantSpec::redirection(10, 12),
        ],
    };
    let corpus = generate(&spec, 2024)?;
    let call = FilterConfig::call_analysis_default();

    let fi = Report::fanin(&corpus.facts, &call, &FanInConfig::default())?;
    let gc = Report::grouped(&corpus.facts, &call, &GroupedCallsConfig::profile(2))?.with_name("grouped-p2");
    let rf = Report::redirections(
        &corpus.facts,
        &FilterConfig::redirection_default(),
        &RedirectionConfig::default(),
    )?;
    let both = intersect_fanin_grouped(&fi, &gc)?;
    let refined = refine_report(&fi, &gc)?;

    let mut seed_sets = Vec::new();
    for report in [&fi, &gc, &rf, &both, &refined] {
        let labels = auto_label_from_ground_truth(report, &corpus.truth)?;
        let m = compute_metrics(report, &labels);
        println!(
            "{:<16} precision {:<14} recall {}",
            report.name, m.precision_display, m.absolute_recall
        );
        if [&fi, &gc, &rf].iter().any(|r| r.name == report.name) {
            seed_sets.push((report.name.clone(), labeled_seeds(report, &labels)));
        }
    }
    let union = union_seeds(&seed_sets);
    println!(
        "union: {} distinct seeds from {} raw seeds",
        union.seed_count, union.raw_seed_count
    );
    Ok(())
}
