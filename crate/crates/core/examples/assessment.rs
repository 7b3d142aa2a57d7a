//! Labeling candidates by hand and by oracle, then computing metrics and
//! exporting them as CSV.

use aspectmine::assess::{auto_label_from_ground_truth, compute_metrics, write_metrics_csv, SeedLabel, Verdict};
use aspectmine::facts::{FilterConfig, Sort};
use aspectmine::fanin::FanInConfig;
use aspectmine::forge::{generate, Background, CallPlant, CorpusSpec, PlantSpec};
use aspectmine::{Catalog, Report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = CorpusSpec {
        background: Background::default(),
        plants: vec![PlantSpec::ConsistentBehavior(CallPlant::new(18, 6))],
    };
    let corpus = generate(&spec, 1)?;
    let report = Report::fanin(
        &corpus.facts,
        &FilterConfig::call_analysis_default(),
        &FanInConfig::default(),
    )?;

    let mut registry = auto_label_from_ground_truth(&report, &corpus.truth)?;
    let metrics = compute_metrics(&report, &registry);
    println!(
        "oracle: precision {}, recall {}",
        metrics.precision_display, metrics.absolute_recall
    );
    for (id, q) in &metrics.per_candidate_quality {
        println!("  {id}: quality {q}");
    }

    // An analyst revisits one verdict; seeds need a sort.
    let catalog = Catalog::from_reports([&report]);
    let first = &report.candidates[0].id;
    let rejected = registry.label(&catalog, SeedLabel::new(first.as_str(), Verdict::Seed));
    println!("seed without sort: {}", rejected.unwrap_err());
    let mut label = registry.get(first).cloned().expect("labeled by the oracle");
    label.sort = Some(Sort::ContractEnforcement);
    label.note = "checks precede the work".into();
    registry.label(&catalog, label)?;
    println!("history of {first}: {} labels", registry.history(first).len());

    write_metrics_csv(&report, &registry, std::io::stdout())?;
    Ok(())
}
