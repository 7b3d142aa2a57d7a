//! Grouped calls: concepts of the caller/callee relation, with accessor
//! callees hidden from the displayed intent.

use aspectmine::concepts::{build_context, enumerate_concepts, mine_grouped, GroupedCallsConfig};
use aspectmine::facts::FilterConfig;
use aspectmine::forge::{generate, Background, CallPlant, CorpusSpec, PlantSpec};

fn main() -> Result<(), aspectmine::Error> {
    let mut plant = CallPlant::new(14, 0);
    plant.callees = 2;
    plant.decoy_callees = 1;
    plant.accessor_callees = 1;
    let spec = CorpusSpec {
        background: Background::default(),
        plants: vec![PlantSpec::ContractEnforcement(plant)],
    };
    let corpus = generate(&spec, 7)?;
    let filter = FilterConfig::call_analysis_default();

    let ctx = build_context(&corpus.facts, &filter);
    println!(
        "context: {} callers x {} callees, {} incidences",
        ctx.objects().len(),
        ctx.attributes().len(),
        ctx.incidence_count()
    );
    let all = enumerate_concepts(&ctx, &GroupedCallsConfig::with_thresholds(2, 1))?;
    println!("{} concepts with at least 2 callers", all.len());

    for profile in [1, 2] {
        let found = mine_grouped(&corpus.facts, &filter, &GroupedCallsConfig::profile(profile))?;
        println!("profile {profile}: {} candidates", found.len());
        for c in &found {
            println!("  {} callers -> {:?}", c.callers.len(), c.callees);
            println!("  extended callees {:?}", c.extended_callees);
        }
    }
    Ok(())
}
