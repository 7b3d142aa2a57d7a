//! Fan-in analysis over a generated system with one planted concern.

use aspectmine::facts::FilterConfig;
use aspectmine::fanin::{fan_in, mine_fanin, FanInConfig};
use aspectmine::forge::{generate, Background, CallPlant, CorpusSpec, PlantSpec};

fn main() -> Result<(), aspectmine::Error> {
    env_logger::init();
    let spec = CorpusSpec {
        background: Background::default(),
        plants: vec![PlantSpec::ConsistentBehavior(CallPlant::new(18, 6))],
    };
    let corpus = generate(&spec, 42)?;
    let filter = FilterConfig::call_analysis_default();

    let candidates = mine_fanin(&corpus.facts, &filter, &FanInConfig::default())?;
    println!("{} candidates at threshold 10", candidates.len());
    for c in candidates.iter().take(5) {
        println!(
            "  {:<50} callers {:>3}  sites {:>3}",
            c.callee, c.caller_count, c.call_site_count
        );
    }

    let planted = &corpus.truth.concerns[0].callees[0];
    let m = fan_in(&corpus.facts, &filter, planted)?;
    println!(
        "{planted}: {} callers over {} call sites",
        m.caller_count, m.call_site_count
    );
    Ok(())
}
