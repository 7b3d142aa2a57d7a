//! Generates a corpus from a JSON spec and writes the facts and ground
//! truth documents.
//!
//! cargo run --example corpus -- [OUT_DIR] [SEED]

use std::path::PathBuf;

use aspectmine::forge::{generate, CorpusSpec};

const SPEC: &str = r#"{
  "background": { "classes": 80, "methods_per_class": 8 },
  "plants": [
    { "sort": "ConsistentBehavior", "name": "observer", "concern_callers": 18, "noise_callers": 6, "callees": 2 },
    { "sort": "ContractEnforcement", "name": "contracts", "concern_callers": 12, "decoy_callees": 1 },
    { "sort": "RedirectionLayer", "name": "decorator", "pairs": 22, "eligible_methods": 22, "name_match_fraction": 0.5 }
  ]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(42);

    let spec = CorpusSpec::from_json(SPEC)?;
    let corpus = generate(&spec, seed)?;
    std::fs::create_dir_all(&out)?;
    aspectmine::report::write_atomic(&out.join("facts.json"), corpus.facts.to_canonical_json().as_bytes())?;
    aspectmine::report::write_atomic(&out.join("truth.json"), corpus.truth.to_json().as_bytes())?;
    println!(
        "{} types, {} methods, {} calls, fingerprint {}",
        corpus.facts.types().len(),
        corpus.facts.method_count(),
        corpus.facts.calls().len(),
        corpus.facts.fingerprint()
    );
    for c in &corpus.truth.concerns {
        println!(
            "  {} ({}): {} callers, {} pairs",
            c.name,
            c.sort,
            c.callers.len(),
            c.pairs.len()
        );
    }
    println!("written to {}", out.display());
    Ok(())
}
