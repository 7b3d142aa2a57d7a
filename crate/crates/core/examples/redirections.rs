//! Redirection finder on a planted decorator.

use aspectmine::facts::FilterConfig;
use aspectmine::forge::{generate, Background, CorpusSpec, PlantSpec, RedirectPlant};
use aspectmine::redirect::{mine_redirections, RedirectionConfig};

fn main() -> Result<(), aspectmine::Error> {
    let spec = CorpusSpec {
        background: Background::default(),
        plants: vec![
            PlantSpec::redirection(22, 22),
            PlantSpec::RedirectionLayer(RedirectPlant {
                name: Some("adapter".into()),
                pairs: 6,
                eligible_methods: 9,
                name_match_fraction: 0.0,
            }),
        ],
    };
    let corpus = generate(&spec, 3)?;
    let filter = FilterConfig::redirection_default();

    for name_match in [false, true] {
        let cfg = RedirectionConfig {
            require_name_match: name_match,
            ..RedirectionConfig::default()
        };
        println!("require_name_match = {name_match}");
        for c in mine_redirections(&corpus.facts, &filter, &cfg)? {
            println!(
                "  {} -> {}: {} pairs, {} of eligible methods",
                c.redirector_class,
                c.target_class,
                c.pairs.len(),
                c.redirector_percentage.display_with_counts()
            );
        }
    }
    Ok(())
}
