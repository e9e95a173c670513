//! Translate a toy aviation topic model from English to German, following
//! the candidate → re-translation → voting → refinement → assembly →
//! normalization pipeline step by step.
//!
//! Run: `cargo run --example translate_model`

use std::collections::BTreeSet;
use std::num::NonZeroUsize;

use crosstopic::lexicon::BilingualLexicon;
use crosstopic::topic_model::{Topic, TopicModel};
use crosstopic::translator::{translate_topic, translate_topic_model, TranslationConfig};
use crosstopic::voting::{VotingFamily, VotingModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // One aviation topic. Probabilities follow the worked example:
    // plane 0.019 at rank 1, aircraft 0.018 at rank 2, and so on.
    let topic = Topic::new(
        [
            ("plane", 0.019),
            ("airship", 0.019),
            ("aircraft", 0.018),
            ("airplane", 0.012),
            ("area", 0.011),
            ("airfoil", 0.010),
            ("wing", 0.009),
            ("craft", 0.006),
            ("flyer", 0.003),
            ("surface", 0.002),
            ("plain", 0.001),
        ]
        .map(|(w, s)| (w.to_string(), s)),
    )?;
    let vocabulary: BTreeSet<String> =
        topic.ranked_words().map(|(w, _)| w.to_string()).collect();
    let model = TopicModel::new(vec![topic], vocabulary, "en")?;

    let mut lexicon = BilingualLexicon::new();
    for (en, de) in [
        ("plane", "flugzeug"),
        ("plane", "fläche"),
        ("plane", "flieger"),
        ("plane", "tragfläche"),
        ("aircraft", "flugzeug"),
        ("aircraft", "flieger"),
        ("aircraft", "luftfahrzeug"),
        ("airplane", "flugzeug"),
        ("airplane", "flieger"),
        ("airship", "luftfahrzeug"),
        ("flyer", "flieger"),
        ("area", "fläche"),
        ("surface", "fläche"),
        ("plain", "fläche"),
        ("airfoil", "tragfläche"),
        ("wing", "tragfläche"),
        ("craft", "luftfahrzeug"),
    ] {
        lexicon.insert_pair(en, de);
    }

    // CombSUM over the four strongest voters, keep the three best
    // candidates per source word.
    let cfg = TranslationConfig {
        n_best: NonZeroUsize::new(3),
        ..TranslationConfig::new(VotingModelSpec::new(VotingFamily::CombSum).with_top(4))
    };

    // Single-topic view: raw aggregated scores before any normalization.
    let raw = translate_topic(model.topic(0), model.vocabulary(), &lexicon, &cfg);
    println!("aggregated candidate scores (unnormalized):");
    let mut ranked: Vec<(&String, &f64)> = raw.iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(a.1));
    for (word, score) in &ranked {
        println!("  {word:<14} {score:.3}");
    }
    // "flieger" beats "flugzeug": it collects the voters of plane, aircraft
    // and airplane plus flyer, while "fläche" (0.033) was dropped from
    // plane's top three and only re-enters through area/surface/plain.

    // Full-model translation: vocabulary union, ε fallback for missing
    // words, per-topic normalization.
    let translated = translate_topic_model(&model, &lexicon, &cfg)?;
    println!("\nnormalized German topic:");
    for (word, score) in translated.model.topic(0).ranked_words() {
        println!("  {word:<14} {score:.4}");
    }

    // Provenance records which source words produced each translation.
    println!("\nprovenance of flieger:");
    for contribution in &translated.provenance[0]["flieger"] {
        println!(
            "  from {:<10} score {:.3} ({} voters)",
            contribution.source_word, contribution.score, contribution.voter_count
        );
    }
    Ok(())
}
