//! The Plain baseline next to a voting translation on the same input.
//!
//! Plain assigns the source word's probability to every translation, so all
//! candidates tie and a top-n cutoff can only pick at random. The voting
//! translation separates aviation words from the homonym noise.
//!
//! Run: `cargo run --example plain_baseline`

use std::collections::BTreeSet;
use std::num::NonZeroUsize;

use crosstopic::lexicon::BilingualLexicon;
use crosstopic::topic_model::{Topic, TopicModel};
use crosstopic::translator::{
    translate_plain, translate_topic_model, KeepOriginPolicy, TranslationConfig,
};
use crosstopic::voting::{VotingFamily, VotingModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let topic = Topic::new(
        [
            ("plane", 0.019),
            ("aircraft", 0.018),
            ("airplane", 0.012),
            ("area", 0.011),
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
        // "plane" fans out into aviation, geometry and mining senses.
        ("plane", "flugzeug"),
        ("plane", "flieger"),
        ("plane", "fläche"),
        ("plane", "ebene"),
        ("plane", "bremsberg"),
        ("aircraft", "flugzeug"),
        ("aircraft", "flieger"),
        ("airplane", "flugzeug"),
        ("airplane", "flieger"),
        ("area", "fläche"),
        ("surface", "fläche"),
        ("plain", "ebene"),
        ("plain", "fläche"),
    ] {
        lexicon.insert_pair(en, de);
    }

    let voting = translate_topic_model(
        &model,
        &lexicon,
        &TranslationConfig::new(VotingModelSpec::new(VotingFamily::CombSum)),
    )?;
    let plain = translate_plain(&model, &lexicon, None, KeepOriginPolicy::Never, 7)?;

    println!("{:<12} {:>10} {:>10}", "word", "combsum", "plain");
    for (word, score) in voting.model.topic(0).ranked_words() {
        let p = plain.model.topic(0).score(word).unwrap_or(0.0);
        println!("{word:<12} {score:>10.4} {p:>10.4}");
    }
    // Under Plain, "bremsberg" (a mining term reached only through the
    // homonym "plane") carries the same weight as "flugzeug"; CombSUM ranks
    // it far below because it has a single voter.

    // With a top-n cutoff Plain picks candidates at random; the seed makes
    // the choice reproducible.
    let once = translate_plain(&model, &lexicon, NonZeroUsize::new(2), KeepOriginPolicy::Never, 7)?;
    let again = translate_plain(&model, &lexicon, NonZeroUsize::new(2), KeepOriginPolicy::Never, 7)?;
    assert_eq!(once.model, again.model);
    let other_seed =
        translate_plain(&model, &lexicon, NonZeroUsize::new(2), KeepOriginPolicy::Never, 8)?;
    println!(
        "\nplain top-2, seed 7 picks for plane: {:?}",
        once.provenance[0]
            .iter()
            .filter(|(_, c)| c.iter().any(|s| s.source_word == "plane"))
            .map(|(w, _)| w.as_str())
            .collect::<Vec<_>>()
    );
    println!(
        "plain top-2, seed 8 picks for plane: {:?}",
        other_seed.provenance[0]
            .iter()
            .filter(|(_, c)| c.iter().any(|s| s.source_word == "plane"))
            .map(|(w, _)| w.as_str())
            .collect::<Vec<_>>()
    );
    Ok(())
}
