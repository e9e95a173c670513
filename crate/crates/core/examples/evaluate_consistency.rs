//! Measure source/target consistency on aligned document pairs.
//!
//! Builds a small bilingual world with a noisy lexicon, translates the
//! English model two ways and compares how well each translation ranks the
//! same topics as the original over aligned pairs (NDCG@3 and top-3
//! overlap).
//!
//! Run: `cargo run --release --example evaluate_consistency`

use std::num::NonZeroUsize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crosstopic::evaluation::{evaluate_consistency, AlignedPair, BucketHistogram, EvalReport};
use crosstopic::inference::{Document, InferenceSettings};
use crosstopic::lexicon::BilingualLexicon;
use crosstopic::topic_model::{Topic, TopicModel};
use crosstopic::translator::{
    translate_plain, translate_topic_model, KeepOriginPolicy, TranslationConfig,
};
use crosstopic::voting::{VotingFamily, VotingModelSpec};

const TOPICS: usize = 6;
const WORDS_PER_TOPIC: usize = 30;
const PAIRS: usize = 60;
const DOC_LEN: usize = 50;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let total = TOPICS * WORDS_PER_TOPIC;
    let en = |i: usize| format!("en{i:03}");
    let de = |i: usize| format!("de{i:03}");

    // Mirrored English/German models with Zipf-shaped topics.
    let mut topics_en = Vec::new();
    let mut topics_de = Vec::new();
    for t in 0..TOPICS {
        let entries: Vec<(String, f64)> = (0..WORDS_PER_TOPIC)
            .map(|j| (en(t * WORDS_PER_TOPIC + j), 1.0 / (j + 1) as f64))
            .collect();
        topics_de.push(Topic::new(
            entries.iter().map(|(w, s)| (w.replacen("en", "de", 1), *s)),
        )?);
        topics_en.push(Topic::new(entries)?);
    }
    let model_en = TopicModel::new(topics_en, (0..total).map(en).collect(), "en")?.normalize()?;
    let model_de_truth =
        TopicModel::new(topics_de, (0..total).map(de).collect(), "de")?.normalize()?;

    // One-to-one truth plus a few cross-topic noise pairs per word on
    // either side of the bidirectional lexicon.
    let mut lexicon = BilingualLexicon::new();
    for i in 0..total {
        lexicon.insert_pair(en(i), de(i));
        for _ in 0..3 {
            let j = rng.random_range(0..total);
            if j / WORDS_PER_TOPIC != i / WORDS_PER_TOPIC {
                lexicon.insert_pair(en(i), de(j));
            }
            let j = rng.random_range(0..total);
            if j / WORDS_PER_TOPIC != i / WORDS_PER_TOPIC {
                lexicon.insert_pair(en(j), de(i));
            }
        }
    }

    // Aligned pairs drawn from shared two-topic mixtures.
    let mut pairs = Vec::new();
    for p in 0..PAIRS {
        let mut theta = [0.01; TOPICS];
        let first = rng.random_range(0..TOPICS);
        let mut second = rng.random_range(0..TOPICS);
        while second == first {
            second = rng.random_range(0..TOPICS);
        }
        theta[first] = 0.6;
        theta[second] = 0.34;
        let mut sample = |model: &TopicModel| -> Vec<String> {
            (0..DOC_LEN)
                .map(|_| {
                    let total_w: f64 = theta.iter().sum();
                    let mut draw = rng.random::<f64>() * total_w;
                    let mut z = 0;
                    for (k, w) in theta.iter().enumerate() {
                        if draw < *w {
                            z = k;
                            break;
                        }
                        draw -= w;
                    }
                    let mut word_draw: f64 = rng.random();
                    for (word, score) in model.topic(z).ranked_words() {
                        if word_draw < score {
                            return word.to_string();
                        }
                        word_draw -= score;
                    }
                    model.topic(z).word_at_rank(1).unwrap().to_string()
                })
                .collect()
        };
        pairs.push(AlignedPair {
            pair_id: format!("p{p}"),
            doc_a: Document::new(format!("a{p}"), sample(&model_en)),
            doc_b: Document::new(format!("b{p}"), sample(&model_de_truth)),
        });
    }

    // Translate two ways and evaluate both against the English original.
    let combsum = translate_topic_model(
        &model_en,
        &lexicon,
        &TranslationConfig::new(VotingModelSpec::new(VotingFamily::CombSum)),
    )?;
    let plain = translate_plain(
        &model_en,
        &lexicon,
        NonZeroUsize::new(3),
        KeepOriginPolicy::Never,
        2024,
    )?;

    let settings = InferenceSettings::default().with_seed(2024);
    let report_comb = evaluate_consistency(&model_en, &combsum.model, &pairs, &settings)?;
    let report_plain = evaluate_consistency(&model_en, &plain.model, &pairs, &settings)?;

    print_report("CombSUM", &report_comb);
    print_report("Plain top-3", &report_plain);
    println!(
        "\nvoting beats the baseline by {:+.3} mean NDCG@3",
        report_comb.mu - report_plain.mu
    );
    Ok(())
}

fn print_report(name: &str, report: &EvalReport) {
    println!("\n{name}: mu = {:.4} over {} pairs", report.mu, report.pair_count);
    let overlap = report.overlap_histogram.as_array();
    println!("  top-3 overlap 3/2/1/0: {}/{}/{}/{}", overlap[0], overlap[1], overlap[2], overlap[3]);
    for (label, count) in BucketHistogram::LABELS.iter().zip(report.bucket_histogram.as_array()) {
        println!("  NDCG {label:<14} {count:>4}");
    }
}
