//! Per-topic translation with voting, top-n refinement, score assembly,
//! ε-fitting and normalization, plus the probability-inheritance baseline.
//!
//! For every source word above the threshold δ, the forward lexicon proposes
//! candidates; each candidate collects one voter per backward re-translation
//! found in the source topic. The configured voting model turns the voters
//! into a score, the best `n_best` candidates per source word are kept, and
//! candidates reached from several source words merge by taking the maximum
//! aggregated score. Missing vocabulary entries are padded with ε before the
//! final normalization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{BilingualLexicon, Direction};
use crate::seed::{derive_seed, fnv1a64};
use crate::topic_model::{ModelError, Topic, TopicModel};
use crate::voting::{evaluate, Voter, VotingFamily, VotingModelSpec, SPEC_GRAMMAR};

/// What happens to source words during translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KeepOriginPolicy {
    /// Keep every source word, carrying its source probability.
    Always,
    /// Source words never enter the translated model.
    #[default]
    Never,
    /// Keep a source word only when the lexicon offers no translation;
    /// retains proper names without flooding the output with source terms.
    IfNoTranslation,
}

impl fmt::Display for KeepOriginPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeepOriginPolicy::Always => "always",
            KeepOriginPolicy::Never => "never",
            KeepOriginPolicy::IfNoTranslation => "if-no-translation",
        })
    }
}

impl FromStr for KeepOriginPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "always" => Ok(KeepOriginPolicy::Always),
            "never" => Ok(KeepOriginPolicy::Never),
            "if-no-translation" => Ok(KeepOriginPolicy::IfNoTranslation),
            other => Err(format!(
                "unknown keep-origin policy `{other}` (expected always|never|if-no-translation)"
            )),
        }
    }
}

/// Parameters of a voting translation run.
#[derive(Debug, Clone)]
pub struct TranslationConfig {
    pub voting: VotingModelSpec,
    /// δ: source words with probability `≤ δ` are skipped. Unset behaves
    /// like 0.0, which still drops zero-probability words (the skip rule is
    /// a strict `φ > δ`).
    pub threshold: Option<f64>,
    /// Candidates kept per source word after scoring; `None` keeps all.
    pub n_best: Option<NonZeroUsize>,
    /// ε: fallback probability for vocabulary words missing from a topic.
    /// Unset picks the smallest probability seen in the source and raw
    /// translated model, lowered by one ULP.
    pub epsilon: Option<f64>,
    pub keep_origin: KeepOriginPolicy,
    /// Language tag for the translated model; defaults to the source tag
    /// with a `-translated` suffix.
    pub target_language: Option<String>,
}

impl TranslationConfig {
    pub fn new(voting: VotingModelSpec) -> Self {
        Self {
            voting,
            threshold: None,
            n_best: None,
            epsilon: None,
            keep_origin: KeepOriginPolicy::Never,
            target_language: None,
        }
    }

    fn validate(&self) -> Result<(), TranslateError> {
        if let Some(delta) = self.threshold {
            if !delta.is_finite() || !(0.0..1.0).contains(&delta) {
                return Err(TranslateError::InvalidThreshold { value: delta });
            }
        }
        if let Some(eps) = self.epsilon {
            if !eps.is_finite() || eps <= 0.0 {
                return Err(TranslateError::InvalidEpsilon { value: eps });
            }
        }
        Ok(())
    }
}

/// Either the voting translation or the Plain baseline, as selected on the
/// command line via `--voting`.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Plain { top_n: Option<NonZeroUsize> },
    Voting(VotingModelSpec),
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Plain { top_n: None } => f.write_str("plain"),
            MethodSpec::Plain { top_n: Some(n) } => write!(f, "plain-top:{n}"),
            MethodSpec::Voting(spec) => spec.fmt(f),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "plain" {
            return Ok(MethodSpec::Plain { top_n: None });
        }
        if let Some(n) = s.strip_prefix("plain-top:").or_else(|| s.strip_prefix("plain:top=")) {
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| format!("invalid voting spec `{s}`: `{n}` is not a positive integer"))?;
            let n = NonZeroUsize::new(n).ok_or_else(|| format!("invalid voting spec `{s}`: top must be >= 1"))?;
            return Ok(MethodSpec::Plain { top_n: Some(n) });
        }
        match VotingModelSpec::from_str(s) {
            Ok(spec) => Ok(MethodSpec::Voting(spec)),
            Err(err) => Err(format!("{err}\n{SPEC_GRAMMAR}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("threshold must lie in [0, 1), got {value}")]
    InvalidThreshold { value: f64 },
    #[error("epsilon must be a positive finite number, got {value}")]
    InvalidEpsilon { value: f64 },
    #[error("topic {topic} translated to an empty topic; normalization would divide by zero")]
    EmptyTopic { topic: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot write provenance to {path}: {source}")]
    WriteProvenance {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// How one source word contributed to a translated word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceContribution {
    pub source_word: String,
    /// Aggregated voting score (or the inherited probability for kept
    /// source words and the Plain baseline).
    pub score: f64,
    /// Voters behind the score; 0 for kept source words and Plain.
    pub voter_count: usize,
}

/// Provenance of one translated topic: contributions per output word.
pub type TopicProvenance = BTreeMap<String, Vec<SourceContribution>>;

/// A translated model together with the per-word provenance that produced
/// it. Every word that entered through translation (rather than ε padding)
/// has at least one contribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatedTopicModel {
    pub model: TopicModel,
    pub provenance: Vec<TopicProvenance>,
}

impl TranslatedTopicModel {
    /// Writes the provenance sidecar as JSON: one object per topic mapping
    /// each translated word to its contributions.
    pub fn save_provenance(&self, path: impl AsRef<Path>) -> Result<(), TranslateError> {
        let path = path.as_ref();
        let write = |path: &Path| -> std::io::Result<()> {
            let mut out = BufWriter::new(File::create(path)?);
            serde_json::to_writer_pretty(&mut out, &self.provenance)
                .map_err(std::io::Error::other)?;
            out.write_all(b"\n")?;
            out.flush()
        };
        write(path).map_err(|source| TranslateError::WriteProvenance { path: path.to_path_buf(), source })
    }
}

fn merge_max(
    merged: &mut BTreeMap<String, f64>,
    provenance: &mut TopicProvenance,
    word: &str,
    score: f64,
    contribution: SourceContribution,
) {
    merged
        .entry(word.to_string())
        .and_modify(|s| *s = s.max(score))
        .or_insert(score);
    provenance.entry(word.to_string()).or_default().push(contribution);
}

fn translate_topic_inner(
    topic: &Topic,
    vocab_a: &BTreeSet<String>,
    lexicon: &BilingualLexicon,
    cfg: &TranslationConfig,
) -> (BTreeMap<String, f64>, TopicProvenance) {
    let delta = cfg.threshold.unwrap_or(0.0);
    let mut merged = BTreeMap::new();
    let mut provenance = TopicProvenance::new();

    // Rank order makes the iteration deterministic.
    for (source_word, phi) in topic.ranked_words() {
        if phi <= delta || !vocab_a.contains(source_word) {
            continue;
        }

        // Score every candidate by the voters its re-translations collect.
        let mut scored: Vec<(&String, f64, usize)> = Vec::new();
        for candidate in lexicon.translate(source_word, Direction::AToB) {
            let voters: Vec<Voter> = lexicon
                .translate(candidate, Direction::BToA)
                .iter()
                .filter_map(|re_translation| {
                    let p = topic.score(re_translation).filter(|p| *p > 0.0)?;
                    Some(Voter::new(topic.get_rank(re_translation).unwrap(), p.min(1.0)))
                })
                .collect();
            if voters.is_empty() {
                // Cannot happen through a symmetric lexicon (the source word
                // itself always votes), but an unvoted candidate carries no
                // signal either way.
                continue;
            }
            let score = evaluate(&cfg.voting, &voters);
            scored.push((candidate, score, voters.len()));
        }

        // Take the best n_best candidates; ties resolve alphabetically.
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let had_translation = !scored.is_empty();
        if let Some(n) = cfg.n_best {
            scored.truncate(n.get());
        }

        for (candidate, score, voter_count) in scored {
            merge_max(
                &mut merged,
                &mut provenance,
                candidate,
                score,
                SourceContribution { source_word: source_word.to_string(), score, voter_count },
            );
        }

        let keep = match cfg.keep_origin {
            KeepOriginPolicy::Always => true,
            KeepOriginPolicy::IfNoTranslation => !had_translation,
            KeepOriginPolicy::Never => false,
        };
        if keep {
            merge_max(
                &mut merged,
                &mut provenance,
                source_word,
                phi,
                SourceContribution { source_word: source_word.to_string(), score: phi, voter_count: 0 },
            );
        }
    }

    (merged, provenance)
}

/// Translates a single topic, returning the unnormalized word → score map.
///
/// Only words present in `vocab_a` with probability above the threshold take
/// part. The result may be empty when δ filters everything out.
pub fn translate_topic(
    topic: &Topic,
    vocab_a: &BTreeSet<String>,
    lexicon: &BilingualLexicon,
    cfg: &TranslationConfig,
) -> BTreeMap<String, f64> {
    translate_topic_inner(topic, vocab_a, lexicon, cfg).0
}

/// Runs the whole translation: per-topic voting translation (in parallel),
/// vocabulary union, ε selection, vocabulary fitting and normalization.
///
/// Topic count and order are preserved. Results are bit-identical for any
/// worker count.
pub fn translate_topic_model(
    model: &TopicModel,
    lexicon: &BilingualLexicon,
    cfg: &TranslationConfig,
) -> Result<TranslatedTopicModel, TranslateError> {
    cfg.validate()?;
    let mut cfg = cfg.clone();
    if cfg.voting.family == VotingFamily::CombRrPen && cfg.voting.epsilon_floor.is_none() {
        cfg.voting.epsilon_floor = Some(model.min_probability()?);
    }
    let per_topic: Vec<(BTreeMap<String, f64>, TopicProvenance)> = model
        .topics()
        .par_iter()
        .map(|topic| translate_topic_inner(topic, model.vocabulary(), lexicon, &cfg))
        .collect();
    assemble(model, per_topic, cfg.epsilon, cfg.target_language.as_deref())
}

/// The Plain baseline: every translation inherits the source word's
/// probability, without voters. With a `top_n` cutoff a seeded uniform
/// random subset of the candidates is kept (all candidates score the same,
/// so there is nothing to rank).
pub fn translate_plain(
    model: &TopicModel,
    lexicon: &BilingualLexicon,
    top_n: Option<NonZeroUsize>,
    keep_origin: KeepOriginPolicy,
    seed: u64,
) -> Result<TranslatedTopicModel, TranslateError> {
    let per_topic: Vec<(BTreeMap<String, f64>, TopicProvenance)> = model
        .topics()
        .par_iter()
        .enumerate()
        .map(|(topic_index, topic)| {
            let mut merged = BTreeMap::new();
            let mut provenance = TopicProvenance::new();
            for (source_word, phi) in topic.ranked_words() {
                if phi <= 0.0 || !model.vocabulary().contains(source_word) {
                    continue;
                }
                let candidates: Vec<&String> =
                    lexicon.translate(source_word, Direction::AToB).iter().collect();
                let kept: Vec<&String> = match top_n {
                    Some(n) if n.get() < candidates.len() => {
                        // The RNG stream is tied to (seed, topic, word), not to
                        // iteration order, keeping any parallel schedule and
                        // any input order on the same draws.
                        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                            seed,
                            topic_index as u64,
                            fnv1a64(source_word),
                        ));
                        let mut picks =
                            rand::seq::index::sample(&mut rng, candidates.len(), n.get())
                                .into_vec();
                        picks.sort_unstable();
                        picks.into_iter().map(|i| candidates[i]).collect()
                    }
                    _ => candidates.clone(),
                };
                for candidate in &kept {
                    merge_max(
                        &mut merged,
                        &mut provenance,
                        candidate,
                        phi,
                        SourceContribution {
                            source_word: source_word.to_string(),
                            score: phi,
                            voter_count: 0,
                        },
                    );
                }
                let keep = match keep_origin {
                    KeepOriginPolicy::Always => true,
                    KeepOriginPolicy::IfNoTranslation => candidates.is_empty(),
                    KeepOriginPolicy::Never => false,
                };
                if keep {
                    merge_max(
                        &mut merged,
                        &mut provenance,
                        source_word,
                        phi,
                        SourceContribution {
                            source_word: source_word.to_string(),
                            score: phi,
                            voter_count: 0,
                        },
                    );
                }
            }
            (merged, provenance)
        })
        .collect();
    assemble(model, per_topic, None, None)
}

/// Shared tail of both translation routes: empty-topic check, vocabulary
/// union, ε resolution, fit and normalize.
fn assemble(
    model: &TopicModel,
    per_topic: Vec<(BTreeMap<String, f64>, TopicProvenance)>,
    epsilon: Option<f64>,
    target_language: Option<&str>,
) -> Result<TranslatedTopicModel, TranslateError> {
    if let Some(topic) = per_topic.iter().position(|(map, _)| map.is_empty()) {
        return Err(TranslateError::EmptyTopic { topic });
    }

    let vocab_b: BTreeSet<String> =
        per_topic.iter().flat_map(|(map, _)| map.keys().cloned()).collect();

    let raw_min = per_topic
        .iter()
        .flat_map(|(map, _)| map.values().copied())
        .filter(|s| *s > 0.0)
        .fold(f64::MAX, f64::min);
    let epsilon = match epsilon {
        Some(value) => value,
        // One ULP below the smallest probability of either model, so the
        // padding never outranks a real score.
        None => model.min_probability()?.min(raw_min).next_down(),
    };

    let (topics, provenance): (Vec<_>, Vec<_>) = per_topic.into_iter().unzip();
    let topics = topics
        .into_iter()
        .map(Topic::new)
        .collect::<Result<Vec<_>, _>>()?;
    let language = match target_language {
        Some(tag) => tag.to_string(),
        None => format!("{}-translated", model.language_tag()),
    };
    let translated = TopicModel::new(topics, vocab_b.clone(), language)?
        .fit_to_vocabulary(vocab_b, epsilon)?
        .normalize()?;

    Ok(TranslatedTopicModel { model: translated, provenance })
}
