//! Topic models: word distributions with cached rank indices, persistence,
//! vocabulary fitting and normalization.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("topic {topic} contains a non-finite or negative score for `{word}`")]
    InvalidScore { topic: usize, word: String },
    #[error("duplicate word `{word}` in topic {topic}")]
    DuplicateWord { topic: usize, word: String },
    #[error("a topic model needs at least one topic")]
    NoTopics,
    #[error("topic {topic} uses `{word}` which is not in the vocabulary")]
    WordOutsideVocabulary { topic: usize, word: String },
    #[error("model has no strictly positive score")]
    NoPositiveScore,
    #[error("epsilon must be a positive finite number, got {value}")]
    InvalidEpsilon { value: f64 },
    #[error("topic {topic} has zero total mass and cannot be normalized")]
    ZeroMassTopic { topic: usize },
    #[error("model flagged as normalized but topic {topic} sums to {sum}")]
    NotNormalized { topic: usize, sum: f64 },
    #[error("cannot read model from {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write model to {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid model file {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

/// One topic: a word → score map with a cached descending rank index.
///
/// Ranks are 1-based. Ties are broken by ascending lexicographic word order,
/// which keeps every rank-dependent computation deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct Topic {
    weights: HashMap<String, f64>,
    rank_index: Vec<String>,
    ranks: HashMap<String, usize>,
}

impl Topic {
    /// Builds a topic from `(word, score)` entries.
    ///
    /// Scores must be finite and non-negative; duplicate words are rejected.
    pub fn new(entries: impl IntoIterator<Item = (String, f64)>) -> Result<Self, ModelError> {
        Self::with_index(entries, 0)
    }

    fn with_index(
        entries: impl IntoIterator<Item = (String, f64)>,
        topic: usize,
    ) -> Result<Self, ModelError> {
        let mut weights = HashMap::new();
        for (word, score) in entries {
            if !score.is_finite() || score < 0.0 {
                return Err(ModelError::InvalidScore { topic, word });
            }
            if weights.insert(word.clone(), score).is_some() {
                return Err(ModelError::DuplicateWord { topic, word });
            }
        }
        let mut rank_index: Vec<String> = weights.keys().cloned().collect();
        rank_index.sort_by(|a, b| {
            weights[b].total_cmp(&weights[a]).then_with(|| a.cmp(b))
        });
        let ranks = rank_index
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i + 1))
            .collect();
        Ok(Self { weights, rank_index, ranks })
    }

    /// Score of `word`, if present.
    pub fn score(&self, word: &str) -> Option<f64> {
        self.weights.get(word).copied()
    }

    /// 1-based rank of `word` in this topic, if present.
    pub fn get_rank(&self, word: &str) -> Option<usize> {
        self.ranks.get(word).copied()
    }

    /// Word at 1-based `rank`.
    pub fn word_at_rank(&self, rank: usize) -> Option<&str> {
        self.rank_index.get(rank.checked_sub(1)?).map(String::as_str)
    }

    /// Words with their scores in rank order (descending score).
    pub fn ranked_words(&self) -> impl Iterator<Item = (&str, f64)> {
        self.rank_index.iter().map(|w| (w.as_str(), self.weights[w]))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.weights.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.rank_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank_index.is_empty()
    }

    /// Total mass, summed in rank order so the result is deterministic.
    pub fn total_mass(&self) -> f64 {
        self.ranked_words().map(|(_, s)| s).sum()
    }

    fn normalized_copy(&self, topic: usize) -> Result<Self, ModelError> {
        let total = self.total_mass();
        if total <= 0.0 {
            return Err(ModelError::ZeroMassTopic { topic });
        }
        // Division by a positive constant preserves the rank order, so the
        // cached index can be reused as-is.
        let weights = self.weights.iter().map(|(w, s)| (w.clone(), s / total)).collect();
        Ok(Self { weights, rank_index: self.rank_index.clone(), ranks: self.ranks.clone() })
    }
}

/// A sequence of topics over a shared vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    topics: Vec<Topic>,
    vocabulary: BTreeSet<String>,
    language_tag: String,
    normalized: bool,
}

impl TopicModel {
    /// Builds a model, checking `K ≥ 1` and that every topic word is covered
    /// by the vocabulary.
    pub fn new(
        topics: Vec<Topic>,
        vocabulary: BTreeSet<String>,
        language_tag: impl Into<String>,
    ) -> Result<Self, ModelError> {
        if topics.is_empty() {
            return Err(ModelError::NoTopics);
        }
        for (k, topic) in topics.iter().enumerate() {
            if let Some((word, _)) = topic.ranked_words().find(|(w, _)| !vocabulary.contains(*w)) {
                return Err(ModelError::WordOutsideVocabulary { topic: k, word: word.to_string() });
            }
        }
        Ok(Self { topics, vocabulary, language_tag: language_tag.into(), normalized: false })
    }

    pub fn k(&self) -> usize {
        self.topics.len()
    }

    pub fn topics(&self) -> &[Topic] {
        &self.topics
    }

    pub fn topic(&self, index: usize) -> &Topic {
        &self.topics[index]
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn language_tag(&self) -> &str {
        &self.language_tag
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Smallest strictly positive score stored anywhere in the model.
    pub fn min_probability(&self) -> Result<f64, ModelError> {
        self.topics
            .iter()
            .flat_map(|t| t.ranked_words().map(|(_, s)| s))
            .filter(|s| *s > 0.0)
            .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |m| m.min(s))))
            .ok_or(ModelError::NoPositiveScore)
    }

    /// Returns a model where every topic contains every word of `vocab`;
    /// words a topic was missing enter with score `epsilon`. Existing scores
    /// are untouched. The result is unnormalized.
    pub fn fit_to_vocabulary(
        &self,
        vocab: BTreeSet<String>,
        epsilon: f64,
    ) -> Result<TopicModel, ModelError> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(ModelError::InvalidEpsilon { value: epsilon });
        }
        let topics = self
            .topics
            .iter()
            .enumerate()
            .map(|(k, topic)| {
                if let Some((word, _)) = topic.ranked_words().find(|(w, _)| !vocab.contains(*w)) {
                    return Err(ModelError::WordOutsideVocabulary { topic: k, word: word.to_string() });
                }
                let entries = vocab
                    .iter()
                    .map(|w| (w.clone(), topic.score(w).unwrap_or(epsilon)));
                Topic::with_index(entries, k)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TopicModel {
            topics,
            vocabulary: vocab,
            language_tag: self.language_tag.clone(),
            normalized: false,
        })
    }

    /// Scales every topic to sum to one and sets the normalized flag.
    ///
    /// Run [`TopicModel::fit_to_vocabulary`] first when the dense invariant
    /// (every vocabulary word present in every topic) is wanted as well;
    /// normalization alone does not add words.
    pub fn normalize(&self) -> Result<TopicModel, ModelError> {
        let topics = self
            .topics
            .iter()
            .enumerate()
            .map(|(k, t)| t.normalized_copy(k))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TopicModel {
            topics,
            vocabulary: self.vocabulary.clone(),
            language_tag: self.language_tag.clone(),
            normalized: true,
        })
    }

    /// Loads a model from the JSON schema written by [`TopicModel::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<TopicModel, ModelError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| ModelError::Read { path: path.to_path_buf(), source })?;
        let raw: ModelFile = serde_json::from_reader(BufReader::new(file))
            .map_err(|source| ModelError::Parse { path: path.to_path_buf(), source })?;
        let topics = raw
            .topics
            .into_iter()
            .enumerate()
            .map(|(k, words)| Topic::with_index(words, k))
            .collect::<Result<Vec<_>, _>>()?;
        let mut model = TopicModel::new(topics, raw.vocabulary.into_iter().collect(), raw.language_tag)?;
        if raw.normalized {
            for (k, topic) in model.topics.iter().enumerate() {
                let sum = topic.total_mass();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(ModelError::NotNormalized { topic: k, sum });
                }
            }
            model.normalized = true;
        }
        Ok(model)
    }

    /// Writes the model as a JSON document:
    /// `{language_tag, normalized, vocabulary: [...], topics: [{word: score, ...}, ...]}`.
    ///
    /// Scores are emitted as shortest-round-trip decimals, so a load/save
    /// cycle reproduces every `f64` bit for bit. Word and vocabulary order
    /// are sorted, making the byte output deterministic.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        let raw = ModelFile {
            language_tag: self.language_tag.clone(),
            normalized: self.normalized,
            vocabulary: self.vocabulary.iter().cloned().collect(),
            topics: self
                .topics
                .iter()
                .map(|t| t.ranked_words().map(|(w, s)| (w.to_string(), s)).collect())
                .collect(),
        };
        let file = File::create(path).map_err(|source| ModelError::Write { path: path.to_path_buf(), source })?;
        let mut out = BufWriter::new(file);
        serde_json::to_writer_pretty(&mut out, &raw)
            .map_err(|source| ModelError::Parse { path: path.to_path_buf(), source })?;
        out.write_all(b"\n")
            .and_then(|()| out.flush())
            .map_err(|source| ModelError::Write { path: path.to_path_buf(), source })?;
        Ok(())
    }

    /// Serializes the model to a deterministic JSON string (same schema as
    /// [`TopicModel::save`]); handy for digest comparisons.
    pub fn to_json_string(&self) -> String {
        let raw = ModelFile {
            language_tag: self.language_tag.clone(),
            normalized: self.normalized,
            vocabulary: self.vocabulary.iter().cloned().collect(),
            topics: self
                .topics
                .iter()
                .map(|t| t.ranked_words().map(|(w, s)| (w.to_string(), s)).collect())
                .collect(),
        };
        serde_json::to_string(&raw).expect("model serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    language_tag: String,
    #[serde(default)]
    normalized: bool,
    vocabulary: Vec<String>,
    topics: Vec<BTreeMap<String, f64>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topic(entries: &[(&str, f64)]) -> Topic {
        Topic::new(entries.iter().map(|(w, s)| (w.to_string(), *s))).unwrap()
    }

    fn model(topics: Vec<Topic>) -> TopicModel {
        let vocab = topics
            .iter()
            .flat_map(|t| t.ranked_words().map(|(w, _)| w.to_string()))
            .collect();
        TopicModel::new(topics, vocab, "en").unwrap()
    }

    #[test]
    fn rank_follows_descending_score() {
        let t = topic(&[("plane", 0.019), ("aircraft", 0.018), ("radio", 0.001)]);
        assert_eq!(t.get_rank("plane"), Some(1));
        assert_eq!(t.get_rank("aircraft"), Some(2));
        assert_eq!(t.get_rank("radio"), Some(3));
        assert_eq!(t.word_at_rank(1), Some("plane"));
    }

    #[test]
    fn absent_word_has_no_rank() {
        let t = topic(&[("plane", 0.019)]);
        assert_eq!(t.get_rank("zzz"), None);
        assert_eq!(t.score("zzz"), None);
    }

    #[test]
    fn equal_scores_break_ties_lexicographically() {
        let t = topic(&[("b", 0.5), ("a", 0.5)]);
        assert_eq!(t.get_rank("a"), Some(1));
        assert_eq!(t.get_rank("b"), Some(2));
    }

    #[test]
    fn negative_score_is_rejected() {
        let err = Topic::new([("w".to_string(), -0.1)]).unwrap_err();
        assert!(matches!(err, ModelError::InvalidScore { .. }));
    }

    #[test]
    fn min_probability_single_topic() {
        let m = model(vec![topic(&[("a", 0.7), ("b", 0.3)])]);
        assert_eq!(m.min_probability().unwrap(), 0.3);
    }

    #[test]
    fn min_probability_across_topics() {
        let m = model(vec![
            topic(&[("a", 0.9), ("b", 0.1)]),
            topic(&[("a", 0.05), ("b", 0.95)]),
        ]);
        assert_eq!(m.min_probability().unwrap(), 0.05);
    }

    #[test]
    fn min_probability_ignores_zeros_and_errors_when_none_positive() {
        let m = model(vec![topic(&[("a", 0.0), ("b", 0.4)])]);
        assert_eq!(m.min_probability().unwrap(), 0.4);
        let z = model(vec![topic(&[("a", 0.0)])]);
        assert!(matches!(z.min_probability(), Err(ModelError::NoPositiveScore)));
    }

    #[test]
    fn fit_adds_missing_words_at_epsilon() {
        let m = model(vec![topic(&[("a", 0.5)])]);
        let vocab: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
        let fitted = m.fit_to_vocabulary(vocab, 0.01).unwrap();
        assert_eq!(fitted.topic(0).score("a"), Some(0.5));
        assert_eq!(fitted.topic(0).score("b"), Some(0.01));
    }

    #[test]
    fn fit_with_identical_vocab_is_identity_on_scores() {
        let m = model(vec![topic(&[("a", 0.5), ("b", 0.2)])]);
        let fitted = m.fit_to_vocabulary(m.vocabulary().clone(), 0.01).unwrap();
        assert_eq!(fitted.topic(0), m.topic(0));
    }

    #[test]
    fn fit_rejects_non_positive_epsilon() {
        let m = model(vec![topic(&[("a", 0.5)])]);
        let err = m.fit_to_vocabulary(m.vocabulary().clone(), 0.0).unwrap_err();
        assert!(matches!(err, ModelError::InvalidEpsilon { .. }));
    }

    #[test]
    fn normalize_divides_by_topic_total() {
        let m = model(vec![topic(&[("flieger", 0.052), ("flugzeug", 0.049)])]);
        let n = m.normalize().unwrap();
        let total = 0.052 + 0.049;
        assert_eq!(n.topic(0).score("flieger"), Some(0.052 / total));
        assert!(n.is_normalized());
    }

    #[test]
    fn normalize_is_idempotent_within_1e12() {
        let m = model(vec![topic(&[("a", 0.3), ("b", 0.6), ("c", 0.2)])]);
        let once = m.normalize().unwrap();
        let twice = once.normalize().unwrap();
        for (w, s) in once.topic(0).ranked_words() {
            assert!((twice.topic(0).score(w).unwrap() - s).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_reports_zero_mass_topic_index() {
        let m = model(vec![topic(&[("a", 0.4)]), topic(&[("b", 0.0)])]);
        match m.normalize() {
            Err(ModelError::ZeroMassTopic { topic }) => assert_eq!(topic, 1),
            other => panic!("expected zero-mass error, got {other:?}"),
        }
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let m = model(vec![
            topic(&[("plane", 0.019), ("aircraft", 0.018)]),
            topic(&[("radio", 1.0 / 3.0), ("music", 0.123_456_789_012_345_68)]),
        ]);
        let path = dir.path().join("m.json");
        m.save(&path).unwrap();
        let loaded = TopicModel::load(&path).unwrap();
        assert_eq!(m, loaded);
        // Ranks survive exactly as well.
        for (t, lt) in m.topics().iter().zip(loaded.topics()) {
            assert_eq!(
                t.ranked_words().collect::<Vec<_>>(),
                lt.ranked_words().collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn missing_topics_key_names_the_key() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.json");
        std::fs::write(&path, r#"{"language_tag":"en","vocabulary":[]}"#).unwrap();
        let err = TopicModel::load(&path).unwrap_err();
        assert!(err.to_string().contains("topics"), "got: {err}");
    }

    #[test]
    fn fit_never_decreases_existing_scores() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let support = rng.random_range(1..12);
            let entries: Vec<(String, f64)> = (0..support)
                .map(|i| (format!("w{i}"), rng.random_range(0.0..1.0f64)))
                .collect();
            let m = model(vec![Topic::new(entries.clone()).unwrap()]);
            let vocab: BTreeSet<String> =
                (0..16).map(|i| format!("w{i}")).chain(m.vocabulary().iter().cloned()).collect();
            let epsilon = rng.random_range(1e-9..0.1f64);
            let fitted = m.fit_to_vocabulary(vocab, epsilon).unwrap();
            for (word, score) in &entries {
                assert_eq!(fitted.topic(0).score(word).unwrap(), *score);
            }
        }
    }

    #[test]
    fn fit_then_normalize_gives_dense_unit_topics() {
        let m = model(vec![topic(&[("a", 0.5), ("b", 0.1)]), topic(&[("c", 0.9)])]);
        let vocab: BTreeSet<String> =
            ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        let n = m.fit_to_vocabulary(vocab.clone(), 1e-4).unwrap().normalize().unwrap();
        for topic in n.topics() {
            assert_eq!(topic.len(), vocab.len());
            assert!((topic.total_mass() - 1.0).abs() < 1e-9);
        }
    }
}
