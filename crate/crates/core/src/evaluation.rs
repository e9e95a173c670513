//! Consistency metrics between a source model and its translation over
//! aligned document pairs, plus topic sharpness diagnostics.
//!
//! NDCG@3 uses rank-based gains (3, 2, 1) for the reference's top three
//! topics, the standard `log2(j + 1)` position discount, and the reference
//! order as the ideal ranking. Discount and normalization are pinned to
//! this exact definition; every consistency threshold in the test suites
//! is evaluated against it.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::inference::{infer_theta, theta_ranking, Document, InferenceError, InferenceSettings};
use crate::seed::{derive_seed, fnv1a64};
use crate::topic_model::Topic;
use crate::TopicModel;

/// Two documents about the same subject in different languages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub pair_id: String,
    pub doc_a: Document,
    pub doc_b: Document,
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ranking needs at least {needed} topics, got {got}")]
    TooFewTopics { needed: usize, got: usize },
    #[error("sharpness rank must be >= 2, got {rank}")]
    SharpnessRankTooSmall { rank: usize },
    #[error("sharpness rank {rank} exceeds the topic's {len} words")]
    SharpnessRankOutOfRange { rank: usize, len: usize },
    #[error("models disagree on topic count: {k_a} vs {k_b}")]
    TopicCountMismatch { k_a: usize, k_b: usize },
    #[error("evaluation needs at least one aligned pair")]
    NoPairs,
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("cannot read aligned pairs from {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid aligned-pair record: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// NDCG@3 of `candidate` against `reference`.
///
/// The reference's top three topics get relevance 3, 2, 1; all others 0.
/// `DCG = Σ_{j=1..3} rel(candidate_j) / log2(j + 1)`, normalized by the DCG
/// of the reference order itself.
pub fn ndcg_at_3(reference: &[usize], candidate: &[usize]) -> Result<f64, EvalError> {
    if reference.len() < 3 || candidate.len() < 3 {
        return Err(EvalError::TooFewTopics { needed: 3, got: reference.len().min(candidate.len()) });
    }
    let gain = |topic: usize| -> f64 {
        match reference[..3].iter().position(|&t| t == topic) {
            Some(0) => 3.0,
            Some(1) => 2.0,
            Some(2) => 1.0,
            _ => 0.0,
        }
    };
    let dcg: f64 = candidate[..3]
        .iter()
        .enumerate()
        .map(|(j, &t)| gain(t) / ((j + 2) as f64).log2())
        .sum();
    let idcg: f64 = reference[..3]
        .iter()
        .enumerate()
        .map(|(j, &t)| gain(t) / ((j + 2) as f64).log2())
        .sum();
    Ok(dcg / idcg)
}

/// How many of the reference's top three topics appear in the candidate's
/// top three, ignoring order.
pub fn overlap_at_3(reference: &[usize], candidate: &[usize]) -> Result<usize, EvalError> {
    if reference.len() < 3 || candidate.len() < 3 {
        return Err(EvalError::TooFewTopics { needed: 3, got: reference.len().min(candidate.len()) });
    }
    let top_ref: BTreeSet<usize> = reference[..3].iter().copied().collect();
    Ok(candidate[..3].iter().filter(|t| top_ref.contains(t)).count())
}

/// Set recall and precision over the two top-k topic lists. For equal-length
/// rankings both equal `|top-k ∩ top-k| / k`.
pub fn recall_precision_at_k(
    reference: &[usize],
    candidate: &[usize],
    k: usize,
) -> Result<(f64, f64), EvalError> {
    if reference.len() < k || candidate.len() < k {
        return Err(EvalError::TooFewTopics { needed: k, got: reference.len().min(candidate.len()) });
    }
    let top_ref: BTreeSet<usize> = reference[..k].iter().copied().collect();
    let shared = candidate[..k].iter().filter(|t| top_ref.contains(t)).count() as f64;
    Ok((shared / k as f64, shared / k as f64))
}

/// Topic sharpness: the slope of the probability curve between rank 1 and
/// rank `r`, `m = (φ(rank r) − φ(rank 1)) / (1 − r)`. Steep slopes mean few
/// words dominate the topic.
pub fn topic_sharpness(topic: &Topic, r: usize) -> Result<f64, EvalError> {
    if r < 2 {
        return Err(EvalError::SharpnessRankTooSmall { rank: r });
    }
    let len = topic.len();
    let (Some(first), Some(at_r)) = (topic.word_at_rank(1), topic.word_at_rank(r)) else {
        return Err(EvalError::SharpnessRankOutOfRange { rank: r, len });
    };
    let phi_1 = topic.score(first).unwrap();
    let phi_r = topic.score(at_r).unwrap();
    // `+ 0.0` flushes the negative zero a flat topic would produce.
    Ok((phi_r - phi_1) / (1.0 - r as f64) + 0.0)
}

/// Per-pair evaluation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub pair_id: String,
    pub ndcg: f64,
    pub overlap: usize,
}

/// Counts of pairs by top-3 overlap (3, 2, 1, 0 shared topics).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapHistogram {
    pub three: usize,
    pub two: usize,
    pub one: usize,
    pub zero: usize,
}

impl OverlapHistogram {
    pub fn total(&self) -> usize {
        self.three + self.two + self.one + self.zero
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.three, self.two, self.one, self.zero]
    }
}

/// Counts of pairs by NDCG@3 bucket:
/// `1.00`, `]1.00, 0.75]`, `]0.75, 0.50]`, `]0.50, 0.25]`, `]0.25, 0.00[`, `0.00`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketHistogram {
    pub exactly_one: usize,
    pub above_075: usize,
    pub above_050: usize,
    pub above_025: usize,
    pub above_zero: usize,
    pub zero: usize,
}

impl BucketHistogram {
    pub fn total(&self) -> usize {
        self.exactly_one + self.above_075 + self.above_050 + self.above_025 + self.above_zero + self.zero
    }

    pub fn as_array(&self) -> [usize; 6] {
        [self.exactly_one, self.above_075, self.above_050, self.above_025, self.above_zero, self.zero]
    }

    pub const LABELS: [&'static str; 6] =
        ["1.00", "]1.00, 0.75]", "]0.75, 0.50]", "]0.50, 0.25]", "]0.25, 0.00[", "0.00"];

    fn add(&mut self, ndcg: f64) {
        if ndcg >= 1.0 {
            self.exactly_one += 1;
        } else if ndcg > 0.75 {
            self.above_075 += 1;
        } else if ndcg > 0.5 {
            self.above_050 += 1;
        } else if ndcg > 0.25 {
            self.above_025 += 1;
        } else if ndcg > 0.0 {
            self.above_zero += 1;
        } else {
            self.zero += 1;
        }
    }
}

/// Aggregated consistency results over a set of aligned pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Mean NDCG@3 over all pairs.
    pub mu: f64,
    pub pair_count: usize,
    pub overlap_histogram: OverlapHistogram,
    pub bucket_histogram: BucketHistogram,
    pub per_pair: Vec<PairOutcome>,
}

impl EvalReport {
    fn from_outcomes(per_pair: Vec<PairOutcome>) -> Self {
        let pair_count = per_pair.len();
        let mut overlap_histogram = OverlapHistogram::default();
        let mut bucket_histogram = BucketHistogram::default();
        let mut sum = 0.0;
        for outcome in &per_pair {
            sum += outcome.ndcg;
            bucket_histogram.add(outcome.ndcg);
            match outcome.overlap {
                3 => overlap_histogram.three += 1,
                2 => overlap_histogram.two += 1,
                1 => overlap_histogram.one += 1,
                _ => overlap_histogram.zero += 1,
            }
        }
        EvalReport {
            mu: sum / pair_count as f64,
            pair_count,
            overlap_histogram,
            bucket_histogram,
            per_pair,
        }
    }
}

/// Infers θ for both sides of every pair and scores the agreement of the
/// topic rankings.
///
/// `doc_a` is folded into `model_a` (the reference), `doc_b` into `model_b`.
/// Per-document RNG streams are derived from the settings seed and the pair
/// id, so results do not depend on pair order or worker count.
pub fn evaluate_consistency(
    model_a: &TopicModel,
    model_b: &TopicModel,
    pairs: &[AlignedPair],
    settings: &InferenceSettings,
) -> Result<EvalReport, EvalError> {
    if model_a.k() != model_b.k() {
        return Err(EvalError::TopicCountMismatch { k_a: model_a.k(), k_b: model_b.k() });
    }
    if pairs.is_empty() {
        return Err(EvalError::NoPairs);
    }
    let per_pair: Vec<PairOutcome> = pairs
        .par_iter()
        .map(|pair| {
            let id_hash = fnv1a64(&pair.pair_id);
            let side_a = InferenceSettings {
                seed: derive_seed(settings.seed, id_hash, 0),
                ..*settings
            };
            let side_b = InferenceSettings {
                seed: derive_seed(settings.seed, id_hash, 1),
                ..*settings
            };
            let theta_a = infer_theta(model_a, &pair.doc_a, &side_a)?;
            let theta_b = infer_theta(model_b, &pair.doc_b, &side_b)?;
            let ranking_a = theta_ranking(&theta_a.probabilities);
            let ranking_b = theta_ranking(&theta_b.probabilities);
            Ok(PairOutcome {
                pair_id: pair.pair_id.clone(),
                ndcg: ndcg_at_3(&ranking_a, &ranking_b)?,
                overlap: overlap_at_3(&ranking_a, &ranking_b)?,
            })
        })
        .collect::<Result<_, EvalError>>()?;
    Ok(EvalReport::from_outcomes(per_pair))
}

/// Reads JSONL aligned pairs: one
/// `{"pair_id": ..., "doc_a": {...}, "doc_b": {...}}` object per line.
pub fn read_aligned_pairs(path: impl AsRef<Path>) -> Result<Vec<AlignedPair>, EvalError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| EvalError::Read { path: path.to_path_buf(), source })?;
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| EvalError::Read { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let pair = serde_json::from_str(&line).map_err(|source| EvalError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            source,
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}
