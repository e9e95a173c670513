//! Per-document topic distributions under a fixed topic model.
//!
//! Inference is a fold-in collapsed Gibbs sampler: the word distributions φ
//! stay fixed while topic assignments for the document's in-vocabulary
//! tokens are resampled with probability `∝ φ_k(w) · (count_k + α)`, where
//! `count_k` excludes the token being resampled. Counts are averaged over
//! the post-burn-in sweeps and smoothed into
//! `θ_k = (avg_count_k + α) / (N + K·α)`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topic_model::TopicModel;

/// A tokenized document. Tokens may be empty or unknown to the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, tokens: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { id: id.into(), tokens: tokens.into_iter().map(Into::into).collect() }
    }
}

/// θ: the per-topic probabilities of one document. Sums to one, all
/// entries strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaDistribution {
    #[serde(rename = "id")]
    pub document_id: String,
    #[serde(rename = "theta")]
    pub probabilities: Vec<f64>,
}

impl ThetaDistribution {
    /// Topic indices ordered by descending probability, ties broken by
    /// ascending topic index.
    pub fn ranking(&self) -> Vec<usize> {
        theta_ranking(&self.probabilities)
    }
}

/// Descending-probability topic order with ascending-index tie-break.
pub fn theta_ranking(theta: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..theta.len()).collect();
    order.sort_by(|&i, &j| theta[j].total_cmp(&theta[i]).then_with(|| i.cmp(&j)));
    order
}

/// Sampler parameters. Defaults: `alpha = 0.01`, `iterations = 200`,
/// `burn_in = 50`, `seed = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceSettings {
    pub alpha: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for InferenceSettings {
    fn default() -> Self {
        Self { alpha: 0.01, iterations: 200, burn_in: 50, seed: 0 }
    }
}

impl InferenceSettings {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("alpha must be a positive finite number, got {value}")]
    InvalidAlpha { value: f64 },
    #[error("iterations ({iterations}) must exceed burn-in ({burn_in})")]
    BadIterationCounts { iterations: usize, burn_in: usize },
    #[error("inference needs a normalized model")]
    ModelNotNormalized,
    #[error("cannot read documents from {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid document record: {source}")]
    Parse {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("cannot write to {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Folds `doc` into `model`, returning its topic distribution θ.
///
/// Unknown tokens are ignored; a document with no usable tokens gets the
/// uniform prior `θ_k = 1/K`. Identical seeds give bit-identical results.
pub fn infer_theta(
    model: &TopicModel,
    doc: &Document,
    settings: &InferenceSettings,
) -> Result<ThetaDistribution, InferenceError> {
    if !settings.alpha.is_finite() || settings.alpha <= 0.0 {
        return Err(InferenceError::InvalidAlpha { value: settings.alpha });
    }
    if settings.iterations <= settings.burn_in {
        return Err(InferenceError::BadIterationCounts {
            iterations: settings.iterations,
            burn_in: settings.burn_in,
        });
    }
    if !model.is_normalized() {
        return Err(InferenceError::ModelNotNormalized);
    }

    let k = model.k();
    let alpha = settings.alpha;

    // Per-token φ columns; tokens without any positive φ are dropped along
    // with out-of-vocabulary ones.
    let phi_columns: Vec<Vec<f64>> = doc
        .tokens
        .iter()
        .filter(|t| model.vocabulary().contains(*t))
        .filter_map(|t| {
            let column: Vec<f64> =
                (0..k).map(|topic| model.topic(topic).score(t).unwrap_or(0.0)).collect();
            column.iter().any(|p| *p > 0.0).then_some(column)
        })
        .collect();
    let n = phi_columns.len();

    if n == 0 {
        let uniform = vec![1.0 / k as f64; k];
        return Ok(ThetaDistribution { document_id: doc.id.clone(), probabilities: uniform });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut counts = vec![0usize; k];
    let mut assignments = vec![0usize; n];
    let mut weights = vec![0.0f64; k];

    // Initial sweep: assign tokens one by one under the same conditional.
    for (i, column) in phi_columns.iter().enumerate() {
        let z = sample_topic(column, &counts, alpha, &mut weights, &mut rng);
        assignments[i] = z;
        counts[z] += 1;
    }

    let mut accumulated = vec![0.0f64; k];
    let mut kept_sweeps = 0usize;
    for sweep in 0..settings.iterations {
        for (i, column) in phi_columns.iter().enumerate() {
            counts[assignments[i]] -= 1;
            let z = sample_topic(column, &counts, alpha, &mut weights, &mut rng);
            assignments[i] = z;
            counts[z] += 1;
        }
        if sweep >= settings.burn_in {
            for (acc, c) in accumulated.iter_mut().zip(&counts) {
                *acc += *c as f64;
            }
            kept_sweeps += 1;
        }
    }

    let denominator = n as f64 + k as f64 * alpha;
    let probabilities = accumulated
        .iter()
        .map(|acc| (acc / kept_sweeps as f64 + alpha) / denominator)
        .collect();
    Ok(ThetaDistribution { document_id: doc.id.clone(), probabilities })
}

fn sample_topic(
    phi_column: &[f64],
    counts: &[usize],
    alpha: f64,
    weights: &mut [f64],
    rng: &mut ChaCha8Rng,
) -> usize {
    let mut total = 0.0;
    for (topic, (&phi, &count)) in phi_column.iter().zip(counts).enumerate() {
        total += phi * (count as f64 + alpha);
        weights[topic] = total;
    }
    let draw: f64 = rng.random::<f64>() * total;
    weights.iter().position(|&w| draw < w).unwrap_or(phi_column.len() - 1)
}

/// Reads JSONL documents: one `{"id": ..., "tokens": [...]}` object per line.
pub fn read_documents(path: impl AsRef<Path>) -> Result<Vec<Document>, InferenceError> {
    let path = path.as_ref();
    let file =
        File::open(path).map_err(|source| InferenceError::Read { path: path.to_path_buf(), source })?;
    let mut docs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line =
            line.map_err(|source| InferenceError::Read { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = serde_json::from_str(&line).map_err(|source| InferenceError::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            source,
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

/// Writes θ records as JSONL: one `{"id": ..., "theta": [...]}` per line.
pub fn write_thetas(
    path: impl AsRef<Path>,
    thetas: &[ThetaDistribution],
) -> Result<(), InferenceError> {
    let path = path.as_ref();
    let write = |path: &Path| -> std::io::Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        for theta in thetas {
            serde_json::to_writer(&mut out, theta).map_err(std::io::Error::other)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    };
    write(path).map_err(|source| InferenceError::Write { path: path.to_path_buf(), source })
}
