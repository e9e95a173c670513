//! Translate trained topic models across languages using bilingual word
//! lexicons and voting models borrowed from expert search.
//!
//! The pipeline works on a per-topic basis: every word of a source topic is
//! translated through a bidirectional lexicon, each candidate is re-translated
//! back and scored by the voters it collects in the source topic, the best
//! candidates are kept, merged, padded with a fallback probability and
//! normalized into a proper topic distribution. Consistency between the
//! source model and its translation is measured on aligned document pairs
//! via fold-in inference and NDCG@3.
//!
//! Entry points:
//!
//! - [`lexicon::compose_lexicon`] builds a [`lexicon::BilingualLexicon`] from
//!   TSV pair files.
//! - [`translator::translate_topic_model`] runs the full voting translation;
//!   [`translator::translate_plain`] is the probability-inheritance baseline.
//! - [`inference::infer_theta`] folds held-out documents into a fixed model.
//! - [`evaluation::evaluate_consistency`] compares two models over aligned
//!   document pairs.
//!
//! The `examples/` directory contains one runnable example per capability;
//! the `crosstopic` binary exposes the same operations as subcommands
//! (`lexicon`, `translate`, `evaluate`, `infer`, `inspect`).

pub mod cli;
pub mod evaluation;
pub mod inference;
pub mod lexicon;
pub mod topic_model;
pub mod translator;
pub mod voting;

pub(crate) mod seed;

pub use evaluation::{evaluate_consistency, ndcg_at_3, overlap_at_3, topic_sharpness, EvalReport};
pub use inference::{infer_theta, Document, InferenceSettings, ThetaDistribution};
pub use lexicon::{compose_lexicon, BilingualLexicon, Direction};
pub use topic_model::{Topic, TopicModel};
pub use translator::{
    translate_plain, translate_topic, translate_topic_model, KeepOriginPolicy, TranslatedTopicModel,
    TranslationConfig,
};
pub use voting::{Voter, VotingFamily, VotingModelSpec};
