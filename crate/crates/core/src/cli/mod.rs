//! Batch command-line surface: `lexicon`, `translate`, `evaluate`, `infer`
//! and `inspect` subcommands over the library pipeline.
//!
//! Every command is deterministic given its flags and seed; each output
//! artifact gets a `<name>.manifest.json` sidecar recording the effective
//! configuration and input digests.

mod manifest;

pub use manifest::{sha256_of_file, RunManifest};

use std::collections::BTreeSet;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use crate::evaluation::{evaluate_consistency, read_aligned_pairs, topic_sharpness, BucketHistogram, EvalReport};
use crate::inference::{infer_theta, read_documents, write_thetas, InferenceSettings};
use crate::lexicon::{compose_lexicon_with_report, BilingualLexicon, ComposeOptions, LexiconSource, MalformedPolicy};
use crate::seed::{derive_seed, fnv1a64};
use crate::topic_model::TopicModel;
use crate::translator::{translate_plain, translate_topic_model, KeepOriginPolicy, MethodSpec, TranslationConfig};

/// Environment variable naming a default TOML config for `translate`.
pub const CONFIG_ENV_VAR: &str = "CROSSTOPIC_CONFIG";

#[derive(Parser)]
#[command(name = "crosstopic", version, about = "Translate topic models across languages with bilingual lexicons and voting models")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores). Results
    /// are identical for any worker count.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compose a bidirectional lexicon from TSV pair files
    Lexicon(LexiconArgs),
    /// Translate a topic model through a lexicon
    Translate(TranslateArgs),
    /// Compare two models on aligned document pairs (NDCG@3)
    Evaluate(EvaluateArgs),
    /// Infer per-document topic distributions under a fixed model
    Infer(InferArgs),
    /// Print per-topic top words and sharpness slopes
    Inspect(InspectArgs),
}

#[derive(Args)]
struct LexiconArgs {
    /// Source file as `tag=path` or bare path (tag = file stem); repeatable
    #[arg(long = "source", required = true)]
    sources: Vec<String>,
    /// Comma-separated source tags to leave out
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
    /// Drop pairs with more terms than this on either side
    #[arg(long, default_value_t = 2)]
    max_terms: usize,
    /// Skip malformed records (with a warning) instead of failing
    #[arg(long)]
    skip_malformed: bool,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct TranslateArgs {
    /// Source topic model (JSON)
    #[arg(long)]
    model: PathBuf,
    /// Composed lexicon (TSV)
    #[arg(long)]
    lexicon: PathBuf,
    /// Voting spec, e.g. `combsum-top:4`, `rr:top=2,x=2`, or `plain`/`plain-top:3`
    #[arg(long)]
    voting: Option<String>,
    /// Candidates kept per source word (default: all)
    #[arg(long)]
    n_best: Option<usize>,
    /// δ: skip source words with probability ≤ δ
    #[arg(long)]
    threshold: Option<f64>,
    /// ε: fallback probability for missing vocabulary words
    #[arg(long)]
    epsilon: Option<f64>,
    /// always | never | if-no-translation
    #[arg(long)]
    keep_origin: Option<String>,
    /// Seed for the Plain baseline's random candidate selection
    #[arg(long)]
    seed: Option<u64>,
    /// Language tag for the translated model
    #[arg(long)]
    target_lang: Option<String>,
    /// TOML config file; flags override its values (default: $CROSSTOPIC_CONFIG)
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct InferenceFlags {
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 200)]
    iterations: usize,
    #[arg(long, default_value_t = 50)]
    burn_in: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InferenceFlags {
    fn settings(&self) -> InferenceSettings {
        InferenceSettings {
            alpha: self.alpha,
            iterations: self.iterations,
            burn_in: self.burn_in,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct EvaluateArgs {
    /// Reference model (JSON)
    #[arg(long)]
    model_a: PathBuf,
    /// Candidate model (JSON)
    #[arg(long)]
    model_b: PathBuf,
    /// Aligned pairs (JSONL)
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    inference: InferenceFlags,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    model: PathBuf,
    /// Documents (JSONL)
    #[arg(long)]
    docs: PathBuf,
    #[command(flatten)]
    inference: InferenceFlags,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
    /// Words to print per topic (equal-probability groups stay together)
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Also print the sharpness slope between rank 1 and this rank
    #[arg(long)]
    sharpness: Option<usize>,
}

/// TOML config for `translate`; every key is optional and flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    voting: Option<String>,
    n_best: Option<usize>,
    threshold: Option<f64>,
    epsilon: Option<f64>,
    keep_origin: Option<String>,
    seed: Option<u64>,
    target_lang: Option<String>,
}

/// Parses the process arguments and runs the selected command.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore the error when a pool already exists (e.g. repeated calls
        // in one process); rayon keeps the first configuration.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let result = match cli.command {
        Command::Lexicon(args) => cmd_lexicon(args),
        Command::Translate(args) => cmd_translate(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Inspect(args) => cmd_inspect(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn parse_source(raw: &str) -> LexiconSource {
    match raw.split_once('=') {
        Some((tag, path)) => LexiconSource::new(tag, path),
        None => {
            let path = PathBuf::from(raw);
            let tag = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| raw.to_string());
            LexiconSource::new(tag, path)
        }
    }
}

fn cmd_lexicon(args: LexiconArgs) -> Result<()> {
    let sources: Vec<LexiconSource> = args.sources.iter().map(|s| parse_source(s)).collect();
    let excluded: BTreeSet<String> = args.exclude.iter().cloned().collect();
    let options = ComposeOptions {
        max_terms: args.max_terms,
        on_malformed: if args.skip_malformed { MalformedPolicy::Skip } else { MalformedPolicy::Fail },
    };
    let (lexicon, reports) = compose_lexicon_with_report(&sources, &excluded, &options)?;
    lexicon.save(&args.output)?;

    println!("{:<20} {:>10} {:>10} {:>10}", "source", "pairs", "dropped", "skipped");
    for report in &reports {
        println!(
            "{:<20} {:>10} {:>10} {:>10}",
            report.tag, report.pairs, report.dropped_long, report.skipped_malformed
        );
        if report.skipped_malformed > 0 {
            eprintln!("warning: {}: skipped {} malformed records", report.tag, report.skipped_malformed);
        }
    }
    println!("{:<20} {:>10}", "composed", lexicon.pair_count());

    let mut manifest = RunManifest::new(
        "lexicon",
        json!({
            "exclude": excluded,
            "max_terms": args.max_terms,
            "skip_malformed": args.skip_malformed,
            "sources": sources.iter().map(|s| s.tag.clone()).collect::<Vec<_>>(),
        }),
    );
    for source in &sources {
        if !excluded.contains(&source.tag) {
            manifest.add_input(&source.path)?;
        }
    }
    manifest.add_output(&args.output);
    manifest.write_alongside(&args.output)?;
    Ok(())
}

fn cmd_translate(args: TranslateArgs) -> Result<()> {
    let file_config = load_file_config(args.config.as_deref())?;
    let voting_str = args
        .voting
        .or(file_config.voting)
        .context("no voting spec given (use --voting or a config file)")?;
    let method: MethodSpec = voting_str.parse().map_err(|e: String| anyhow::anyhow!(e))?;
    let n_best = args.n_best.or(file_config.n_best);
    let n_best = match n_best {
        Some(0) => bail!("--n-best must be >= 1"),
        Some(n) => NonZeroUsize::new(n),
        None => None,
    };
    let keep_origin: KeepOriginPolicy = args
        .keep_origin
        .or(file_config.keep_origin)
        .as_deref()
        .unwrap_or("never")
        .parse()
        .map_err(|e: String| anyhow::anyhow!(e))?;
    let threshold = args.threshold.or(file_config.threshold);
    let epsilon = args.epsilon.or(file_config.epsilon);
    let seed = args.seed.or(file_config.seed).unwrap_or(0);
    let target_lang = args.target_lang.or(file_config.target_lang);

    let model = TopicModel::load(&args.model)?;
    let lexicon = BilingualLexicon::load(&args.lexicon)?;

    let translated = match &method {
        MethodSpec::Plain { top_n } => {
            if threshold.is_some() {
                bail!("--threshold does not apply to the plain baseline");
            }
            if epsilon.is_some() {
                bail!("--epsilon does not apply to the plain baseline");
            }
            // All plain candidates tie, so the n-best refinement degenerates
            // to the seeded random selection; `plain-top:3` and
            // `--voting plain --n-best 3` mean the same thing.
            translate_plain(&model, &lexicon, top_n.or(n_best), keep_origin, seed)?
        }
        MethodSpec::Voting(spec) => {
            let cfg = TranslationConfig {
                voting: spec.clone(),
                threshold,
                n_best,
                epsilon,
                keep_origin,
                target_language: target_lang.clone(),
            };
            translate_topic_model(&model, &lexicon, &cfg)?
        }
    };

    translated.model.save(&args.output)?;
    let provenance_path = sidecar_path(&args.output, "provenance.json");
    translated.save_provenance(&provenance_path)?;

    let mut manifest = RunManifest::new(
        "translate",
        json!({
            "voting": method.to_string(),
            "n_best": n_best.map(NonZeroUsize::get),
            "threshold": threshold,
            "epsilon": epsilon,
            "keep_origin": keep_origin.to_string(),
            "target_lang": target_lang,
        }),
    )
    .with_seed(seed);
    manifest.add_input(&args.model)?;
    manifest.add_input(&args.lexicon)?;
    manifest.add_output(&args.output);
    manifest.add_output(&provenance_path);
    manifest.write_alongside(&args.output)?;

    println!(
        "translated {} topics over {} words -> {}",
        translated.model.k(),
        translated.model.vocabulary().len(),
        args.output.display()
    );
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let model_a = TopicModel::load(&args.model_a)?;
    let model_b = TopicModel::load(&args.model_b)?;
    let pairs = read_aligned_pairs(&args.pairs)?;
    let settings = args.inference.settings();
    let report = evaluate_consistency(&model_a, &model_b, &pairs, &settings)?;

    let json_out = serde_json::to_string_pretty(&report)?;
    std::fs::write(&args.output, json_out + "\n")
        .with_context(|| format!("cannot write report to {}", args.output.display()))?;

    print_report(&report);

    let mut manifest = RunManifest::new(
        "evaluate",
        json!({
            "alpha": settings.alpha,
            "iterations": settings.iterations,
            "burn_in": settings.burn_in,
        }),
    )
    .with_seed(settings.seed);
    manifest.add_input(&args.model_a)?;
    manifest.add_input(&args.model_b)?;
    manifest.add_input(&args.pairs)?;
    manifest.add_output(&args.output);
    manifest.write_alongside(&args.output)?;
    Ok(())
}

fn print_report(report: &EvalReport) {
    println!("mu (mean NDCG@3) over {} pairs: {:.4}", report.pair_count, report.mu);
    println!();
    println!("top-3 overlap      pairs");
    let overlap = report.overlap_histogram.as_array();
    for (label, count) in ["3", "2", "1", "0"].iter().zip(overlap) {
        println!("  {label} matches        {count:>6} {}", bar(count, report.pair_count));
    }
    println!();
    println!("NDCG@3 bucket      pairs");
    for (label, count) in BucketHistogram::LABELS.iter().zip(report.bucket_histogram.as_array()) {
        println!("  {label:<15} {count:>6} {}", bar(count, report.pair_count));
    }
}

fn bar(count: usize, total: usize) -> String {
    if total == 0 {
        return String::new();
    }
    "#".repeat((count * 40).div_ceil(total.max(1)).min(40))
}

fn cmd_infer(args: InferArgs) -> Result<()> {
    let model = TopicModel::load(&args.model)?;
    let docs = read_documents(&args.docs)?;
    let settings = args.inference.settings();
    // Streams keyed on document ids: output is independent of document
    // order and worker count.
    use rayon::prelude::*;
    let thetas = docs
        .par_iter()
        .map(|doc| {
            let per_doc = InferenceSettings {
                seed: derive_seed(settings.seed, fnv1a64(&doc.id), 0),
                ..settings
            };
            infer_theta(&model, doc, &per_doc)
        })
        .collect::<Result<Vec<_>, _>>()?;
    write_thetas(&args.output, &thetas)?;
    println!("inferred theta for {} documents -> {}", thetas.len(), args.output.display());

    let mut manifest = RunManifest::new(
        "infer",
        json!({
            "alpha": settings.alpha,
            "iterations": settings.iterations,
            "burn_in": settings.burn_in,
        }),
    )
    .with_seed(settings.seed);
    manifest.add_input(&args.model)?;
    manifest.add_input(&args.docs)?;
    manifest.add_output(&args.output);
    manifest.write_alongside(&args.output)?;
    Ok(())
}

fn cmd_inspect(args: InspectArgs) -> Result<()> {
    let model = TopicModel::load(&args.model)?;
    for (index, topic) in model.topics().iter().enumerate() {
        match args.sharpness {
            Some(rank) => {
                let slope = topic_sharpness(topic, rank)?;
                println!("topic {index} (m_Top{rank} = {slope:.5}):");
            }
            None => println!("topic {index}:"),
        }
        // Equal-probability words collapse into one line, the way fan-out
        // duplicates read best.
        let mut printed = 0usize;
        let mut rank = 1usize;
        let words: Vec<(&str, f64)> = topic.ranked_words().collect();
        let mut i = 0;
        while i < words.len() && printed < args.top {
            let score = words[i].1;
            let mut group = vec![words[i].0];
            let mut j = i + 1;
            while j < words.len() && words[j].1 == score {
                group.push(words[j].0);
                j += 1;
            }
            println!("  {rank:>4}. {} ({score:.5})", group.join(", "));
            printed += group.len();
            rank += group.len();
            i = j;
        }
    }
    Ok(())
}

fn sidecar_path(artifact: &Path, suffix: &str) -> PathBuf {
    let mut name = artifact.file_name().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    artifact.with_file_name(name)
}

fn load_file_config(explicit: Option<&Path>) -> Result<FileConfig> {
    let path = match explicit {
        Some(path) => Some(path.to_path_buf()),
        None => std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from),
    };
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
        }
        None => Ok(FileConfig::default()),
    }
}
