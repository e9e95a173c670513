//! End-to-end tests of the `crosstopic` binary: every subcommand, the
//! documented error exits, and output determinism.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crosstopic::evaluation::{evaluate_consistency, AlignedPair};
use crosstopic::inference::{Document, InferenceSettings};
use crosstopic::topic_model::{Topic, TopicModel};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_crosstopic"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn sha256(path: &Path) -> String {
    crosstopic::cli::sha256_of_file(path).unwrap()
}

#[test]
fn lexicon_build_reports_per_source_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("general.tsv");
    let b = dir.path().join("legal.tsv");
    std::fs::write(&a, "plane\tFlugzeug\nwing\tTragfläche\n").unwrap();
    std::fs::write(&b, "court\tGericht\n").unwrap();
    let out_path = dir.path().join("lex.tsv");

    let out = run(&[
        "lexicon",
        "--source",
        &format!("general={}", a.display()),
        "--source",
        &format!("legal={}", b.display()),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("general"), "{stdout}");
    assert!(stdout.contains("legal"), "{stdout}");

    let lexicon = crosstopic::BilingualLexicon::load(&out_path).unwrap();
    assert_eq!(lexicon.pair_count(), 3);
    assert!(out_path.with_file_name("lex.tsv.manifest.json").exists());
}

#[test]
fn lexicon_build_exclude_removes_tags_from_header() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("general.tsv");
    let b = dir.path().join("eurovoc.tsv");
    let c = dir.path().join("iate.tsv");
    std::fs::write(&a, "plane\tFlugzeug\n").unwrap();
    std::fs::write(&b, "directive\tRichtlinie\n").unwrap();
    std::fs::write(&c, "treaty\tVertrag\n").unwrap();
    let out_path = dir.path().join("lex.tsv");

    let out = run(&[
        "lexicon",
        "--source",
        a.to_str().unwrap(),
        "--source",
        b.to_str().unwrap(),
        "--source",
        c.to_str().unwrap(),
        "--exclude",
        "eurovoc,iate",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_success(&out);
    let header = std::fs::read_to_string(&out_path).unwrap();
    assert!(header.contains("# sources: general"));
    assert!(!header.contains("eurovoc") && !header.contains("iate"));
    let lexicon = crosstopic::BilingualLexicon::load(&out_path).unwrap();
    assert_eq!(
        lexicon.source_tags().iter().cloned().collect::<Vec<_>>(),
        vec!["general".to_string()]
    );
}

#[test]
fn lexicon_build_missing_file_fails_with_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "lexicon",
        "--source",
        "/nonexistent/missing.tsv",
        "--output",
        dir.path().join("lex.tsv").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing.tsv"), "{stderr}");
}

#[test]
fn translate_aviation_fixture_reproduces_golden_scores() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("de.json");
    let out = run(&[
        "translate",
        "--model",
        fixture("aviation_model.json").to_str().unwrap(),
        "--lexicon",
        fixture("aviation_lexicon.tsv").to_str().unwrap(),
        "--voting",
        "combsum-top:4",
        "--n-best",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_success(&out);

    let model = TopicModel::load(&out_path).unwrap();
    let topic = model.topic(0);
    let flieger = topic.score("flieger").unwrap();
    let flugzeug = topic.score("flugzeug").unwrap();
    assert!((flieger - 0.013).abs() <= 0.0005, "flieger {flieger}");
    assert!((flugzeug - 0.012).abs() <= 0.0005, "flugzeug {flugzeug}");
    assert!(out_path.with_file_name("de.json.provenance.json").exists());
    assert!(out_path.with_file_name("de.json.manifest.json").exists());
}

#[test]
fn translate_plain_is_deterministic_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let digests: Vec<(String, String)> = (0..2)
        .map(|i| {
            let out_path = dir.path().join(format!("run{i}.json"));
            let out = run(&[
                "translate",
                "--model",
                fixture("aviation_model.json").to_str().unwrap(),
                "--lexicon",
                fixture("aviation_lexicon.tsv").to_str().unwrap(),
                "--voting",
                "plain-top:2",
                "--seed",
                "7",
                "--output",
                out_path.to_str().unwrap(),
            ]);
            assert_success(&out);
            let provenance = out_path.with_file_name(format!("run{i}.json.provenance.json"));
            (sha256(&out_path), sha256(&provenance))
        })
        .collect();
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn translate_output_is_invariant_in_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let digests: Vec<String> = ["1", "4", "8"]
        .iter()
        .enumerate()
        .map(|(i, jobs)| {
            let out_path = dir.path().join(format!("jobs{i}.json"));
            let out = run(&[
                "translate",
                "--jobs",
                jobs,
                "--model",
                fixture("aviation_model.json").to_str().unwrap(),
                "--lexicon",
                fixture("aviation_lexicon.tsv").to_str().unwrap(),
                "--voting",
                "combsum-top:4",
                "--n-best",
                "3",
                "--output",
                out_path.to_str().unwrap(),
            ]);
            assert_success(&out);
            sha256(&out_path)
        })
        .collect();
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[1], digests[2]);
}

#[test]
fn translate_honors_config_from_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("default.toml");
    std::fs::write(&config, "voting = \"combsum-top:4\"\nn_best = 3\n").unwrap();
    let out_path = dir.path().join("de.json");
    let out = bin()
        .env("CROSSTOPIC_CONFIG", &config)
        .args([
            "translate",
            "--model",
            fixture("aviation_model.json").to_str().unwrap(),
            "--lexicon",
            fixture("aviation_lexicon.tsv").to_str().unwrap(),
            "--output",
            out_path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_success(&out);
    let model = TopicModel::load(&out_path).unwrap();
    assert!((model.topic(0).score("flieger").unwrap() - 0.013).abs() <= 0.0005);
}

#[test]
fn translate_rejects_invalid_voting_spec_with_grammar_hint() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "translate",
        "--model",
        fixture("aviation_model.json").to_str().unwrap(),
        "--lexicon",
        fixture("aviation_lexicon.tsv").to_str().unwrap(),
        "--voting",
        "combsun-top:4",
        "--output",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown family"), "{stderr}");
    assert!(stderr.contains("spec"), "grammar hint missing: {stderr}");
}

#[test]
fn translate_reads_toml_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.toml");
    std::fs::write(&config, "voting = \"combsum-top:4\"\nn_best = 3\nkeep_origin = \"never\"\n")
        .unwrap();
    let out_path = dir.path().join("de.json");
    let out = run(&[
        "translate",
        "--model",
        fixture("aviation_model.json").to_str().unwrap(),
        "--lexicon",
        fixture("aviation_lexicon.tsv").to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_success(&out);
    let model = TopicModel::load(&out_path).unwrap();
    assert!((model.topic(0).score("flieger").unwrap() - 0.013).abs() <= 0.0005);
}

/// Disjoint-support toy model: inference is deterministic, so CLI and
/// library runs can be compared exactly.
fn write_toy_world(dir: &Path) -> (PathBuf, PathBuf) {
    let topics: Vec<Topic> = (0..5)
        .map(|t| {
            Topic::new((0..6).map(|w| (format!("t{t}w{w}"), 1.0 / (w + 1) as f64))).unwrap()
        })
        .collect();
    let vocab: BTreeSet<String> = topics
        .iter()
        .flat_map(|t| t.ranked_words().map(|(w, _)| w.to_string()))
        .collect();
    let model = TopicModel::new(topics, vocab, "en").unwrap().normalize().unwrap();
    let model_path = dir.join("model.json");
    model.save(&model_path).unwrap();

    let pairs: Vec<AlignedPair> = (0..6)
        .map(|i| {
            let tokens: Vec<String> = model
                .topic(i % 5)
                .ranked_words()
                .take(3)
                .chain(model.topic((i + 2) % 5).ranked_words().take(2))
                .flat_map(|(w, _)| std::iter::repeat_n(w.to_string(), 4))
                .collect();
            AlignedPair {
                pair_id: format!("p{i}"),
                doc_a: Document::new(format!("a{i}"), tokens.clone()),
                doc_b: Document::new(format!("b{i}"), tokens),
            }
        })
        .collect();
    let pairs_path = dir.join("pairs.jsonl");
    let lines: String =
        pairs.iter().map(|p| serde_json::to_string(p).unwrap() + "\n").collect();
    std::fs::write(&pairs_path, lines).unwrap();
    (model_path, pairs_path)
}

#[test]
fn evaluate_self_comparison_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let (model_path, pairs_path) = write_toy_world(dir.path());
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "evaluate",
        "--model-a",
        model_path.to_str().unwrap(),
        "--model-b",
        model_path.to_str().unwrap(),
        "--pairs",
        pairs_path.to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("1.0000"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["mu"], 1.0);
    assert_eq!(report["overlap_histogram"]["three"], 6);
}

#[test]
fn evaluate_matches_library_call_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let (model_path, pairs_path) = write_toy_world(dir.path());
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "evaluate",
        "--model-a",
        model_path.to_str().unwrap(),
        "--model-b",
        model_path.to_str().unwrap(),
        "--pairs",
        pairs_path.to_str().unwrap(),
        "--seed",
        "11",
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert_success(&out);

    let model = TopicModel::load(&model_path).unwrap();
    let pairs = crosstopic::evaluation::read_aligned_pairs(&pairs_path).unwrap();
    let settings = InferenceSettings::default().with_seed(11);
    let expected = evaluate_consistency(&model, &model, &pairs, &settings).unwrap();
    let from_cli: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(from_cli, serde_json::to_value(&expected).unwrap());
}

#[test]
fn evaluate_rejects_topic_count_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let (model_path, pairs_path) = write_toy_world(dir.path());
    // A second model with a different K.
    let topics: Vec<Topic> = (0..3)
        .map(|t| Topic::new([(format!("t{t}w0"), 1.0)]).unwrap())
        .collect();
    let vocab = topics
        .iter()
        .flat_map(|t| t.ranked_words().map(|(w, _)| w.to_string()))
        .collect();
    let other = TopicModel::new(topics, vocab, "de").unwrap().normalize().unwrap();
    let other_path = dir.path().join("other.json");
    other.save(&other_path).unwrap();

    let out = run(&[
        "evaluate",
        "--model-a",
        model_path.to_str().unwrap(),
        "--model-b",
        other_path.to_str().unwrap(),
        "--pairs",
        pairs_path.to_str().unwrap(),
        "--output",
        dir.path().join("r.json").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("topic count"));
}

#[test]
fn infer_writes_theta_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let (model_path, _) = write_toy_world(dir.path());
    let docs_path = dir.path().join("docs.jsonl");
    std::fs::write(
        &docs_path,
        "{\"id\":\"d0\",\"tokens\":[\"t0w0\",\"t0w1\",\"t0w0\"]}\n{\"id\":\"d1\",\"tokens\":[]}\n",
    )
    .unwrap();
    let out_path = dir.path().join("thetas.jsonl");
    let out = run(&[
        "infer",
        "--model",
        model_path.to_str().unwrap(),
        "--docs",
        docs_path.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_success(&out);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["id"], "d0");
    assert!(first["theta"][0].as_f64().unwrap() > 0.9);
    let second: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(second["theta"][0], 0.2);
}

#[test]
fn inspect_groups_equal_probabilities_and_prints_sharpness() {
    let dir = tempfile::tempdir().unwrap();
    // Two words share a probability, the rest are uniform below them.
    let topic = Topic::new([
        ("anton".to_string(), 0.3),
        ("berta".to_string(), 0.3),
        ("caesar".to_string(), 0.1),
        ("dora".to_string(), 0.1),
        ("emil".to_string(), 0.1),
        ("fritz".to_string(), 0.1),
    ])
    .unwrap();
    let uniform = Topic::new(
        ["u1", "u2", "u3", "u4", "u5", "u6"].map(|w| (w.to_string(), 0.25)),
    )
    .unwrap();
    let vocab = topic
        .ranked_words()
        .chain(uniform.ranked_words())
        .map(|(w, _)| w.to_string())
        .collect();
    let model = TopicModel::new(vec![topic, uniform], vocab, "en").unwrap();
    let model_path = dir.path().join("m.json");
    model.save(&model_path).unwrap();

    let out = run(&[
        "inspect",
        "--model",
        model_path.to_str().unwrap(),
        "--top",
        "4",
        "--sharpness",
        "5",
    ]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("anton, berta (0.30000)"), "{stdout}");
    // Uniform topic has slope zero.
    assert!(stdout.contains("m_Top5 = 0.00000"), "{stdout}");
}

#[test]
fn inspect_translated_aviation_model_lists_flieger_and_flugzeug_first() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("de.json");
    assert_success(&run(&[
        "translate",
        "--model",
        fixture("aviation_model.json").to_str().unwrap(),
        "--lexicon",
        fixture("aviation_lexicon.tsv").to_str().unwrap(),
        "--voting",
        "combsum-top:4",
        "--n-best",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]));
    let out = run(&["inspect", "--model", out_path.to_str().unwrap(), "--top", "2"]);
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let topic0 = stdout.split("topic 1").next().unwrap();
    assert!(topic0.contains("flieger"), "{stdout}");
    assert!(topic0.contains("flugzeug"), "{stdout}");
}
