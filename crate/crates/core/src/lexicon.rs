//! Bidirectional word lexicons composed from tab-separated pair files.
//!
//! A lexicon maps words of language A to sets of words in language B and
//! vice versa. Symmetry is enforced by construction: inserting a pair always
//! inserts both directions, so `b ∈ forward(a)` iff `a ∈ backward(b)`.
//!
//! Tokens are lower-cased and Unicode-NFC-normalized at load time. Any
//! stemming or segmentation applied to the topic model's vocabulary is the
//! caller's responsibility: the lexicon matches by exact string, so its
//! entries must have gone through the same preprocessing as the model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Translation direction through a [`BilingualLexicon`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AToB,
    BToA,
}

/// One word pair as parsed from a source file, before composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationPair {
    pub source_word: String,
    pub target_word: String,
    /// Identifier of the lexicographic source the pair came from.
    pub origin_tag: String,
}

/// A pair file to feed into [`compose_lexicon`].
#[derive(Debug, Clone)]
pub struct LexiconSource {
    pub tag: String,
    pub path: PathBuf,
}

impl LexiconSource {
    pub fn new(tag: impl Into<String>, path: impl Into<PathBuf>) -> Self {
        Self { tag: tag.into(), path: path.into() }
    }
}

/// What to do with records that do not parse as two non-empty columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MalformedPolicy {
    /// Fail composition with a record-level error.
    #[default]
    Fail,
    /// Skip the record and count it in the source report.
    Skip,
}

/// Options for [`compose_lexicon`].
#[derive(Debug, Clone)]
pub struct ComposeOptions {
    /// Pairs where either side has more whitespace-separated terms than this
    /// are dropped. The default of 2 keeps single words and two-term phrases.
    pub max_terms: usize,
    pub on_malformed: MalformedPolicy,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        Self { max_terms: 2, on_malformed: MalformedPolicy::Fail }
    }
}

/// Per-source statistics from a composition run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceReport {
    pub tag: String,
    /// Unique pairs contributed after normalization and filtering.
    pub pairs: usize,
    /// Pairs dropped because one side exceeded `max_terms` terms.
    pub dropped_long: usize,
    /// Records skipped under [`MalformedPolicy::Skip`].
    pub skipped_malformed: usize,
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon source {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {reason}")]
    MalformedRecord { path: PathBuf, line: usize, reason: String },
    #[error("excluded tag `{tag}` does not match any source")]
    UnknownExcludedTag { tag: String },
    #[error("cannot write lexicon to {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Symmetric word-to-words association between two languages.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilingualLexicon {
    forward: BTreeMap<String, BTreeSet<String>>,
    backward: BTreeMap<String, BTreeSet<String>>,
    source_tags: BTreeSet<String>,
}

static EMPTY: BTreeSet<String> = BTreeSet::new();

impl BilingualLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a pair in both directions. Words are stored as given; use
    /// [`normalize_token`] first when loading raw input.
    pub fn insert_pair(&mut self, word_a: impl Into<String>, word_b: impl Into<String>) {
        let a = word_a.into();
        let b = word_b.into();
        self.forward.entry(a.clone()).or_default().insert(b.clone());
        self.backward.entry(b).or_default().insert(a);
    }

    pub fn add_source_tag(&mut self, tag: impl Into<String>) {
        self.source_tags.insert(tag.into());
    }

    /// Translation set for `word`; empty (never an error) for unknown words.
    pub fn translate(&self, word: &str, direction: Direction) -> &BTreeSet<String> {
        let map = match direction {
            Direction::AToB => &self.forward,
            Direction::BToA => &self.backward,
        };
        map.get(word).unwrap_or(&EMPTY)
    }

    pub fn contains_pair(&self, word_a: &str, word_b: &str) -> bool {
        self.forward.get(word_a).is_some_and(|s| s.contains(word_b))
    }

    /// Number of distinct pairs.
    pub fn pair_count(&self) -> usize {
        self.forward.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Tags of the sources that went into this lexicon.
    pub fn source_tags(&self) -> &BTreeSet<String> {
        &self.source_tags
    }

    pub fn words_a(&self) -> impl Iterator<Item = &str> {
        self.forward.keys().map(String::as_str)
    }

    pub fn words_b(&self) -> impl Iterator<Item = &str> {
        self.backward.keys().map(String::as_str)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.forward
            .iter()
            .flat_map(|(a, bs)| bs.iter().map(move |b| (a.as_str(), b.as_str())))
    }

    /// Writes the composed lexicon as `a<TAB>b` lines under a header naming
    /// the included source tags.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LexiconError> {
        let path = path.as_ref();
        let write = |path: &Path| -> std::io::Result<()> {
            let mut out = BufWriter::new(File::create(path)?);
            writeln!(out, "# bilingual lexicon ({} pairs)", self.pair_count())?;
            writeln!(out, "# sources: {}", self.source_tags.iter().cloned().collect::<Vec<_>>().join(","))?;
            for (a, b) in self.pairs() {
                writeln!(out, "{a}\t{b}")?;
            }
            out.flush()
        };
        write(path).map_err(|source| LexiconError::Write { path: path.to_path_buf(), source })
    }

    /// Loads a lexicon previously written by [`BilingualLexicon::save`].
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })?;
        let mut lexicon = Self::new();
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })?;
            if let Some(rest) = line.strip_prefix("# sources:") {
                for tag in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                    lexicon.add_source_tag(tag);
                }
                continue;
            }
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (a, b) = split_record(&line).map_err(|reason| LexiconError::MalformedRecord {
                path: path.to_path_buf(),
                line: idx + 1,
                reason,
            })?;
            lexicon.insert_pair(a, b);
        }
        Ok(lexicon)
    }
}

impl fmt::Display for BilingualLexicon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BilingualLexicon({} pairs, {} sources)",
            self.pair_count(),
            self.source_tags.len()
        )
    }
}

/// Lower-cases, NFC-normalizes and collapses internal whitespace.
pub fn normalize_token(raw: &str) -> String {
    let lowered = raw.trim().to_lowercase();
    let composed: String = lowered.nfc().collect();
    composed.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn term_count(token: &str) -> usize {
    token.split_whitespace().count()
}

fn split_record(line: &str) -> Result<(String, String), String> {
    let mut fields = line.split('\t');
    let a = fields.next().unwrap_or("");
    let Some(b) = fields.next() else {
        return Err("expected two tab-separated columns, found one".into());
    };
    if fields.next().is_some() {
        return Err("expected two tab-separated columns, found more".into());
    }
    let a = normalize_token(a);
    let b = normalize_token(b);
    if a.is_empty() || b.is_empty() {
        return Err("empty word after trimming".into());
    }
    Ok((a, b))
}

/// Parses one TSV pair file. `#`-prefixed lines and blank lines are ignored.
pub fn read_pair_file(
    source: &LexiconSource,
    options: &ComposeOptions,
) -> Result<(Vec<TranslationPair>, SourceReport), LexiconError> {
    let file = File::open(&source.path)
        .map_err(|e| LexiconError::Io { path: source.path.clone(), source: e })?;
    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    let mut report = SourceReport {
        tag: source.tag.clone(),
        pairs: 0,
        dropped_long: 0,
        skipped_malformed: 0,
    };
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| LexiconError::Io { path: source.path.clone(), source: e })?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (a, b) = match split_record(&line) {
            Ok(pair) => pair,
            Err(reason) => match options.on_malformed {
                MalformedPolicy::Fail => {
                    return Err(LexiconError::MalformedRecord {
                        path: source.path.clone(),
                        line: idx + 1,
                        reason,
                    })
                }
                MalformedPolicy::Skip => {
                    report.skipped_malformed += 1;
                    continue;
                }
            },
        };
        if term_count(&a) > options.max_terms || term_count(&b) > options.max_terms {
            report.dropped_long += 1;
            continue;
        }
        if seen.insert((a.clone(), b.clone())) {
            pairs.push(TranslationPair {
                source_word: a,
                target_word: b,
                origin_tag: source.tag.clone(),
            });
        }
    }
    report.pairs = pairs.len();
    Ok((pairs, report))
}

/// Composes a bidirectional lexicon from the union of all pairs in the
/// non-excluded sources.
///
/// Every excluded tag must name one of the given sources. Pairs where either
/// side exceeds `options.max_terms` terms are dropped; duplicates collapse
/// under set semantics. The result is symmetric by construction.
pub fn compose_lexicon(
    sources: &[LexiconSource],
    excluded_tags: &BTreeSet<String>,
    options: &ComposeOptions,
) -> Result<BilingualLexicon, LexiconError> {
    Ok(compose_lexicon_with_report(sources, excluded_tags, options)?.0)
}

/// Like [`compose_lexicon`] but also returns per-source statistics.
pub fn compose_lexicon_with_report(
    sources: &[LexiconSource],
    excluded_tags: &BTreeSet<String>,
    options: &ComposeOptions,
) -> Result<(BilingualLexicon, Vec<SourceReport>), LexiconError> {
    let present: BTreeSet<&str> = sources.iter().map(|s| s.tag.as_str()).collect();
    if let Some(tag) = excluded_tags.iter().find(|t| !present.contains(t.as_str())) {
        return Err(LexiconError::UnknownExcludedTag { tag: tag.clone() });
    }
    let mut lexicon = BilingualLexicon::new();
    let mut reports = Vec::new();
    for source in sources {
        if excluded_tags.contains(&source.tag) {
            continue;
        }
        let (pairs, report) = read_pair_file(source, options)?;
        for pair in pairs {
            lexicon.insert_pair(pair.source_word, pair.target_word);
        }
        lexicon.add_source_tag(&source.tag);
        reports.push(report);
    }
    Ok((lexicon, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tsv(dir: &tempfile::TempDir, name: &str, content: &str) -> LexiconSource {
        let path = dir.path().join(name);
        let mut f = File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        LexiconSource::new(name.trim_end_matches(".tsv"), path)
    }

    #[test]
    fn composes_union_with_forward_sets() {
        let dir = tempfile::tempdir().unwrap();
        let src = write_tsv(&dir, "toy.tsv", "plane\tFlugzeug\nplane\tFläche\n");
        let lex = compose_lexicon(&[src], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        let got: Vec<&str> = lex.translate("plane", Direction::AToB).iter().map(String::as_str).collect();
        assert_eq!(got, vec!["flugzeug", "fläche"]);
    }

    #[test]
    fn empty_source_list_gives_empty_lexicon() {
        let lex = compose_lexicon(&[], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        assert!(lex.is_empty());
        assert!(lex.translate("anything", Direction::AToB).is_empty());
        assert!(lex.translate("anything", Direction::BToA).is_empty());
    }

    #[test]
    fn drops_phrases_longer_than_max_terms() {
        let dir = tempfile::tempdir().unwrap();
        let src = write_tsv(
            &dir,
            "mixed.tsv",
            "new york city hall\tRathaus\nnew york\tNew York\nplane\tFlugzeug\n",
        );
        let lex = compose_lexicon(&[src], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        assert!(!lex.contains_pair("new york city hall", "rathaus"));
        assert!(lex.contains_pair("new york", "new york"));
        assert_eq!(lex.pair_count(), 2);
    }

    #[test]
    fn unknown_word_translates_to_empty_set() {
        let lex = BilingualLexicon::new();
        assert!(lex.translate("zzzunknown", Direction::AToB).is_empty());
    }

    #[test]
    fn symmetry_holds_after_composition() {
        let dir = tempfile::tempdir().unwrap();
        let src = write_tsv(&dir, "s.tsv", "a\tx\na\ty\nb\tx\nc\tz\n");
        let lex = compose_lexicon(&[src], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        for (a, b) in lex.pairs().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>() {
            assert!(lex.translate(&b, Direction::BToA).contains(&a));
        }
        for b in lex.words_b().map(str::to_string).collect::<Vec<_>>() {
            for a in lex.translate(&b, Direction::BToA).clone() {
                assert!(lex.translate(&a, Direction::AToB).contains(&b));
            }
        }
    }

    #[test]
    fn composition_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let src = write_tsv(&dir, "s.tsv", "a\tx\nb\ty\n");
        let once = compose_lexicon(std::slice::from_ref(&src), &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        let twice =
            compose_lexicon(&[src.clone(), src], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        assert_eq!(once.pair_count(), twice.pair_count());
        assert_eq!(once.pairs().collect::<Vec<_>>(), twice.pairs().collect::<Vec<_>>());
    }

    #[test]
    fn excluding_a_source_yields_subset() {
        let dir = tempfile::tempdir().unwrap();
        let s1 = write_tsv(&dir, "general.tsv", "a\tx\nb\ty\n");
        let s2 = write_tsv(&dir, "legal.tsv", "c\tz\na\tx\n");
        let all = compose_lexicon(&[s1.clone(), s2.clone()], &BTreeSet::new(), &ComposeOptions::default())
            .unwrap();
        let excl: BTreeSet<String> = ["legal".to_string()].into();
        let some = compose_lexicon(&[s1, s2], &excl, &ComposeOptions::default()).unwrap();
        assert!(some.pairs().all(|(a, b)| all.contains_pair(a, b)));
        assert!(some.pair_count() < all.pair_count());
        assert!(!some.source_tags().contains("legal"));
        assert!(all.source_tags().contains("legal"));
    }

    #[test]
    fn unknown_excluded_tag_is_an_error() {
        let excl: BTreeSet<String> = ["nonexistent".to_string()].into();
        let err = compose_lexicon(&[], &excl, &ComposeOptions::default()).unwrap_err();
        assert!(matches!(err, LexiconError::UnknownExcludedTag { .. }));
    }

    #[test]
    fn unreadable_file_error_names_the_file() {
        let src = LexiconSource::new("missing", "/nonexistent/path.tsv");
        let err =
            compose_lexicon(&[src], &BTreeSet::new(), &ComposeOptions::default()).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/path.tsv"));
    }

    #[test]
    fn malformed_record_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let src = write_tsv(&dir, "bad.tsv", "a\tx\nnot-a-pair\n");
        let err =
            compose_lexicon(std::slice::from_ref(&src), &BTreeSet::new(), &ComposeOptions::default()).unwrap_err();
        assert!(err.to_string().contains(":2:"), "got: {err}");

        let opts = ComposeOptions { on_malformed: MalformedPolicy::Skip, ..Default::default() };
        let (lex, reports) =
            compose_lexicon_with_report(&[src], &BTreeSet::new(), &opts).unwrap();
        assert_eq!(lex.pair_count(), 1);
        assert_eq!(reports[0].skipped_malformed, 1);
    }

    #[test]
    fn tokens_are_lowercased_and_nfc_normalized() {
        let dir = tempfile::tempdir().unwrap();
        // "Fla\u{0308}che" is NFD (a + combining diaeresis); NFC folds it to "fläche".
        let src = write_tsv(&dir, "s.tsv", "Plane\tFla\u{0308}che\n");
        let lex = compose_lexicon(&[src], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        assert!(lex.contains_pair("plane", "fl\u{00e4}che"));
    }

    #[test]
    fn save_load_round_trip_preserves_pairs_and_tags() {
        let dir = tempfile::tempdir().unwrap();
        let src = write_tsv(&dir, "toy.tsv", "plane\tFlugzeug\nwing\tTragfläche\n");
        let lex = compose_lexicon(&[src], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        let path = dir.path().join("composed.tsv");
        lex.save(&path).unwrap();
        let loaded = BilingualLexicon::load(&path).unwrap();
        assert_eq!(lex, loaded);
    }

    #[test]
    fn ten_pair_file_survivor_count() {
        // Hand-built ten-pair file; four pairs have a side longer than two
        // terms, so six survive (frozen from counting the lines by hand).
        let dir = tempfile::tempdir().unwrap();
        let src = write_tsv(
            &dir,
            "ten.tsv",
            concat!(
                "one\teins\n",
                "two words\tzwei wörter\n",
                "three words here\tdrei\n",
                "four\tvier lange wörter hier\n",
                "five\tfünf\n",
                "six\tsechs\n",
                "seven eight nine\tsieben\n",
                "ten\tzehn elf zwölf\n",
                "eleven\telf\n",
                "twelve\tzwölf\n",
            ),
        );
        let (lex, reports) =
            compose_lexicon_with_report(&[src], &BTreeSet::new(), &ComposeOptions::default()).unwrap();
        assert_eq!(lex.pair_count(), 6);
        assert_eq!(reports[0].dropped_long, 4);
        assert_eq!(reports[0].pairs, 6);
    }
}
