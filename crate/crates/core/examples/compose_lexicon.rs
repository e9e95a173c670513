//! Compose a bidirectional lexicon from TSV pair files and query it.
//!
//! Run: `cargo run --example compose_lexicon`

use std::collections::BTreeSet;
use std::io::Write;

use crosstopic::lexicon::{
    compose_lexicon_with_report, BilingualLexicon, ComposeOptions, Direction, LexiconSource,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;

    // Two small sources; real runs would point at dictionary exports.
    // Format: one `source<TAB>target` pair per line, `#` lines ignored.
    let general = dir.path().join("general.tsv");
    std::fs::File::create(&general)?.write_all(
        b"# general-purpose pairs\n\
          plane\tFlugzeug\n\
          plane\tFl\xc3\xa4che\n\
          plane\tFlieger\n\
          wing\tTragfl\xc3\xa4che\n\
          new york\tNew York\n\
          new york city hall\tRathaus von New York\n",
    )?;
    let legal = dir.path().join("legal.tsv");
    std::fs::File::create(&legal)?.write_all(b"directive\tRichtlinie\ncourt\tGericht\n")?;

    let sources = vec![
        LexiconSource::new("general", &general),
        LexiconSource::new("legal", &legal),
    ];

    // Compose everything. Words are lower-cased and NFC-normalized; pairs
    // with more than two terms on either side are dropped.
    let options = ComposeOptions::default();
    let (lexicon, reports) = compose_lexicon_with_report(&sources, &BTreeSet::new(), &options)?;
    println!("composed {lexicon}");
    for report in &reports {
        println!("  {}: {} pairs ({} dropped as too long)", report.tag, report.pairs, report.dropped_long);
    }

    // Lookups never fail; unknown words give an empty set.
    let translations = lexicon.translate("plane", Direction::AToB);
    println!("plane -> {translations:?}");
    let back = lexicon.translate("flieger", Direction::BToA);
    println!("flieger <- {back:?}");
    println!("zzzunknown -> {:?}", lexicon.translate("zzzunknown", Direction::AToB));

    // Domain-specific sources can be left out by tag.
    let excluded: BTreeSet<String> = ["legal".to_string()].into();
    let (without_legal, _) = compose_lexicon_with_report(&sources, &excluded, &options)?;
    println!(
        "without legal source: {} pairs (was {})",
        without_legal.pair_count(),
        lexicon.pair_count()
    );

    // The composed lexicon round-trips through a single file with a header
    // naming the included sources.
    let path = dir.path().join("composed.tsv");
    lexicon.save(&path)?;
    let loaded = BilingualLexicon::load(&path)?;
    assert_eq!(loaded, lexicon);
    println!("saved and re-loaded {} pairs from {}", loaded.pair_count(), path.display());
    Ok(())
}
