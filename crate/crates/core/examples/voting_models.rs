//! Score one candidate's voters with every voting model family.
//!
//! Run: `cargo run --example voting_models`

use crosstopic::voting::{evaluate, Voter, VotingFamily, VotingModelSpec, SPEC_GRAMMAR};

fn main() {
    // Voters are (rank, probability) pairs a candidate collected from its
    // re-translations in the source topic. This set belongs to "Flugzeug"
    // in the aviation walkthrough, plus a weak straggler.
    let voters = vec![
        Voter::new(1, 0.019),  // plane
        Voter::new(2, 0.018),  // aircraft
        Voter::new(9, 0.012),  // airplane
        Voter::new(40, 0.001), // a distant homonym
    ];

    println!("{:<22} {:>10}", "spec", "score");
    for family in VotingFamily::ALL {
        let spec = VotingModelSpec::new(family);
        println!("{:<22} {:>10.5}", spec.to_string(), evaluate(&spec, &voters));
    }

    // Top-n cutoffs look at the n voters with the largest probability.
    println!();
    for spec_str in ["combsum-top:3", "combsum-top:2", "rr:top=2,x=2", "combrrpen:top=3,eps=1e-9"] {
        let spec: VotingModelSpec = spec_str.parse().unwrap();
        println!("{:<22} {:>10.5}", spec_str, evaluate(&spec, &voters));
    }

    // Specs are parsed from a small grammar (also used by the CLI).
    println!("\n{SPEC_GRAMMAR}");
}
