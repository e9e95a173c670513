//! Voting models that aggregate a candidate's voters into one score.
//!
//! A voter is a re-translation of a candidate found in the source topic,
//! carrying the 1-based rank and probability it holds there. "Top-n voters"
//! always means the n voters with the largest probability, ties broken by
//! smaller rank and then insertion order; the reciprocal-rank term always
//! uses the voter's topic-global rank.
//!
//! | Family       | Score for voters `V`, cutoff `n`                                 |
//! |--------------|------------------------------------------------------------------|
//! | `Votes`      | `|V|`                                                            |
//! | `CombSUM`    | `Σ p` over top-n                                                 |
//! | `CombGSUM`   | geometric mean of top-n probabilities                            |
//! | `RR^x`       | `Σ (1/rank)^x` over top-n                                        |
//! | `CombSUM·RR` | `Σ p·(1/rank)^x` over top-n                                      |
//! | `CombAVG`    | `CombSUM_n / min(|V|, n)`                                        |
//! | `CombNOR`    | `(CombSUM_n + CombAVG_n) / (min(|V|, n) + 1)`                    |
//! | `CombRRPEN`  | `RR(top-1, x=1) + CombSUM_n / min(|V|, n)`; `ε` when `V` empty   |
//! | `CombGNOR`   | `(CombSUM_n + CombGSUM_n) / (min(|V|, n) + 1)`                   |
//!
//! With an empty voter set every family scores 0.0 except `CombRRPEN`,
//! whose table definition assigns the floor `ε` ("the smallest possible
//! score for an entry").

use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;

use thiserror::Error;

/// A `(rank, probability)` pair taken from the source topic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Voter {
    rank: usize,
    probability: f64,
}

impl Voter {
    /// Requires `rank ≥ 1` and a probability in `(0, 1]`.
    pub fn new(rank: usize, probability: f64) -> Self {
        assert!(rank >= 1, "voter rank must be 1-based");
        assert!(
            probability > 0.0 && probability <= 1.0 && probability.is_finite(),
            "voter probability must lie in (0, 1], got {probability}"
        );
        Self { rank, probability }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }
}

/// The nine scoring families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VotingFamily {
    Votes,
    CombSum,
    CombGSum,
    ReciprocalRank,
    CombSumRr,
    CombAvg,
    CombNor,
    CombRrPen,
    CombGNor,
}

impl VotingFamily {
    pub const ALL: [VotingFamily; 9] = [
        VotingFamily::Votes,
        VotingFamily::CombSum,
        VotingFamily::CombGSum,
        VotingFamily::ReciprocalRank,
        VotingFamily::CombSumRr,
        VotingFamily::CombAvg,
        VotingFamily::CombNor,
        VotingFamily::CombRrPen,
        VotingFamily::CombGNor,
    ];

    fn name(self) -> &'static str {
        match self {
            VotingFamily::Votes => "votes",
            VotingFamily::CombSum => "combsum",
            VotingFamily::CombGSum => "combgsum",
            VotingFamily::ReciprocalRank => "rr",
            VotingFamily::CombSumRr => "combsumrr",
            VotingFamily::CombAvg => "combavg",
            VotingFamily::CombNor => "combnor",
            VotingFamily::CombRrPen => "combrrpen",
            VotingFamily::CombGNor => "combgnor",
        }
    }

    fn uses_exponent(self) -> bool {
        matches!(
            self,
            VotingFamily::ReciprocalRank | VotingFamily::CombSumRr | VotingFamily::CombRrPen
        )
    }
}

impl fmt::Display for VotingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A fully parameterized voting model.
#[derive(Debug, Clone, PartialEq)]
pub struct VotingModelSpec {
    pub family: VotingFamily,
    /// Top-n voter cutoff; `None` means unbounded.
    pub n: Option<NonZeroUsize>,
    /// Exponent for the reciprocal-rank families.
    pub x: f64,
    /// Floor returned by `CombRRPEN` on an empty voter set. When unset the
    /// translator fills in the source model's smallest probability.
    pub epsilon_floor: Option<f64>,
    /// `CombRRPEN` only: apply the spec's `n` and `x` to the reciprocal-rank
    /// term instead of the literal table reading `RR(top-1, x=1)`.
    pub pen_rr_from_spec: bool,
}

impl VotingModelSpec {
    pub fn new(family: VotingFamily) -> Self {
        Self { family, n: None, x: 1.0, epsilon_floor: None, pen_rr_from_spec: false }
    }

    pub fn with_top(mut self, n: usize) -> Self {
        self.n = NonZeroUsize::new(n);
        self
    }

    pub fn with_exponent(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn with_epsilon_floor(mut self, epsilon: f64) -> Self {
        self.epsilon_floor = Some(epsilon);
        self
    }
}

impl fmt::Display for VotingModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.family.name())?;
        let mut params = Vec::new();
        if let Some(n) = self.n {
            params.push(format!("top={n}"));
        }
        if self.family.uses_exponent() && self.x != 1.0 {
            params.push(format!("x={}", self.x));
        }
        if let Some(eps) = self.epsilon_floor {
            params.push(format!("eps={eps}"));
        }
        if self.pen_rr_from_spec {
            params.push("pen-rr=spec".into());
        }
        if !params.is_empty() {
            write!(f, ":{}", params.join(","))?;
        }
        Ok(())
    }
}

pub const SPEC_GRAMMAR: &str = "\
spec    := family | family \"-top:\" N | family \":\" param (\",\" param)*
family  := votes | combsum | combgsum | rr | combsumrr | combavg
         | combnor | combrrpen | combgnor
param   := \"top=\" (N | \"inf\")      voter cutoff, N >= 1
         | \"x=\" X                  rank exponent (rr, combsumrr, combrrpen)
         | \"eps=\" E                empty-voter floor (combrrpen), E > 0
         | \"pen-rr=\" (\"fixed\" | \"spec\")   combrrpen RR term parameters
examples: combsum, combsum-top:3, rr:top=2,x=2, combrrpen:top=3";

#[derive(Debug, Error, PartialEq)]
#[error("invalid voting spec `{input}`: {reason}")]
pub struct SpecParseError {
    pub input: String,
    pub reason: String,
}

impl FromStr for VotingFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VotingFamily::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

impl FromStr for VotingModelSpec {
    type Err = SpecParseError;

    /// Parses the spec grammar, e.g. `combsum`, `combsum-top:3`,
    /// `rr:top=2,x=2`, `combrrpen:top=3,eps=1e-9`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| SpecParseError { input: input.to_string(), reason };
        let (family_str, params) = match input.split_once(':') {
            Some((head, tail)) => (head, Some(tail)),
            None => (input, None),
        };
        // `family-top:3` shorthand.
        let (family_str, shorthand_top) = match family_str.strip_suffix("-top") {
            Some(stripped) => (stripped, true),
            None => (family_str, false),
        };
        let family: VotingFamily =
            family_str.trim().parse().map_err(err)?;
        let mut spec = VotingModelSpec::new(family);

        if shorthand_top {
            let Some(value) = params else {
                return Err(err("`-top:` needs a number".into()));
            };
            spec.n = Some(parse_top(value).map_err(err)?);
            validate_spec(&spec).map_err(err)?;
            return Ok(spec);
        }

        if let Some(params) = params {
            for param in params.split(',') {
                let Some((key, value)) = param.split_once('=') else {
                    return Err(err(format!("parameter `{param}` is not key=value")));
                };
                match key.trim() {
                    "top" => {
                        spec.n = if value.trim() == "inf" {
                            None
                        } else {
                            Some(parse_top(value).map_err(err)?)
                        };
                    }
                    "x" => {
                        let x: f64 = value
                            .trim()
                            .parse()
                            .map_err(|_| err(format!("`{value}` is not a number")))?;
                        if !(x.is_finite() && x > 0.0) {
                            return Err(err("x must be > 0".into()));
                        }
                        spec.x = x;
                    }
                    "eps" => {
                        let e: f64 = value
                            .trim()
                            .parse()
                            .map_err(|_| err(format!("`{value}` is not a number")))?;
                        if !(e.is_finite() && e > 0.0) {
                            return Err(err("eps must be > 0".into()));
                        }
                        spec.epsilon_floor = Some(e);
                    }
                    "pen-rr" => match value.trim() {
                        "fixed" => spec.pen_rr_from_spec = false,
                        "spec" => spec.pen_rr_from_spec = true,
                        other => return Err(err(format!("pen-rr must be fixed|spec, got `{other}`"))),
                    },
                    other => return Err(err(format!("unknown parameter `{other}`"))),
                }
            }
        }
        validate_spec(&spec).map_err(err)?;
        Ok(spec)
    }
}

fn parse_top(value: &str) -> Result<NonZeroUsize, String> {
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a positive integer"))?;
    NonZeroUsize::new(n).ok_or_else(|| "top must be >= 1".into())
}

fn validate_spec(spec: &VotingModelSpec) -> Result<(), String> {
    if spec.family == VotingFamily::Votes && spec.n.is_some() {
        return Err("votes counts all voters and takes no top cutoff".into());
    }
    if spec.x != 1.0 && !spec.family.uses_exponent() {
        return Err(format!("x does not apply to {}", spec.family));
    }
    if spec.epsilon_floor.is_some() && spec.family != VotingFamily::CombRrPen {
        return Err(format!("eps only applies to combrrpen, not {}", spec.family));
    }
    if spec.pen_rr_from_spec && spec.family != VotingFamily::CombRrPen {
        return Err("pen-rr only applies to combrrpen".into());
    }
    Ok(())
}

/// Indices of the top-n voters by descending probability; ties go to the
/// smaller rank, then to insertion order (the sort is stable).
fn top_n_indices(voters: &[Voter], n: Option<NonZeroUsize>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..voters.len()).collect();
    order.sort_by(|&i, &j| {
        voters[j]
            .probability
            .total_cmp(&voters[i].probability)
            .then_with(|| voters[i].rank.cmp(&voters[j].rank))
    });
    if let Some(n) = n {
        order.truncate(n.get());
    }
    order
}

fn effective_count(voters: &[Voter], n: Option<NonZeroUsize>) -> usize {
    match n {
        Some(n) => voters.len().min(n.get()),
        None => voters.len(),
    }
}

/// Number of voters, regardless of any cutoff.
pub fn score_votes(voters: &[Voter]) -> f64 {
    voters.len() as f64
}

/// Sum of the top-n voter probabilities.
pub fn score_comb_sum(voters: &[Voter], n: Option<NonZeroUsize>) -> f64 {
    top_n_indices(voters, n)
        .iter()
        .map(|&i| voters[i].probability)
        .sum()
}

/// Geometric mean of the top-n voter probabilities.
pub fn score_comb_gsum(voters: &[Voter], n: Option<NonZeroUsize>) -> f64 {
    let selected = top_n_indices(voters, n);
    match selected.as_slice() {
        [] => 0.0,
        [i] => voters[*i].probability,
        many => {
            let log_sum: f64 = many.iter().map(|&i| voters[i].probability.ln()).sum();
            (log_sum / many.len() as f64).exp()
        }
    }
}

/// Sum of `(1/rank)^x` over the top-n voters.
pub fn score_rr(voters: &[Voter], n: Option<NonZeroUsize>, x: f64) -> f64 {
    top_n_indices(voters, n)
        .iter()
        .map(|&i| (1.0 / voters[i].rank as f64).powf(x))
        .sum()
}

/// Sum of `probability · (1/rank)^x` over the top-n voters.
pub fn score_comb_sum_rr(voters: &[Voter], n: Option<NonZeroUsize>, x: f64) -> f64 {
    top_n_indices(voters, n)
        .iter()
        .map(|&i| voters[i].probability * (1.0 / voters[i].rank as f64).powf(x))
        .sum()
}

/// Arithmetic mean of the top-n voter probabilities.
pub fn score_comb_avg(voters: &[Voter], n: Option<NonZeroUsize>) -> f64 {
    let m = effective_count(voters, n);
    if m == 0 {
        return 0.0;
    }
    score_comb_sum(voters, n) / m as f64
}

/// `(CombSUM_n + CombAVG_n) / (min(|V|, n) + 1)`. The `min` term uses the
/// full voter count, matching the table formula literally.
pub fn score_comb_nor(voters: &[Voter], n: Option<NonZeroUsize>) -> f64 {
    let m = effective_count(voters, n);
    (score_comb_sum(voters, n) + score_comb_avg(voters, n)) / (m as f64 + 1.0)
}

/// `RR(top-1, x=1) + CombSUM_n / min(|V|, n)`; returns `epsilon_floor` for an
/// empty voter set (the table's ε branch).
pub fn score_comb_rr_pen(voters: &[Voter], n: Option<NonZeroUsize>, epsilon_floor: f64) -> f64 {
    score_comb_rr_pen_with(voters, n, 1.0, false, epsilon_floor)
}

/// [`score_comb_rr_pen`] with the RR term overridable: with
/// `rr_from_spec = true` the reciprocal-rank term uses the given `n` and `x`
/// instead of the literal `RR(top-1, x=1)` reading.
pub fn score_comb_rr_pen_with(
    voters: &[Voter],
    n: Option<NonZeroUsize>,
    x: f64,
    rr_from_spec: bool,
    epsilon_floor: f64,
) -> f64 {
    if voters.is_empty() {
        return epsilon_floor;
    }
    let rr = if rr_from_spec {
        score_rr(voters, n, x)
    } else {
        score_rr(voters, NonZeroUsize::new(1), 1.0)
    };
    let m = effective_count(voters, n);
    rr + score_comb_sum(voters, n) / m as f64
}

/// `(CombSUM_n + CombGSUM_n) / (min(|V|, n) + 1)`.
pub fn score_comb_gnor(voters: &[Voter], n: Option<NonZeroUsize>) -> f64 {
    let m = effective_count(voters, n);
    (score_comb_sum(voters, n) + score_comb_gsum(voters, n)) / (m as f64 + 1.0)
}

/// Dispatches to the family-specific scoring function.
pub fn evaluate(spec: &VotingModelSpec, voters: &[Voter]) -> f64 {
    match spec.family {
        VotingFamily::Votes => score_votes(voters),
        VotingFamily::CombSum => score_comb_sum(voters, spec.n),
        VotingFamily::CombGSum => score_comb_gsum(voters, spec.n),
        VotingFamily::ReciprocalRank => score_rr(voters, spec.n, spec.x),
        VotingFamily::CombSumRr => score_comb_sum_rr(voters, spec.n, spec.x),
        VotingFamily::CombAvg => score_comb_avg(voters, spec.n),
        VotingFamily::CombNor => score_comb_nor(voters, spec.n),
        VotingFamily::CombRrPen => score_comb_rr_pen_with(
            voters,
            spec.n,
            spec.x,
            spec.pen_rr_from_spec,
            spec.epsilon_floor.unwrap_or(0.0),
        ),
        VotingFamily::CombGNor => score_comb_gnor(voters, spec.n),
    }
}
