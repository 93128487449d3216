//! Seeded simulators for the two macroscopic entities: a pair of connected
//! water vessels and a pair of soccer teams facing a bribable referee.
//!
//! Observables 1 and 2 act on the left side, 3 and 4 on the right. For the
//! vessels, 1 and 3 are siphons (up when at least the threshold volume comes
//! out) and 2 and 4 are transparency checks. For the soccer teams, 1 and 3
//! bribe a player of team A or B (up when that team loses the final) and 2
//! and 4 check whether the referee books a player of team A or B.
//!
//! Per-trial randomness comes from [`crate::rng::substream`] keyed on
//! `(seed, entity, pair, trial)`, so counts never depend on thread count or
//! scheduling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ValidationError;
use crate::exec::{map_reduce_chunks, Execution, CHUNK};
use crate::report::SimulationReport;
use crate::rng::{pair_stream, substream, STREAM_SOCCER, STREAM_VESSELS};
use crate::scenario::{CountTable, Outcome, OutcomePair, Pair};

fn invalid(field: &str, reason: impl Into<String>) -> ValidationError {
    ValidationError::InvalidConfig { field: field.into(), reason: reason.into() }
}

fn finite_nonnegative(field: &str, v: f64) -> Result<(), ValidationError> {
    if !v.is_finite() || v < 0.0 {
        return Err(invalid(field, format!("must be a finite nonnegative number, got {v}")));
    }
    Ok(())
}

/// Distribution of the volume collected on the left under the joint siphon
/// experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SplitDistribution {
    /// Uniform on `[0, total_volume)`.
    #[default]
    Uniform,
    /// Uniform on `[low, high)`, or exactly `low` when the bounds coincide.
    Interval {
        low: f64,
        high: f64,
    },
    Fixed {
        amount: f64,
    },
    /// Uniform choice among the listed amounts.
    Discrete {
        values: Vec<f64>,
    },
}

impl SplitDistribution {
    fn validate(&self, total: f64) -> Result<(), ValidationError> {
        let field = "split_distribution";
        let in_range = |v: f64| v.is_finite() && (0.0..=total).contains(&v);
        match self {
            SplitDistribution::Uniform => Ok(()),
            SplitDistribution::Interval { low, high } => {
                if !(in_range(*low) && in_range(*high) && low <= high) {
                    return Err(invalid(
                        field,
                        format!("interval [{low}, {high}] must satisfy 0 <= low <= high <= {total}"),
                    ));
                }
                Ok(())
            }
            SplitDistribution::Fixed { amount } => {
                if !in_range(*amount) {
                    return Err(invalid(field, format!("amount {amount} outside [0, {total}]")));
                }
                Ok(())
            }
            SplitDistribution::Discrete { values } => {
                if values.is_empty() {
                    return Err(invalid(field, "discrete distribution needs at least one value"));
                }
                match values.iter().find(|v| !in_range(**v)) {
                    Some(v) => Err(invalid(field, format!("value {v} outside [0, {total}]"))),
                    None => Ok(()),
                }
            }
        }
    }

    /// The generator is only built when the draw is actually random.
    fn draw(&self, total: f64, rng: impl FnOnce() -> ChaCha8Rng) -> f64 {
        match self {
            SplitDistribution::Uniform => rng().random_range(0.0..total),
            SplitDistribution::Interval { low, high } if low < high => rng().random_range(*low..*high),
            SplitDistribution::Interval { low, .. } => *low,
            SplitDistribution::Fixed { amount } => *amount,
            SplitDistribution::Discrete { values } if values.len() == 1 => values[0],
            SplitDistribution::Discrete { values } => values[rng().random_range(0..values.len())],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VesselsConfig {
    /// Liters of water in the connected vessels.
    pub total_volume: f64,
    /// A siphon reads "up" when it draws more than this many liters.
    pub threshold: f64,
    pub split_distribution: SplitDistribution,
    pub transparent: bool,
}

impl Default for VesselsConfig {
    fn default() -> Self {
        VesselsConfig {
            total_volume: 20.0,
            threshold: 10.0,
            split_distribution: SplitDistribution::Uniform,
            transparent: true,
        }
    }
}

impl VesselsConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        if !self.total_volume.is_finite() || self.total_volume <= 0.0 {
            return Err(invalid("total_volume", format!("must be positive, got {}", self.total_volume)));
        }
        if !(self.threshold > 0.0 && self.threshold < self.total_volume) {
            return Err(invalid(
                "threshold",
                format!("must lie strictly between 0 and total_volume ({}), got {}", self.total_volume, self.threshold),
            ));
        }
        self.split_distribution.validate(self.total_volume)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bribe {
    pub amount: f64,
    pub player_wealth: f64,
}

impl Bribe {
    /// `amount / (wealth + 1)`; higher means the bribed player is more
    /// likely to throw the match.
    pub fn effectiveness(&self) -> f64 {
        self.amount / (self.player_wealth + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoccerConfig {
    pub bribe_a: Bribe,
    pub bribe_b: Bribe,
    pub referee_bad_character: bool,
}

impl Default for SoccerConfig {
    /// A billion to a poor player of team A, a hundred thousand to a rich
    /// player of team B, and a corrupt referee.
    fn default() -> Self {
        SoccerConfig {
            bribe_a: Bribe { amount: 1e9, player_wealth: 1e4 },
            bribe_b: Bribe { amount: 1e5, player_wealth: 1e7 },
            referee_bad_character: true,
        }
    }
}

impl SoccerConfig {
    pub fn validate(&self) -> Result<(), ValidationError> {
        finite_nonnegative("bribe_a.amount", self.bribe_a.amount)?;
        finite_nonnegative("bribe_a.player_wealth", self.bribe_a.player_wealth)?;
        finite_nonnegative("bribe_b.amount", self.bribe_b.amount)?;
        finite_nonnegative("bribe_b.player_wealth", self.bribe_b.player_wealth)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Vessels,
    Soccer,
}

impl std::str::FromStr for EntityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vessels" => Ok(EntityKind::Vessels),
            "soccer" => Ok(EntityKind::Soccer),
            other => Err(format!("unknown entity `{other}` (expected vessels or soccer)")),
        }
    }
}

impl EntityKind {
    pub fn tag(self) -> &'static str {
        match self {
            EntityKind::Vessels => "vessels",
            EntityKind::Soccer => "soccer",
        }
    }
}

/// Entity selection together with its configuration. Serializes as
/// `{"entity": "vessels", "config": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "entity", content = "config", rename_all = "lowercase")]
pub enum EntityConfig {
    Vessels(VesselsConfig),
    Soccer(SoccerConfig),
}

impl EntityConfig {
    pub fn default_for(kind: EntityKind) -> Self {
        match kind {
            EntityKind::Vessels => EntityConfig::Vessels(VesselsConfig::default()),
            EntityKind::Soccer => EntityConfig::Soccer(SoccerConfig::default()),
        }
    }

    pub fn kind(&self) -> EntityKind {
        match self {
            EntityConfig::Vessels(_) => EntityKind::Vessels,
            EntityConfig::Soccer(_) => EntityKind::Soccer,
        }
    }

    pub fn validate(&self) -> Result<(), ValidationError> {
        match self {
            EntityConfig::Vessels(c) => c.validate(),
            EntityConfig::Soccer(c) => c.validate(),
        }
    }

    pub fn sample(&self, pair: Pair, trial_index: u64, seed: u64) -> OutcomePair {
        match self {
            EntityConfig::Vessels(c) => vessels_sample(c, pair, trial_index, seed),
            EntityConfig::Soccer(c) => soccer_sample(c, pair, trial_index, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSpec {
    pub trials: u64,
    pub seed: u64,
}

impl RunSpec {
    pub fn new(trials: u64, seed: u64) -> Result<Self, ValidationError> {
        if trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        Ok(RunSpec { trials, seed })
    }
}

fn outcome_pair(pair: Pair, left: bool, right: bool) -> OutcomePair {
    OutcomePair { pair, left: Outcome::from_bool(left), right: Outcome::from_bool(right) }
}

/// Outcome of one vessels trial for the given pair.
pub fn vessels_sample(config: &VesselsConfig, pair: Pair, trial_index: u64, seed: u64) -> OutcomePair {
    let clear = config.transparent;
    match pair {
        Pair::P13 => {
            let x = config
                .split_distribution
                .draw(config.total_volume, || substream(seed, pair_stream(STREAM_VESSELS, pair.index()), trial_index));
            let left_up = x > config.threshold;
            let right_up = config.total_volume - x >= config.threshold;
            outcome_pair(pair, left_up, right_up)
        }
        // a lone siphon drains the whole connected volume
        Pair::P14 => outcome_pair(pair, true, clear),
        Pair::P23 => outcome_pair(pair, clear, true),
        Pair::P24 => outcome_pair(pair, clear, clear),
    }
}

/// Outcome of one soccer trial for the given pair.
pub fn soccer_sample(config: &SoccerConfig, pair: Pair, trial_index: u64, seed: u64) -> OutcomePair {
    let referee = config.referee_bad_character;
    match pair {
        Pair::P13 => {
            let a = config.bribe_a.effectiveness();
            let b = config.bribe_b.effectiveness();
            let a_loses = if a > b {
                true
            } else if b > a {
                false
            } else {
                substream(seed, pair_stream(STREAM_SOCCER, pair.index()), trial_index).random::<bool>()
            };
            outcome_pair(pair, a_loses, !a_loses)
        }
        Pair::P14 => outcome_pair(pair, true, referee),
        Pair::P23 => outcome_pair(pair, referee, true),
        Pair::P24 => outcome_pair(pair, referee, referee),
    }
}

/// Runs `trials` samples for each of the four pairs and tallies them.
pub fn simulate_counts(config: &EntityConfig, run: &RunSpec, exec: Execution) -> CountTable {
    let trials = run.trials;
    map_reduce_chunks(
        exec,
        4 * trials,
        CHUNK,
        CountTable::default(),
        |units| {
            let mut counts = CountTable::default();
            for u in units {
                let pair = Pair::ALL[(u / trials) as usize];
                counts.record(&config.sample(pair, u % trials, run.seed));
            }
            counts
        },
        |a, b| a.merge(&b),
    )
}

/// Runs the entity and evaluates the resulting table.
pub fn run_entity(config: &EntityConfig, run: RunSpec) -> Result<SimulationReport, ValidationError> {
    run_entity_with(config, run, Execution::default())
}

pub fn run_entity_with(
    config: &EntityConfig,
    run: RunSpec,
    exec: Execution,
) -> Result<SimulationReport, ValidationError> {
    config.validate()?;
    let run = RunSpec::new(run.trials, run.seed)?;
    let counts = simulate_counts(config, &run, exec);
    SimulationReport::from_counts(config.clone(), run, &counts)
}
