//! Metropolis–Hastings random walk over a fiber, targeting the
//! hypergeometric law `pi(x) ∝ 1 / prod_i x(i)!`.
//!
//! Proposals `y = x + z` come from [`Proposer`]. Because the coefficient law
//! is symmetric under `alpha -> -alpha`, `q(z) = q(-z)` and the acceptance
//! ratio is the plain target ratio `pi(y) / pi(x)`. A proposal with a negative
//! cell, or the zero move, leaves the state unchanged and is counted as a
//! rejected proposal.

use std::collections::BTreeMap;

use crate::configurations::Configuration;
use crate::inference::ln_gamma;
use crate::intkernel::{IntMatrix, LatticeBasis};
use crate::movegen::{CoefficientDistribution, Proposer, RandomSource};
use crate::{Error, Result};

/// Nonnegative cell counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Table {
    counts: Vec<i64>,
}

impl Table {
    pub fn new(counts: Vec<i64>) -> Result<Self> {
        if let Some(i) = counts.iter().position(|&c| c < 0) {
            return Err(Error::invalid(format!("negative count {} in cell {i}", counts[i])));
        }
        Ok(Table { counts })
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn into_counts(self) -> Vec<i64> {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> i64 {
        self.counts.iter().sum()
    }

    /// `x + z`, or `None` when some cell would turn negative.
    pub fn shifted(&self, z: &[i64]) -> Option<Table> {
        let counts: Option<Vec<i64>> = self
            .counts
            .iter()
            .zip(z)
            .map(|(&x, &d)| x.checked_add(d).filter(|&v| v >= 0))
            .collect();
        counts.map(|counts| Table { counts })
    }
}

/// `t = A x` for the observed table; fixed for the whole run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SufficientStatistic(pub Vec<i64>);

impl SufficientStatistic {
    pub fn of(config: &Configuration, x: &Table) -> Result<Self> {
        Ok(SufficientStatistic(config.statistic(x.counts())?))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

/// Arguments up to this bound are served from the precomputed table.
const LOG_FACTORIAL_CACHE: usize = 1_000_000;

/// `ln k!` with a precomputed table for small arguments.
#[derive(Clone, Debug)]
pub struct LogFactorial {
    table: Vec<f64>,
}

impl LogFactorial {
    /// Precomputes `ln k!` for `k <= min(max, 10^6)`.
    pub fn new(max: usize) -> Self {
        let n = max.min(LOG_FACTORIAL_CACHE);
        let table = (0..=n).map(|k| ln_gamma(k as f64 + 1.0)).collect();
        LogFactorial { table }
    }

    pub fn get(&self, k: i64) -> f64 {
        debug_assert!(k >= 0);
        match self.table.get(k as usize) {
            Some(&v) => v,
            None => ln_gamma(k as f64 + 1.0),
        }
    }
}

/// `-sum_i ln x(i)!`: the log hypergeometric mass up to a fiber constant.
pub fn log_unnormalized_target(x: &Table) -> f64 {
    -x.counts.iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>()
}

/// Metropolis–Hastings acceptance probability of moving from `x` to `x + z`,
/// or `None` when `x + z` has a negative cell.
pub fn acceptance_probability(x: &Table, z: &[i64]) -> Option<f64> {
    let y = x.shifted(z)?;
    let log_ratio = log_unnormalized_target(&y) - log_unnormalized_target(x);
    Some(log_ratio.exp().min(1.0))
}

/// What happened to one proposal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    /// `x + z` had a negative cell.
    RejectedNegative,
    /// The composed move was zero.
    RejectedZero,
    /// Rejected by the Metropolis–Hastings coin.
    RejectedRatio,
}

/// Proposal counters of a chain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepCounts {
    pub proposals: u64,
    pub accepted: u64,
    pub negative_rejections: u64,
    pub zero_moves: u64,
}

impl StepCounts {
    fn record(&mut self, outcome: StepOutcome) {
        self.proposals += 1;
        match outcome {
            StepOutcome::Accepted => self.accepted += 1,
            StepOutcome::RejectedNegative => self.negative_rejections += 1,
            StepOutcome::RejectedZero => self.zero_moves += 1,
            StepOutcome::RejectedRatio => {}
        }
    }
}

/// A single chain: current state, proposal generator, random stream.
#[derive(Clone, Debug)]
pub struct MetropolisChain<'a> {
    state: Table,
    proposer: Proposer<'a>,
    log_fact: LogFactorial,
    rng: RandomSource,
    counts: StepCounts,
}

impl<'a> MetropolisChain<'a> {
    pub fn new(
        start: Table,
        basis: &'a LatticeBasis,
        dist: CoefficientDistribution,
        rng: RandomSource,
    ) -> Result<Self> {
        if start.len() != basis.cells() {
            return Err(Error::DimensionMismatch {
                what: "table cells",
                expected: basis.cells(),
                found: start.len(),
            });
        }
        let log_fact = LogFactorial::new(start.total().max(0) as usize);
        Ok(MetropolisChain {
            state: start,
            proposer: Proposer::new(basis, dist)?,
            log_fact,
            rng,
            counts: StepCounts::default(),
        })
    }

    pub fn state(&self) -> &Table {
        &self.state
    }

    pub fn counts(&self) -> StepCounts {
        self.counts
    }

    pub fn into_state(self) -> Table {
        self.state
    }

    pub fn step(&mut self) -> Result<StepOutcome> {
        let outcome = self.try_step()?;
        self.counts.record(outcome);
        Ok(outcome)
    }

    fn try_step(&mut self) -> Result<StepOutcome> {
        let z = self.proposer.propose(&mut self.rng)?;
        if z.is_empty() {
            return Ok(StepOutcome::RejectedZero);
        }
        let x = &mut self.state.counts;
        let mut log_ratio = 0.0;
        for &(i, d) in z {
            let y = x[i] + d;
            if y < 0 {
                return Ok(StepOutcome::RejectedNegative);
            }
            log_ratio += self.log_fact.get(x[i]) - self.log_fact.get(y);
        }
        if log_ratio < 0.0 && self.rng.uniform() >= log_ratio.exp() {
            return Ok(StepOutcome::RejectedRatio);
        }
        for &(i, d) in z {
            x[i] += d;
        }
        Ok(StepOutcome::Accepted)
    }
}

/// One Metropolis–Hastings step from `x`, updating it in place.
pub fn mh_step(
    x: &mut Table,
    basis: &LatticeBasis,
    dist: CoefficientDistribution,
    rng: &mut RandomSource,
) -> Result<StepOutcome> {
    let mut chain = MetropolisChain::new(x.clone(), basis, dist, rng.clone())?;
    let outcome = chain.step()?;
    *rng = chain.rng;
    *x = chain.state;
    Ok(outcome)
}

/// Run settings for [`run_chain`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub burn_in: usize,
    pub iterations: usize,
    pub thin: usize,
    pub seed: u64,
    pub dist: CoefficientDistribution,
    /// Keep visit counts of every retained state (small fibers only).
    pub record_states: bool,
}

impl ChainConfig {
    pub fn new(burn_in: usize, iterations: usize, seed: u64, dist: CoefficientDistribution) -> Self {
        ChainConfig {
            burn_in,
            iterations,
            thin: 1,
            seed,
            dist,
            record_states: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        Ok(())
    }
}

/// Output of one chain execution.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainRun {
    /// Statistic at every retained step, `floor(iterations / thin)` values.
    pub series: Vec<f64>,
    /// Counters over burn-in and sampling steps together.
    pub counts: StepCounts,
    pub final_table: Table,
    /// Retained-state visit counts when [`ChainConfig::record_states`] is set.
    pub visits: Option<BTreeMap<Table, u64>>,
}

impl ChainRun {
    pub fn acceptance_rate(&self) -> f64 {
        if self.counts.proposals == 0 {
            0.0
        } else {
            self.counts.accepted as f64 / self.counts.proposals as f64
        }
    }
}

/// Sparse `A` used to re-check `A x = t` along a run.
struct FiberCheck {
    rows: Vec<Vec<(usize, i64)>>,
    target: Vec<i64>,
}

impl FiberCheck {
    fn new(a: &IntMatrix, target: Vec<i64>) -> Self {
        let rows = (0..a.rows())
            .map(|i| {
                a.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        FiberCheck { rows, target }
    }

    fn holds(&self, x: &[i64]) -> bool {
        self.rows.iter().zip(&self.target).all(|(row, &t)| {
            row.iter()
                .try_fold(0i64, |acc, &(j, v)| acc.checked_add(v.checked_mul(x[j])?))
                == Some(t)
        })
    }
}

/// Runs `burn_in` discarded steps and then `iterations` steps from `start`,
/// evaluating `statistic` on every `thin`-th state.
///
/// Every basis move is checked to lie in `ker A` up front. In debug builds
/// `A x = t` is re-verified at every retained step; a violation is
/// [`Error::FiberBreach`].
pub fn run_chain<F>(
    start: &Table,
    config: &Configuration,
    basis: &LatticeBasis,
    cfg: &ChainConfig,
    mut statistic: F,
) -> Result<ChainRun>
where
    F: FnMut(&Table) -> Result<f64>,
{
    cfg.validate()?;
    basis.check_kernel(&config.matrix)?;
    let t = config.statistic(start.counts())?;
    let check = FiberCheck::new(&config.matrix, t);

    let mut chain = MetropolisChain::new(start.clone(), basis, cfg.dist, RandomSource::new(cfg.seed))?;
    for _ in 0..cfg.burn_in {
        chain.step()?;
    }
    let mut series = Vec::with_capacity(cfg.iterations / cfg.thin);
    let mut visits = cfg.record_states.then(BTreeMap::new);
    for step in 1..=cfg.iterations {
        chain.step()?;
        if step % cfg.thin != 0 {
            continue;
        }
        if cfg!(debug_assertions) && !check.holds(chain.state().counts()) {
            return Err(Error::FiberBreach(format!("state left the fiber at step {step}")));
        }
        let value = statistic(chain.state()).map_err(|e| Error::Statistic {
            step,
            source: Box::new(e),
        })?;
        series.push(value);
        if let Some(v) = visits.as_mut() {
            *v.entry(chain.state().clone()).or_insert(0) += 1;
        }
    }
    if !check.holds(chain.state().counts()) {
        return Err(Error::FiberBreach("final state left the fiber".into()));
    }
    Ok(ChainRun {
        series,
        counts: chain.counts(),
        final_table: chain.into_state(),
        visits,
    })
}
