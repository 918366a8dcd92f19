//! Time-average estimators and their randomized debiasing.
//!
//! Four procedures, all built on coupled long runs:
//!
//! * [`long_run`] — the plain time average of `f` over steps `b..k`.
//! * [`bias_estimate`] — an unbiased estimator of the time average's bias,
//!   obtained by coupling a warm chain with a restarted copy over a
//!   randomized horizon `k * 2^N`.
//! * [`unbiased_long_run`] — the time average plus a coin-sampled,
//!   frequency-weighted bias correction; unbiased for the steady-state mean.
//! * [`stratified_long_run`] — the stratified variant averaging `n` time
//!   averages and `ceil(n q)` bias corrections.
//!
//! Costs are exact and observable: `k` transitions for a long run,
//! `3 k 2^N` for a bias estimate, and their combinations for the rest.

use rayon::prelude::*;

use crate::chain::{advance, long_run_coupled, ChainModel, CostCounter};
use crate::error::{Error, Result};
use crate::levels::LevelDistribution;
use crate::rng::{Role, RunRng, Stream};

/// Horizon, burn-in periods, and sampling frequency for one estimator run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Time horizon `k`.
    pub k: u64,
    /// Burn-in `b` of the plain time average.
    pub burn_in: u64,
    /// Burn-in `b'` of the debiased estimators, `b <= b' <= k/2`.
    pub debias_burn_in: u64,
    /// Sampling frequency `q` of the bias correction, in `(0, 1]`.
    pub frequency: f64,
}

impl EstimatorConfig {
    pub fn new(k: u64, burn_in: u64, debias_burn_in: u64, frequency: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if burn_in > debias_burn_in {
            return Err(Error::InvalidParameter(format!(
                "burn_in ({burn_in}) must not exceed debias_burn_in ({debias_burn_in})"
            )));
        }
        if 2 * debias_burn_in > k {
            return Err(Error::InvalidParameter(format!(
                "debias_burn_in ({debias_burn_in}) must not exceed k/2 = {}",
                k / 2
            )));
        }
        if !(frequency > 0.0 && frequency <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "frequency must lie in (0, 1], got {frequency}"
            )));
        }
        Ok(EstimatorConfig {
            k,
            burn_in,
            debias_burn_in,
            frequency,
        })
    }
}

/// The debias burn-in `max(b, ceil(sqrt(k)) / 2)`, which grows slowly enough
/// to keep the correction overhead vanishing as `k` grows.
pub fn sqrt_debias_burn_in(k: u64, burn_in: u64) -> u64 {
    let root = (k as f64).sqrt().ceil() as u64;
    burn_in.max(root / 2)
}

/// One replication's output: the value, its exact transition-call cost, and
/// the randomization the run drew.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorRun {
    pub value: f64,
    pub g_calls: u64,
    /// Level `N` drawn by the bias corrector, when one ran.
    pub level: Option<u32>,
    /// Whether the frequency coin sampled the correction (unbiased runs).
    pub corrected: Option<bool>,
}

/// Plain time average of `f(X_i)` over `i` in `burn_in..k`. Costs exactly
/// `k` transition calls.
pub fn long_run<M: ChainModel>(
    model: &M,
    k: u64,
    burn_in: u64,
    stream: &mut Stream,
) -> Result<EstimatorRun> {
    if burn_in >= k {
        return Err(Error::InvalidParameter(format!(
            "burn_in ({burn_in}) must be smaller than k ({k})"
        )));
    }
    let mut cost = CostCounter::new();
    let mut states = [model.initial_state()];
    let sums = long_run_coupled(model, &mut states, burn_in, k, stream, &mut cost)?;
    Ok(EstimatorRun {
        value: sums[0] / (k - burn_in) as f64,
        g_calls: cost.g_calls(),
        level: None,
        corrected: None,
    })
}

/// Unbiased estimator of the time average's bias.
///
/// Draws `N` from `levels`, warms one chain `k * 2^N` steps, restarts a
/// second copy at the initial state, and advances both `k * 2^N` further
/// steps under shared innovations, averaging `f` over the final `k - b'`
/// steps of each. The scaled difference estimates the bias of the
/// time average with burn-in `b'`. Costs exactly `3 k 2^N` transitions.
pub fn bias_estimate<M: ChainModel>(
    model: &M,
    k: u64,
    debias_burn_in: u64,
    levels: &LevelDistribution,
    stream: &mut Stream,
) -> Result<EstimatorRun> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if 2 * debias_burn_in > k {
        return Err(Error::InvalidParameter(format!(
            "debias_burn_in ({debias_burn_in}) must not exceed k/2 = {}",
            k / 2
        )));
    }
    let level = levels.sample_with(stream);
    let horizon = 1u64
        .checked_shl(level)
        .and_then(|f| k.checked_mul(f))
        .ok_or(Error::HorizonOverflow)?;
    let mut cost = CostCounter::new();

    // Warm phase: one chain, k 2^N steps, nothing accumulated.
    let mut warm = model.initial_state();
    advance(model, &mut warm, horizon, stream, &mut cost);

    // Coupled phase: warm chain and a restarted copy share innovations for
    // another k 2^N steps; f accumulates over the last k - b' of them.
    let mut states = vec![warm, model.initial_state()];
    let window_start = horizon - k + debias_burn_in;
    let sums = long_run_coupled(model, &mut states, window_start, horizon, stream, &mut cost)?;

    let weight = levels.pmf(level) * (k - debias_burn_in) as f64;
    Ok(EstimatorRun {
        value: (sums[1] - sums[0]) / weight,
        g_calls: cost.g_calls(),
        level: Some(level),
        corrected: None,
    })
}

/// Unbiased steady-state estimator: the time average with burn-in `b'`,
/// minus a frequency-weighted bias estimate sampled with probability `q`.
///
/// The chain, the coin, and the correction consume the three independent
/// substreams of `rng`, so the correction is independent of the time
/// average by construction. Costs `k` transitions, plus `3 k 2^N` when the
/// coin lands.
pub fn unbiased_long_run<M: ChainModel>(
    model: &M,
    config: &EstimatorConfig,
    levels: &LevelDistribution,
    rng: &mut RunRng,
) -> Result<EstimatorRun> {
    // Coin first, and the correction (whose level draw opens its
    // substream) before the time average: a run's cost is fixed before the
    // k-step simulation starts. The substreams are independent, so the
    // order changes no distribution.
    let corrected = rng.coin.uniform() <= config.frequency;
    if !corrected {
        let base = long_run(model, config.k, config.debias_burn_in, &mut rng.chain)?;
        return Ok(EstimatorRun {
            corrected: Some(false),
            ..base
        });
    }
    let correction = bias_estimate(
        model,
        config.k,
        config.debias_burn_in,
        levels,
        &mut rng.bias,
    )?;
    let base = long_run(model, config.k, config.debias_burn_in, &mut rng.chain)?;
    Ok(EstimatorRun {
        value: base.value - correction.value / config.frequency,
        g_calls: base.g_calls + correction.g_calls,
        level: correction.level,
        corrected: Some(true),
    })
}

/// `ceil(n q)` with a small nudge so exact integer products do not round up.
pub fn correction_count(n: u64, frequency: f64) -> u64 {
    ((n as f64 * frequency - 1e-12).ceil() as u64).max(1)
}

/// A stratified run's output along with its component values.
#[derive(Debug, Clone)]
pub struct StratifiedRun {
    /// The estimator value and total cost.
    pub run: EstimatorRun,
    /// The `n` component time averages.
    pub time_averages: Vec<f64>,
    /// The `ceil(n q)` component bias estimates.
    pub corrections: Vec<f64>,
}

/// Stratified unbiased estimator: the mean of `n` independent time averages
/// minus the mean of `ceil(n q)` independent bias estimates.
///
/// Components draw indexed substreams of `(seed, replication)`, are
/// evaluated in parallel, and are combined in index order, so the result is
/// independent of thread scheduling.
pub fn stratified_long_run<M: ChainModel + Sync>(
    model: &M,
    config: &EstimatorConfig,
    levels: &LevelDistribution,
    n: u64,
    seed: u64,
    replication: u64,
) -> Result<StratifiedRun> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let m = correction_count(n, config.frequency);

    let averages: Vec<EstimatorRun> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut stream = Stream::substream_indexed(seed, replication, Role::Chain, i);
            long_run(model, config.k, config.debias_burn_in, &mut stream)
        })
        .collect::<Result<_>>()?;
    let corrections: Vec<EstimatorRun> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut stream = Stream::substream_indexed(seed, replication, Role::Bias, i);
            bias_estimate(model, config.k, config.debias_burn_in, levels, &mut stream)
        })
        .collect::<Result<_>>()?;

    let mean_average = averages.iter().map(|r| r.value).sum::<f64>() / n as f64;
    let mean_correction = corrections.iter().map(|r| r.value).sum::<f64>() / m as f64;
    let g_calls = averages.iter().map(|r| r.g_calls).sum::<u64>()
        + corrections.iter().map(|r| r.g_calls).sum::<u64>();

    Ok(StratifiedRun {
        run: EstimatorRun {
            value: mean_average - mean_correction,
            g_calls,
            level: None,
            corrected: None,
        },
        time_averages: averages.iter().map(|r| r.value).collect(),
        corrections: corrections.iter().map(|r| r.value).collect(),
    })
}

/// The generic single-term estimator `(Y_N - Y_(N-1)) / p_N`.
///
/// `sampler(level, stream)` must realize the pair `(Y_(N-1), Y_N)` from one
/// joint draw, with `Y_(-1) = 0`. Unbiased for the limit of `E(Y_l)` when
/// the weighted increments are summable.
pub fn single_term<F>(mut sampler: F, levels: &LevelDistribution, stream: &mut Stream) -> f64
where
    F: FnMut(u32, &mut Stream) -> (f64, f64),
{
    let level = levels.sample_with(stream);
    let (y_prev, y_cur) = sampler(level, stream);
    (y_cur - y_prev) / levels.pmf(level)
}
