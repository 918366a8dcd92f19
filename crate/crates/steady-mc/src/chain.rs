//! Markov chains driven by explicit innovation streams.
//!
//! A chain is specified by a deterministic initial state, an innovation law,
//! a transition map `g`, and a scalar functional `f`. Writing the recursion
//! as `x_{i+1} = g(x_i, u_i)` with the innovations `u_i` drawn outside the
//! transition is what makes coupling possible: several copies of the chain
//! advanced with the *same* innovation sequence contract toward each other,
//! and that contraction is what the debiasing estimators exploit.

use crate::error::{Error, Result};
use crate::rng::Stream;

/// A time-homogeneous Markov chain with an explicit innovation law.
///
/// `transition` and `functional` must be deterministic: equal inputs give
/// equal outputs. All randomness enters through `sample_innovation`.
pub trait ChainModel {
    /// Chain state. Scalar models use `f64`; vector models use `Vec<f64>`.
    type State: Clone;
    /// One innovation value, drawn once per time step.
    type Innovation;

    /// The deterministic initial state.
    fn initial_state(&self) -> Self::State;

    /// Draw one innovation from the chain's innovation law.
    fn sample_innovation(&self, stream: &mut Stream) -> Self::Innovation;

    /// The transition map `g`.
    fn transition(&self, state: &Self::State, innovation: &Self::Innovation) -> Self::State;

    /// The scalar functional `f` whose steady-state mean is estimated.
    fn functional(&self, state: &Self::State) -> f64;
}

/// Counts invocations of the transition map.
///
/// Transition calls are the cost unit of every estimator in this crate;
/// functional evaluations are free by convention.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostCounter {
    g_calls: u64,
}

impl CostCounter {
    pub fn new() -> Self {
        CostCounter::default()
    }

    /// Number of transition calls recorded so far.
    pub fn g_calls(&self) -> u64 {
        self.g_calls
    }

    pub(crate) fn bump(&mut self, n: u64) {
        self.g_calls += n;
    }
}

/// Fold a fixed innovation sequence through the chain.
///
/// Returns the state after applying every innovation in order; the cost
/// counter advances by the sequence length. An empty sequence is the
/// identity.
pub fn iterate<M: ChainModel>(
    model: &M,
    state: M::State,
    innovations: &[M::Innovation],
    cost: &mut CostCounter,
) -> M::State {
    cost.bump(innovations.len() as u64);
    innovations
        .iter()
        .fold(state, |s, u| model.transition(&s, u))
}

/// Advance several coupled copies of one chain and accumulate functionals.
///
/// Runs `horizon` steps. At each step one innovation is drawn and applied to
/// every state in index order, so the copies stay coupled. Steps with index
/// at least `burn_in` first add `f(state)` to the corresponding sum. States
/// are left advanced by `horizon` steps; the cost counter advances by
/// `states.len() * horizon`.
pub fn long_run_coupled<M: ChainModel>(
    model: &M,
    states: &mut [M::State],
    burn_in: u64,
    horizon: u64,
    stream: &mut Stream,
    cost: &mut CostCounter,
) -> Result<Vec<f64>> {
    if burn_in >= horizon {
        return Err(Error::InvalidParameter(format!(
            "burn_in ({burn_in}) must be smaller than horizon ({horizon})"
        )));
    }
    let mut sums = vec![0.0; states.len()];
    for i in 0..horizon {
        let v = model.sample_innovation(stream);
        for (state, sum) in states.iter_mut().zip(sums.iter_mut()) {
            if i >= burn_in {
                *sum += model.functional(state);
            }
            *state = model.transition(state, &v);
        }
    }
    cost.bump(states.len() as u64 * horizon);
    Ok(sums)
}

/// Advance one state `steps` times with fresh innovations, accumulating
/// nothing. Used to warm a chain before a coupled phase.
pub(crate) fn advance<M: ChainModel>(
    model: &M,
    state: &mut M::State,
    steps: u64,
    stream: &mut Stream,
    cost: &mut CostCounter,
) {
    for _ in 0..steps {
        let v = model.sample_innovation(stream);
        *state = model.transition(state, &v);
    }
    cost.bump(steps);
}
