//! Unbiased steady-state estimation for Markov chain functionals.
//!
//! Time averages of `f(X_i)` along a chain `X_{i+1} = g(X_i, U_i)` converge
//! to the steady-state mean, but at any finite horizon they carry an
//! initialization bias that is hard to quantify. This crate removes it: a
//! randomized-depth coupling of the chain with a restarted copy yields an
//! unbiased estimator of the time average's bias, and adding that correction
//! back (sampled with a frequency `q`) gives estimators whose expectation is
//! exactly the steady-state mean, with finite variance and finite expected
//! cost.
//!
//! The pieces:
//!
//! * [`chain`] — the chain abstraction, innovation streams, coupled
//!   evolution, and exact cost counting.
//! * [`decay`] — decay envelopes `nu(i)` bounding the coupling gap, and
//!   their weighted tail sums.
//! * [`levels`] — distributions of the random coupling depth and the
//!   correction-sampling frequency.
//! * [`estimator`] — the time average, the bias estimator, and the unbiased
//!   and stratified-unbiased combinations.
//! * [`models`] — GARCH volatility, single-server queues, an
//!   autoregressive benchmark, and a random-coordinate Gaussian sampler.
//! * [`stats`] — replication aggregation and work-normalized efficiency.
//! * [`experiment`] — the JSON-configured replication harness behind the
//!   `steady-mc` binary.
//!
//! ```
//! use steady_mc::estimator::{unbiased_long_run, EstimatorConfig};
//! use steady_mc::levels::{frequency_experimental, GrowthFn, LevelDistribution};
//! use steady_mc::models::Ar1;
//! use steady_mc::rng::RunRng;
//!
//! let model = Ar1::new(0.5)?;
//! let levels = LevelDistribution::oblivious(GrowthFn::exponential(0.5)?)?;
//! let q = frequency_experimental(&levels);
//! let config = EstimatorConfig::new(100, 10, 10, q)?;
//!
//! let mut sum = 0.0;
//! for rep in 0..200 {
//!     let mut rng = RunRng::for_replication(1, rep);
//!     sum += unbiased_long_run(&model, &config, &levels, &mut rng)?.value;
//! }
//! // The estimator is unbiased for the steady-state mean, which is 0 here.
//! assert!((sum / 200.0).abs() < 0.2);
//! # Ok::<(), steady_mc::Error>(())
//! ```

// Validation guards are written as `!(x > 0.0)` so NaN parameters are
// rejected along with out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod decay;
mod error;
pub mod estimator;
pub mod experiment;
pub mod levels;
pub mod models;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};

// The guide's code blocks double as doctests so the book cannot drift from
// the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/decay.md")]
    mod decay {}
    #[doc = include_str!("../../../book/src/levels.md")]
    mod levels {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
