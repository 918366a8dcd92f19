//! Example chains: GARCH volatility, single-server queues, an
//! autoregressive benchmark, and a random-coordinate Gaussian sampler.

use std::fmt;
use std::sync::Arc;

use crate::chain::ChainModel;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Shareable functional on a vector state.
pub type StateFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Autoregression `x_(i+1) = sqrt_eta * x_i + u_i` with standard normal
/// innovations, started at zero, with the identity functional.
///
/// The benchmark chain: its steady-state mean is exactly zero and its
/// variance is `1 / (1 - eta)`, so estimator bounds can be checked against
/// closed forms.
#[derive(Debug, Clone, Copy)]
pub struct Ar1 {
    sqrt_eta: f64,
}

impl Ar1 {
    pub fn new(sqrt_eta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&sqrt_eta) {
            return Err(Error::InvalidParameter(format!(
                "sqrt_eta must lie in [0, 1), got {sqrt_eta}"
            )));
        }
        Ok(Ar1 { sqrt_eta })
    }

    /// The contraction factor `eta`.
    pub fn eta(&self) -> f64 {
        self.sqrt_eta * self.sqrt_eta
    }
}

impl ChainModel for Ar1 {
    type State = f64;
    type Innovation = f64;

    fn initial_state(&self) -> f64 {
        0.0
    }

    fn sample_innovation(&self, stream: &mut Stream) -> f64 {
        stream.normal()
    }

    fn transition(&self, state: &f64, innovation: &f64) -> f64 {
        self.sqrt_eta * state + innovation
    }

    fn functional(&self, state: &f64) -> f64 {
        *state
    }
}

/// GARCH(1,1) variance recursion parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchParams {
    pub w: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Initial variance `sigma_0^2`.
    pub sigma0_sq: f64,
    /// Threshold of the exceedance functional `1{sigma^2 > z}`.
    pub z: f64,
}

/// Daily-variance chain `sigma_(i+1)^2 = w + alpha sigma_i^2 u_i^2 + beta sigma_i^2`
/// with standard normal `u_i`, estimating the steady-state exceedance
/// probability of the variance.
#[derive(Debug, Clone, Copy)]
pub struct Garch {
    params: GarchParams,
}

impl Garch {
    pub fn new(params: GarchParams) -> Result<Self> {
        if !(params.w > 0.0 && params.alpha > 0.0 && params.beta > 0.0) {
            return Err(Error::InvalidParameter(
                "w, alpha, beta must be positive".into(),
            ));
        }
        if params.alpha + params.beta >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha + beta must be below 1, got {}",
                params.alpha + params.beta
            )));
        }
        if params.sigma0_sq < 0.0 {
            return Err(Error::InvalidParameter(
                "sigma0_sq must be non-negative".into(),
            ));
        }
        Ok(Garch { params })
    }

    /// The parameter set of the volatility experiments.
    pub fn experiment_params() -> GarchParams {
        GarchParams {
            w: 1.2e-6,
            alpha: 0.05,
            beta: 0.92,
            sigma0_sq: 2e-5,
            z: 4e-5,
        }
    }
}

impl ChainModel for Garch {
    type State = f64;
    type Innovation = f64;

    fn initial_state(&self) -> f64 {
        self.params.sigma0_sq
    }

    fn sample_innovation(&self, stream: &mut Stream) -> f64 {
        stream.normal()
    }

    fn transition(&self, state: &f64, innovation: &f64) -> f64 {
        self.params.w
            + self.params.alpha * state * innovation * innovation
            + self.params.beta * state
    }

    fn functional(&self, state: &f64) -> f64 {
        if *state > self.params.z {
            1.0
        } else {
            0.0
        }
    }
}

/// Service- and interarrival-time distributions for the queue models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variate {
    /// Exponential with the given rate.
    Exponential { rate: f64 },
    /// Pareto with survival `(1 + z / scale)^(-shape)`.
    Pareto { shape: f64, scale: f64 },
    /// Balanced two-branch hyperexponential with survival
    /// `p e^(-2 p z) + (1 - p) e^(-2 (1 - p) z)`; mean 1 for every `p`.
    Hyperexponential { p: f64 },
}

impl Variate {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "rate must be positive, got {rate}"
            )));
        }
        Ok(Variate::Exponential { rate })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 2.0) {
            return Err(Error::InvalidParameter(format!(
                "pareto shape must exceed 2 for finite variance, got {shape}"
            )));
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pareto scale must be positive, got {scale}"
            )));
        }
        Ok(Variate::Pareto { shape, scale })
    }

    pub fn hyperexponential(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "hyperexponential p must lie in (0, 1), got {p}"
            )));
        }
        Ok(Variate::Hyperexponential { p })
    }

    /// Draw one value by inversion (exponential, Pareto) or branch selection
    /// (hyperexponential).
    pub fn sample(&self, stream: &mut Stream) -> f64 {
        match self {
            Variate::Exponential { rate } => -(1.0 - stream.uniform()).ln() / rate,
            Variate::Pareto { shape, scale } => {
                scale * ((1.0 - stream.uniform()).powf(-1.0 / shape) - 1.0)
            }
            Variate::Hyperexponential { p } => {
                let rate = if stream.coin(*p) {
                    2.0 * p
                } else {
                    2.0 * (1.0 - p)
                };
                -(1.0 - stream.uniform()).ln() / rate
            }
        }
    }

    /// Survival function `P(X >= z)`.
    pub fn survival(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 1.0;
        }
        match self {
            Variate::Exponential { rate } => (-rate * z).exp(),
            Variate::Pareto { shape, scale } => (1.0 + z / scale).powf(-shape),
            Variate::Hyperexponential { p } => {
                p * (-2.0 * p * z).exp() + (1.0 - p) * (-2.0 * (1.0 - p) * z).exp()
            }
        }
    }

    /// Mean of the distribution.
    pub fn mean(&self) -> f64 {
        match self {
            Variate::Exponential { rate } => 1.0 / rate,
            Variate::Pareto { shape, scale } => scale / (shape - 1.0),
            Variate::Hyperexponential { .. } => 1.0,
        }
    }
}

/// Functional evaluated on the queue's waiting time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueueFunctional {
    /// The waiting time itself.
    Identity,
    /// The exceedance indicator `1{w > threshold}`.
    Indicator { threshold: f64 },
}

/// Single-server FIFO queue waiting times under the recursion
/// `x_(i+1) = max(0, x_i + u_i)` with `u_i = service - interarrival`,
/// started empty.
#[derive(Debug, Clone, Copy)]
pub struct Queue {
    interarrival: Variate,
    service: Variate,
    functional: QueueFunctional,
}

impl Queue {
    pub fn new(interarrival: Variate, service: Variate, functional: QueueFunctional) -> Self {
        Queue {
            interarrival,
            service,
            functional,
        }
    }

    /// The hyperexponential-service queue of the experiments: Poisson
    /// arrivals at `rate`, balanced hyperexponential service with parameter
    /// `p`, waiting time as the functional.
    pub fn hyperexponential_service(rate: f64, p: f64) -> Result<Self> {
        Ok(Queue::new(
            Variate::exponential(rate)?,
            Variate::hyperexponential(p)?,
            QueueFunctional::Identity,
        ))
    }

    /// The Pareto/Pareto queue of the experiments, with traffic intensity
    /// `alpha`: interarrival survival `(1 + alpha z)^(-7)`, unit-scale
    /// service survival `(1 + z)^(-7)`, and exceedance of `threshold` as
    /// the functional.
    ///
    /// This is the queue with unit interarrival scale and service scale
    /// `alpha` expressed in service-scale time units, which is the unit
    /// convention of the benchmark series; thresholds are multiples of the
    /// service scale.
    pub fn pareto_pareto(alpha: f64, threshold: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "traffic intensity alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(Queue::new(
            Variate::pareto(7.0, 1.0 / alpha)?,
            Variate::pareto(7.0, 1.0)?,
            QueueFunctional::Indicator { threshold },
        ))
    }

    /// Mean steady-state waiting time of the Poisson-arrival queue by the
    /// Pollaczek-Khinchine formula, available when the interarrival law is
    /// exponential and service is the balanced hyperexponential.
    pub fn pollaczek_khinchine_mean(&self) -> Option<f64> {
        match (self.interarrival, self.service) {
            (Variate::Exponential { rate }, Variate::Hyperexponential { p }) => {
                // E(S) = 1, E(S^2) = 1 / (2 p (1 - p))
                let second_moment = 1.0 / (2.0 * p * (1.0 - p));
                Some(rate * second_moment / (2.0 * (1.0 - rate)))
            }
            _ => None,
        }
    }
}

impl ChainModel for Queue {
    type State = f64;
    type Innovation = f64;

    fn initial_state(&self) -> f64 {
        0.0
    }

    fn sample_innovation(&self, stream: &mut Stream) -> f64 {
        self.service.sample(stream) - self.interarrival.sample(stream)
    }

    fn transition(&self, state: &f64, innovation: &f64) -> f64 {
        (state + innovation).max(0.0)
    }

    fn functional(&self, state: &f64) -> f64 {
        match self.functional {
            QueueFunctional::Identity => *state,
            QueueFunctional::Indicator { threshold } => {
                if *state > threshold {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Random-coordinate Gaussian chain on `d`-vectors:
/// `x_(i+1) = x_i + (g_i - x_i[j_i]) * V[:, j_i]` with `g_i` standard normal
/// and `j_i` uniform on the coordinates.
///
/// The innovation couples the normal and the coordinate choice, so coupled
/// copies share both. Its steady state is `N(0, V)`; the functional is any
/// user closure on the state vector.
#[derive(Clone)]
pub struct GaussianChain {
    columns: Vec<Vec<f64>>,
    dim: usize,
    functional: StateFn,
}

impl fmt::Debug for GaussianChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaussianChain {{ dim: {} }}", self.dim)
    }
}

impl GaussianChain {
    /// Build from a symmetric covariance with unit diagonal.
    #[allow(clippy::needless_range_loop)]
    pub fn new(covariance: Vec<Vec<f64>>, functional: StateFn) -> Result<Self> {
        let dim = covariance.len();
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "covariance must be non-empty".into(),
            ));
        }
        for (i, row) in covariance.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidParameter("covariance must be square".into()));
            }
            if (row[i] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "diagonal entry {i} must be 1, got {}",
                    row[i]
                )));
            }
            for j in 0..dim {
                if (covariance[i][j] - covariance[j][i]).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(
                        "covariance must be symmetric".into(),
                    ));
                }
            }
        }
        Ok(GaussianChain {
            columns: covariance,
            dim,
            functional,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl ChainModel for GaussianChain {
    type State = Vec<f64>;
    type Innovation = (f64, usize);

    fn initial_state(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    fn sample_innovation(&self, stream: &mut Stream) -> (f64, usize) {
        (stream.normal(), stream.index(self.dim))
    }

    fn transition(&self, state: &Vec<f64>, innovation: &(f64, usize)) -> Vec<f64> {
        let (g, j) = *innovation;
        let step = g - state[j];
        let column = &self.columns[j];
        let mut next = state.clone();
        for (x, v) in next.iter_mut().zip(column.iter()) {
            *x += step * v;
        }
        next
    }

    fn functional(&self, state: &Vec<f64>) -> f64 {
        (self.functional)(state)
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[allow(clippy::needless_range_loop)]
pub fn cholesky(matrix: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = matrix.len();
    let mut factor = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = matrix[i][j];
            for k in 0..j {
                sum -= factor[i][k] * factor[j][k];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                factor[i][j] = sum.sqrt();
            } else {
                factor[i][j] = sum / factor[j][j];
            }
        }
    }
    Ok(factor)
}

/// Monte Carlo mean and standard error of `f` under exact `N(0, V)` samples
/// drawn through the triangular factorization. The reference estimator for
/// the Gaussian chain.
pub fn gaussian_exact_oracle(
    covariance: &[Vec<f64>],
    f: impl Fn(&[f64]) -> f64,
    reps: u64,
    stream: &mut Stream,
) -> Result<(f64, f64)> {
    if reps < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 replications".into(),
        ));
    }
    let factor = cholesky(covariance)?;
    let n = covariance.len();
    let mut z = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..reps {
        for zi in z.iter_mut() {
            *zi = stream.normal();
        }
        for i in 0..n {
            x[i] = factor[i][..=i]
                .iter()
                .zip(z.iter())
                .map(|(l, zj)| l * zj)
                .sum();
        }
        let v = f(&x);
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / reps as f64;
    let var = (sum_sq - reps as f64 * mean * mean) / (reps as f64 - 1.0);
    Ok((mean, (var.max(0.0) / reps as f64).sqrt()))
}
