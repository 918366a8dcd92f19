//! Experiment runner: JSON-configured replication batches producing the
//! benchmark tables and the bias/std sweep, with deterministic output.
//!
//! Replications fan out over a worker pool; each draws its substreams from
//! `(seed, k, replication, role)`, and results are aggregated in
//! replication order, so the output bytes do not depend on the number of
//! threads.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::ChainModel;
use crate::decay::{DecayEnvelope, TailSum};
use crate::error::{Error, Result};
use crate::estimator::{
    bias_estimate, long_run, stratified_long_run, unbiased_long_run, EstimatorConfig,
};
use crate::levels::{frequency_experimental, frequency_nu_dependent, GrowthFn, LevelDistribution};
use crate::rng::{fold_seed, Role, RunRng, Stream};
use crate::stats::{summarize, summarize_stratified, summarize_with_bias, Summary};

/// Estimation method of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lr,
    Ulr,
    Sulr,
    Bias,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Lr => "lr",
            Method::Ulr => "ulr",
            Method::Sulr => "sulr",
            Method::Bias => "bias",
        }
    }
}

/// Interarrival or service distribution in a config file.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VariateSpec {
    Exponential { rate: f64 },
    Pareto { shape: f64, scale: f64 },
    Hyperexponential { p: f64 },
}

impl VariateSpec {
    fn build(&self) -> Result<crate::models::Variate> {
        match *self {
            VariateSpec::Exponential { rate } => crate::models::Variate::exponential(rate),
            VariateSpec::Pareto { shape, scale } => crate::models::Variate::pareto(shape, scale),
            VariateSpec::Hyperexponential { p } => crate::models::Variate::hyperexponential(p),
        }
    }
}

/// Functional on the queue waiting time.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QueueFunctionalSpec {
    Identity,
    Indicator { threshold: f64 },
}

/// Functional on the Gaussian chain state.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaussianFunctionalSpec {
    /// The coordinate itself (zero-based index).
    Coordinate { index: usize },
    /// Exceedance indicator of one coordinate.
    CoordinateIndicator { index: usize, threshold: f64 },
}

/// Model selection and parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Garch {
        w: f64,
        alpha: f64,
        beta: f64,
        sigma0_sq: f64,
        z: f64,
    },
    Queue {
        interarrival: VariateSpec,
        service: VariateSpec,
        functional: QueueFunctionalSpec,
    },
    Ar1 {
        sqrt_eta: f64,
    },
    Gaussian {
        covariance: Vec<Vec<f64>>,
        functional: GaussianFunctionalSpec,
    },
}

/// Decay envelope named in a config file.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NuSpec {
    Geometric {
        c: f64,
        xi: f64,
    },
    Polynomial {
        c: f64,
        xi: f64,
    },
    Contraction {
        kappa: f64,
        kappa_prime: f64,
        gamma: f64,
        eta: f64,
    },
    GaussianChain {
        kappa_hat: f64,
        gamma_hat: f64,
        d: usize,
        lambda_min: f64,
        lambda_max: f64,
    },
}

impl NuSpec {
    pub(crate) fn build(&self) -> Result<DecayEnvelope> {
        match *self {
            NuSpec::Geometric { c, xi } => DecayEnvelope::geometric(c, xi),
            NuSpec::Polynomial { c, xi } => DecayEnvelope::polynomial(c, xi),
            NuSpec::Contraction {
                kappa,
                kappa_prime,
                gamma,
                eta,
            } => DecayEnvelope::from_contraction(kappa, kappa_prime, gamma, eta),
            NuSpec::GaussianChain {
                kappa_hat,
                gamma_hat,
                d,
                lambda_min,
                lambda_max,
            } => DecayEnvelope::gaussian_chain(kappa_hat, gamma_hat, d, lambda_min, lambda_max),
        }
    }
}

/// Level-distribution family of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LevelSpec {
    ObliviousExponential { delta: f64 },
    ObliviousPower { delta: f64 },
    NuDependent { nu: NuSpec },
}

impl LevelSpec {
    /// Build the distribution for horizon `k`.
    pub fn build(&self, k: u64) -> Result<LevelDistribution> {
        match self {
            LevelSpec::ObliviousExponential { delta } => {
                LevelDistribution::oblivious(GrowthFn::exponential(*delta)?)
            }
            LevelSpec::ObliviousPower { delta } => {
                LevelDistribution::oblivious(GrowthFn::power(*delta)?)
            }
            LevelSpec::NuDependent { nu } => {
                LevelDistribution::nu_dependent(TailSum::new(nu.build()?), k)
            }
        }
    }
}

/// Rule for the correction-sampling frequency `q`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum QRule {
    /// `q = 1 / (3 sum_l 2^l p_l)`.
    Experimental,
    /// `q = nubar(floor(b'/2)) / nubar(0)`; needs an envelope-backed level spec.
    NuDependent,
    /// Fixed value in `(0, 1]`.
    Fixed { value: f64 },
}

/// A full experiment description, as parsed from a JSON config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Config schema version; must be 1.
    pub schema: u32,
    pub model: ModelSpec,
    pub method: Method,
    pub k_values: Vec<u64>,
    /// `b(k) = floor(burn_frac * k)`.
    pub burn_frac: f64,
    /// `b'(k) = floor(burn_prime_frac * k)`.
    pub burn_prime_frac: f64,
    /// Replication count; desk scale by default.
    #[serde(default = "default_reps")]
    pub reps: u64,
    /// Replications backing the bias estimate folded into LR's RMSE;
    /// defaults to `reps`.
    #[serde(default)]
    pub bias_reps: Option<u64>,
    /// Component count for the stratified method; defaults to `reps`.
    #[serde(default)]
    pub n: Option<u64>,
    pub levels: LevelSpec,
    pub q_rule: QRule,
    pub seed: u64,
    /// Output CSV path; stdout when absent.
    #[serde(default)]
    pub out: Option<String>,
}

fn default_reps() -> u64 {
    10_000
}

impl ExperimentConfig {
    /// Field-level validation.
    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(Error::Config(format!(
                "schema: expected 1, got {}",
                self.schema
            )));
        }
        if self.k_values.is_empty() {
            return Err(Error::Config("k_values: must be non-empty".into()));
        }
        if self.k_values.contains(&0) {
            return Err(Error::Config("k_values: entries must be at least 1".into()));
        }
        if !(0.0..=0.5).contains(&self.burn_frac) {
            return Err(Error::Config(format!(
                "burn_frac: must lie in [0, 0.5], got {}",
                self.burn_frac
            )));
        }
        if !(0.0..=0.5).contains(&self.burn_prime_frac) {
            return Err(Error::Config(format!(
                "burn_prime_frac: must lie in [0, 0.5], got {}",
                self.burn_prime_frac
            )));
        }
        if self.burn_frac > self.burn_prime_frac {
            return Err(Error::Config(
                "burn_frac: must not exceed burn_prime_frac".into(),
            ));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps: must be at least 1".into()));
        }
        if let QRule::Fixed { value } = self.q_rule {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::Config(format!(
                    "q_rule.value: must lie in (0, 1], got {value}"
                )));
            }
        }
        if matches!(self.q_rule, QRule::NuDependent)
            && !matches!(self.levels, LevelSpec::NuDependent { .. })
        {
            return Err(Error::Config(
                "q_rule: nu_dependent requires a nu_dependent level family".into(),
            ));
        }
        if let ModelSpec::Garch { alpha, beta, .. } = self.model {
            if alpha + beta >= 1.0 {
                return Err(Error::Config(format!(
                    "model: alpha + beta must be below 1, got {}",
                    alpha + beta
                )));
            }
        }
        if let ModelSpec::Gaussian {
            covariance,
            functional,
        } = &self.model
        {
            let index = match functional {
                GaussianFunctionalSpec::Coordinate { index } => *index,
                GaussianFunctionalSpec::CoordinateIndicator { index, .. } => *index,
            };
            if index >= covariance.len() {
                return Err(Error::Config(format!(
                    "model.functional.index: {index} out of range for dimension {}",
                    covariance.len()
                )));
            }
        }
        Ok(())
    }
}

/// One aggregated table row.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub k: u64,
    pub burn_in: u64,
    pub method: String,
    /// The sampling frequency used at this `k`.
    pub q: f64,
    #[serde(flatten)]
    pub summary: Summary,
}

/// The output of [`run_experiment`]: rows plus provenance for the sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub seed: u64,
    pub method: String,
    pub model: ModelSpec,
    pub levels: LevelSpec,
    pub rows: Vec<Row>,
}

/// One point of the bias/std sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub k: u64,
    pub abs_bias: f64,
    pub ci95: f64,
    pub std: f64,
}

fn burn_in(frac: f64, k: u64) -> u64 {
    (frac * k as f64).floor() as u64
}

fn frequency(config: &ExperimentConfig, k: u64, dist: &LevelDistribution) -> Result<f64> {
    match config.q_rule {
        QRule::Experimental => Ok(frequency_experimental(dist)),
        QRule::Fixed { value } => Ok(value),
        QRule::NuDependent => {
            let LevelSpec::NuDependent { nu } = &config.levels else {
                return Err(Error::Config(
                    "q_rule: nu_dependent requires a nu_dependent level family".into(),
                ));
            };
            let tail = TailSum::new(nu.build()?);
            frequency_nu_dependent(&tail, burn_in(config.burn_prime_frac, k))
        }
    }
}

fn rows_for_model<M>(model: &M, config: &ExperimentConfig) -> Result<Vec<Row>>
where
    M: ChainModel + Sync,
{
    let mut rows = Vec::with_capacity(config.k_values.len());
    for &k in &config.k_values {
        let b = burn_in(config.burn_frac, k);
        let b_prime = burn_in(config.burn_prime_frac, k);
        let dist = config.levels.build(k)?;
        let q = frequency(config, k, &dist)?;
        let seed_k = fold_seed(config.seed, k);
        let reps = config.reps;

        let (reported_burn_in, summary) = match config.method {
            Method::Lr => {
                let runs: Vec<_> = (0..reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut stream = Stream::substream(seed_k, rep, Role::Chain);
                        long_run(model, k, b, &mut stream)
                    })
                    .collect::<Result<_>>()?;
                let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
                let costs: Vec<u64> = runs.iter().map(|r| r.g_calls).collect();
                // The RMSE of the biased method folds in an independently
                // estimated bias of the same time average.
                let bias_reps = config.bias_reps.unwrap_or(reps);
                let bias_values: Vec<f64> = (0..bias_reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut stream = Stream::substream(seed_k, rep, Role::Bias);
                        bias_estimate(model, k, b, &dist, &mut stream).map(|r| r.value)
                    })
                    .collect::<Result<_>>()?;
                let bias_row = summarize(&bias_values, &vec![0; bias_values.len()])?;
                (
                    b,
                    summarize_with_bias(&values, &costs, (bias_row.mean, bias_row.se))?,
                )
            }
            Method::Ulr => {
                let est = EstimatorConfig::new(k, b, b_prime, q)?;
                let runs: Vec<_> = (0..reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut rng = RunRng::for_replication(seed_k, rep);
                        unbiased_long_run(model, &est, &dist, &mut rng)
                    })
                    .collect::<Result<_>>()?;
                let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
                let costs: Vec<u64> = runs.iter().map(|r| r.g_calls).collect();
                (b_prime, summarize(&values, &costs)?)
            }
            Method::Sulr => {
                let est = EstimatorConfig::new(k, b, b_prime, q)?;
                let n = config.n.unwrap_or(reps);
                let run = stratified_long_run(model, &est, &dist, n, seed_k, 0)?;
                (
                    b_prime,
                    summarize_stratified(&run.time_averages, &run.corrections, run.run.g_calls)?,
                )
            }
            Method::Bias => {
                let runs: Vec<_> = (0..reps)
                    .into_par_iter()
                    .map(|rep| {
                        let mut stream = Stream::substream(seed_k, rep, Role::Bias);
                        bias_estimate(model, k, b_prime, &dist, &mut stream)
                    })
                    .collect::<Result<_>>()?;
                let values: Vec<f64> = runs.iter().map(|r| r.value).collect();
                let costs: Vec<u64> = runs.iter().map(|r| r.g_calls).collect();
                (b_prime, summarize(&values, &costs)?)
            }
        };
        rows.push(Row {
            k,
            burn_in: reported_burn_in,
            method: config.method.name().to_string(),
            q,
            summary,
        });
    }
    Ok(rows)
}

fn build_garch(
    w: f64,
    alpha: f64,
    beta: f64,
    sigma0_sq: f64,
    z: f64,
) -> Result<crate::models::Garch> {
    crate::models::Garch::new(crate::models::GarchParams {
        w,
        alpha,
        beta,
        sigma0_sq,
        z,
    })
}

fn build_queue(
    interarrival: &VariateSpec,
    service: &VariateSpec,
    functional: &QueueFunctionalSpec,
) -> Result<crate::models::Queue> {
    let functional = match functional {
        QueueFunctionalSpec::Identity => crate::models::QueueFunctional::Identity,
        QueueFunctionalSpec::Indicator { threshold } => crate::models::QueueFunctional::Indicator {
            threshold: *threshold,
        },
    };
    Ok(crate::models::Queue::new(
        interarrival.build()?,
        service.build()?,
        functional,
    ))
}

fn build_gaussian(
    covariance: &[Vec<f64>],
    functional: &GaussianFunctionalSpec,
) -> Result<crate::models::GaussianChain> {
    let f_state: crate::models::StateFn = match *functional {
        GaussianFunctionalSpec::Coordinate { index } => Arc::new(move |x| x[index]),
        GaussianFunctionalSpec::CoordinateIndicator { index, threshold } => {
            Arc::new(move |x| if x[index] > threshold { 1.0 } else { 0.0 })
        }
    };
    crate::models::GaussianChain::new(covariance.to_vec(), f_state)
}

/// Run the configured experiment and aggregate one row per `k`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let rows = match &config.model {
        ModelSpec::Garch {
            w,
            alpha,
            beta,
            sigma0_sq,
            z,
        } => rows_for_model(&build_garch(*w, *alpha, *beta, *sigma0_sq, *z)?, config)?,
        ModelSpec::Queue {
            interarrival,
            service,
            functional,
        } => rows_for_model(&build_queue(interarrival, service, functional)?, config)?,
        ModelSpec::Ar1 { sqrt_eta } => {
            rows_for_model(&crate::models::Ar1::new(*sqrt_eta)?, config)?
        }
        ModelSpec::Gaussian {
            covariance,
            functional,
        } => rows_for_model(&build_gaussian(covariance, functional)?, config)?,
    };
    Ok(Report {
        schema: config.schema,
        seed: config.seed,
        method: config.method.name().to_string(),
        model: config.model.clone(),
        levels: config.levels.clone(),
        rows,
    })
}

fn sweep_for_model<M>(model: &M, config: &ExperimentConfig) -> Result<Vec<SweepRow>>
where
    M: ChainModel + Sync,
{
    let mut rows = Vec::with_capacity(config.k_values.len());
    for &k in &config.k_values {
        let b = burn_in(config.burn_frac, k);
        let dist = config.levels.build(k)?;
        let seed_k = fold_seed(config.seed, k);
        let reps = config.reps;

        let std_values: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut stream = Stream::substream(seed_k, rep, Role::Chain);
                long_run(model, k, b, &mut stream).map(|r| r.value)
            })
            .collect::<Result<_>>()?;
        let bias_values: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|rep| {
                let mut stream = Stream::substream(seed_k, rep, Role::Bias);
                bias_estimate(model, k, b, &dist, &mut stream).map(|r| r.value)
            })
            .collect::<Result<_>>()?;

        let lr_row = summarize(&std_values, &vec![k; std_values.len()])?;
        let bias_row = summarize(&bias_values, &vec![0; bias_values.len()])?;
        rows.push(SweepRow {
            k,
            abs_bias: bias_row.mean.abs(),
            ci95: bias_row.ci95_halfwidth,
            std: lr_row.std,
        });
    }
    Ok(rows)
}

/// Bias magnitude and time-average standard deviation across `k_values`,
/// the data behind the decay figure.
pub fn sweep_bias_std(config: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    match &config.model {
        ModelSpec::Garch {
            w,
            alpha,
            beta,
            sigma0_sq,
            z,
        } => sweep_for_model(&build_garch(*w, *alpha, *beta, *sigma0_sq, *z)?, config),
        ModelSpec::Queue {
            interarrival,
            service,
            functional,
        } => sweep_for_model(&build_queue(interarrival, service, functional)?, config),
        ModelSpec::Ar1 { sqrt_eta } => {
            sweep_for_model(&crate::models::Ar1::new(*sqrt_eta)?, config)
        }
        ModelSpec::Gaussian {
            covariance,
            functional,
        } => sweep_for_model(&build_gaussian(covariance, functional)?, config),
    }
}

/// Render experiment rows as the fixed-schema CSV table.
pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::from("k,burn_in,method,mu,ci95,std,rmse,cost,cost_mse\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.k,
            row.burn_in,
            row.method,
            row.summary.mean,
            row.summary.ci95_halfwidth,
            row.summary.std,
            row.summary.rmse,
            row.summary.avg_cost,
            row.summary.cost_times_mse,
        ));
    }
    out
}

/// Render sweep rows as CSV.
pub fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("k,abs_bias,ci95,std\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.k, row.abs_bias, row.ci95, row.std
        ));
    }
    out
}

/// Human-readable listing of a level distribution: leading probabilities,
/// normalization, doubling mass, and the frequencies they imply.
pub fn levels_report(spec: &LevelSpec, k: u64, b_prime: u64) -> Result<String> {
    let dist = spec.build(k)?;
    let mut out = String::new();
    for l in 0..=20u32 {
        out.push_str(&format!("p_{l} = {}\n", dist.pmf(l)));
    }
    let head: f64 = (0..=20u32).map(|l| dist.pmf(l)).sum();
    let total = head + dist.tail_probability(21);
    out.push_str(&format!("sum p_l (with tail) = {total}\n"));
    out.push_str(&format!("sum 2^l p_l = {}\n", dist.doubling_mass()));
    out.push_str(&format!(
        "q_experimental = {}\n",
        frequency_experimental(&dist)
    ));
    if let LevelSpec::NuDependent { nu } = spec {
        let tail = TailSum::new(nu.build()?);
        out.push_str(&format!(
            "q_nu_dependent (b' = {b_prime}) = {}\n",
            frequency_nu_dependent(&tail, b_prime)?
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            schema: 1,
            model: ModelSpec::Ar1 { sqrt_eta: 0.5 },
            method: Method::Ulr,
            k_values: vec![16, 32],
            burn_frac: 0.1,
            burn_prime_frac: 0.1,
            reps: 200,
            bias_reps: None,
            n: None,
            levels: LevelSpec::ObliviousExponential { delta: 0.5 },
            q_rule: QRule::Experimental,
            seed: 7,
            out: None,
        }
    }

    #[test]
    fn config_validation_messages_name_fields() {
        let mut config = tiny_config();
        config.schema = 2;
        assert!(matches!(config.validate(), Err(Error::Config(m)) if m.starts_with("schema")));
        let mut config = tiny_config();
        config.k_values.clear();
        assert!(matches!(config.validate(), Err(Error::Config(m)) if m.starts_with("k_values")));
        let mut config = tiny_config();
        config.burn_frac = 0.6;
        assert!(matches!(config.validate(), Err(Error::Config(m)) if m.starts_with("burn_frac")));
        let mut config = tiny_config();
        config.q_rule = QRule::NuDependent;
        assert!(matches!(config.validate(), Err(Error::Config(m)) if m.starts_with("q_rule")));
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = tiny_config();
        let json = serde_json::to_string(&config).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.k_values, config.k_values);
        back.validate().unwrap();
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let json = r#"{"schema":1,"bogus":3}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(json).is_err());
    }

    #[test]
    fn run_is_deterministic_and_reports_all_k() {
        let config = tiny_config();
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.rows.len(), 2);
        assert_eq!(render_csv(&a.rows), render_csv(&b.rows));
        for row in &a.rows {
            assert_eq!(row.method, "ulr");
            assert!(row.summary.n_reps == 200);
        }
    }

    #[test]
    fn csv_header_is_stable() {
        let report = run_experiment(&tiny_config()).unwrap();
        let csv = render_csv(&report.rows);
        assert!(csv.starts_with("k,burn_in,method,mu,ci95,std,rmse,cost,cost_mse\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn single_rep_row_has_zero_spread() {
        let mut config = tiny_config();
        config.reps = 1;
        config.k_values = vec![16];
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.rows[0].summary.n_reps, 1);
        assert!(report.rows[0].summary.std.is_nan());
    }

    #[test]
    fn sweep_constant_functional_has_zero_bias() {
        // GARCH with an unreachable threshold: f is identically 0.
        let mut config = tiny_config();
        config.model = ModelSpec::Garch {
            w: 1.2e-6,
            alpha: 0.05,
            beta: 0.92,
            sigma0_sq: 2e-5,
            z: f64::INFINITY,
        };
        config.k_values = vec![16];
        config.reps = 50;
        let rows = sweep_bias_std(&config).unwrap();
        assert_eq!(rows[0].abs_bias, 0.0);
        assert_eq!(rows[0].std, 0.0);
    }

    #[test]
    fn levels_report_lists_probabilities() {
        let report = levels_report(&LevelSpec::ObliviousExponential { delta: 0.5 }, 1, 0).unwrap();
        assert!(report.contains("p_0 = 0.5"));
        assert!(report.contains("q_experimental"));
    }
}
