//! Replication aggregation and the performance metrics of the experiment
//! tables: per-replication standard deviation, RMSE, average cost, and the
//! work-normalized score cost x MSE.

use serde::Serialize;

use crate::error::{Error, Result};

/// Aggregated statistics for one table row.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    /// Number of replications aggregated.
    pub n_reps: u64,
    /// Sample mean of the replication values.
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator). For stratified rows
    /// this is the standard deviation of the single output.
    pub std: f64,
    /// Standard error of the mean.
    pub se: f64,
    /// Half-width of the 95% confidence interval, exactly `1.96 * se`.
    pub ci95_halfwidth: f64,
    /// Mean transition-call cost per replication.
    pub avg_cost: f64,
    /// Total transition-call cost across replications.
    pub total_cost: u64,
    /// Root mean square error: the standard deviation for unbiased methods,
    /// `sqrt(std^2 + bias^2)` when a bias estimate is supplied.
    pub rmse: f64,
    /// The efficiency score: cost times squared RMSE. Per-replication
    /// methods use the average cost, stratified rows the total cost.
    pub cost_times_mse: f64,
    /// Bias estimate `(mean, se)` backing the RMSE, when one was used.
    pub bias: Option<(f64, f64)>,
}

/// One-pass mean and sample variance (n - 1 denominator), accumulated in a
/// fixed order for reproducibility.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let var = if values.len() > 1 {
        m2 / (values.len() - 1) as f64
    } else {
        0.0
    };
    (mean, var)
}

/// Summarize replications of an unbiased method: RMSE equals the
/// per-replication standard deviation.
pub fn summarize(values: &[f64], costs: &[u64]) -> Result<Summary> {
    if values.is_empty() || values.len() != costs.len() {
        return Err(Error::EmptyInput);
    }
    let n = values.len() as u64;
    let (mean, var) = mean_and_variance(values);
    // A single replication has no spread estimate; flag it as undefined
    // rather than reporting zero.
    let std = if n > 1 { var.sqrt() } else { f64::NAN };
    let se = std / (n as f64).sqrt();
    let total_cost: u64 = costs.iter().sum();
    let avg_cost = total_cost as f64 / n as f64;
    let rmse = std;
    Ok(Summary {
        n_reps: n,
        mean,
        std,
        se,
        ci95_halfwidth: 1.96 * se,
        avg_cost,
        total_cost,
        rmse,
        cost_times_mse: avg_cost * rmse * rmse,
        bias: None,
    })
}

/// Summarize replications of a biased method, folding an externally
/// estimated bias `(mean, se)` into the RMSE.
pub fn summarize_with_bias(values: &[f64], costs: &[u64], bias: (f64, f64)) -> Result<Summary> {
    let mut row = summarize(values, costs)?;
    let (bias_mean, _) = bias;
    row.rmse = (row.std * row.std + bias_mean * bias_mean).sqrt();
    row.cost_times_mse = row.avg_cost * row.rmse * row.rmse;
    row.bias = Some(bias);
    Ok(row)
}

/// Summarize one stratified run from its component values.
///
/// The output's standard deviation is the standard error of the difference
/// of component means, and the efficiency score uses the total cost, since
/// the whole budget produced a single output.
pub fn summarize_stratified(
    time_averages: &[f64],
    corrections: &[f64],
    total_cost: u64,
) -> Result<Summary> {
    if time_averages.is_empty() || corrections.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = time_averages.len() as f64;
    let m = corrections.len() as f64;
    let (lr_mean, lr_var) = mean_and_variance(time_averages);
    let (bias_mean, bias_var) = mean_and_variance(corrections);
    let value = lr_mean - bias_mean;
    let output_std = (lr_var / n + bias_var / m).sqrt();
    Ok(Summary {
        n_reps: 1,
        mean: value,
        std: output_std,
        se: output_std,
        ci95_halfwidth: 1.96 * output_std,
        avg_cost: total_cost as f64,
        total_cost,
        rmse: output_std,
        cost_times_mse: total_cost as f64 * output_std * output_std,
        bias: None,
    })
}

/// The work-normalized performance score of a row.
pub fn efficiency(row: &Summary) -> f64 {
    row.cost_times_mse
}
