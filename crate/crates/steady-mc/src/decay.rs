//! Decay envelopes and their weighted tail sums.
//!
//! A decay envelope `nu(i)` bounds the mean square gap between the chain's
//! functional and a coupled copy started `m` steps earlier, after `i` shared
//! innovations. Everything downstream of the coupling argument is phrased in
//! terms of the weighted tail sums
//!
//! ```text
//! nubar(j) = sum_{i >= j} sqrt(nu(i) / (i + 1))
//! ```
//!
//! which parameterize level distributions and sampling frequencies. This
//! module constructs the envelope families with known analytic structure and
//! evaluates their tail sums to a certified relative tolerance.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::levels::GrowthFn;

const DEFAULT_TOL: f64 = 1e-9;

// Hard cap on directly summed terms before giving up on the tolerance.
const TERM_BUDGET: u64 = 1 << 26;

#[derive(Clone)]
enum Family {
    /// nu(i) = c * exp(-rate * i)
    Geometric { c: f64, rate: f64 },
    /// nu(i) = c * (i + 1)^(-exponent)
    Polynomial { c: f64, exponent: f64 },
    /// nu(i) = min(exp_amp * exp(-exp_rate * i), poly_amp * (i + 1)^(-gamma))
    GaussianChain {
        exp_amp: f64,
        exp_rate: f64,
        poly_amp: f64,
        gamma: f64,
    },
    /// User-supplied evaluator without an analytic tail bound.
    Custom(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Geometric { c, rate } => {
                write!(f, "Geometric {{ c: {c}, rate: {rate} }}")
            }
            Family::Polynomial { c, exponent } => {
                write!(f, "Polynomial {{ c: {c}, exponent: {exponent} }}")
            }
            Family::GaussianChain {
                exp_amp,
                exp_rate,
                poly_amp,
                gamma,
            } => write!(
                f,
                "GaussianChain {{ exp_amp: {exp_amp}, exp_rate: {exp_rate}, \
                 poly_amp: {poly_amp}, gamma: {gamma} }}"
            ),
            Family::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A positive decreasing envelope `nu(i)` with known tail structure.
#[derive(Debug, Clone)]
pub struct DecayEnvelope {
    family: Family,
}

impl DecayEnvelope {
    /// Exponentially decaying envelope `nu(i) = c * e^(-xi * i)`.
    ///
    /// This is the sufficient-condition form, which states the rate in
    /// `(0, 1]`; faster rates arise through [`DecayEnvelope::from_contraction`].
    pub fn geometric(c: f64, xi: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c must be positive, got {c}"
            )));
        }
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "xi must lie in (0, 1], got {xi}"
            )));
        }
        Ok(DecayEnvelope {
            family: Family::Geometric { c, rate: xi },
        })
    }

    /// Envelope `nu(i) = kappa^2 * kappa_prime^gamma * eta^(gamma * i)`
    /// implied by a mean-square contraction with factor `eta` and a
    /// generalized Lipschitz functional with exponent `gamma`.
    pub fn from_contraction(kappa: f64, kappa_prime: f64, gamma: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "contraction factor eta must lie in (0, 1), got {eta}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0, 1], got {gamma}"
            )));
        }
        if !(kappa > 0.0 && kappa_prime > 0.0) {
            return Err(Error::InvalidParameter(
                "kappa and kappa_prime must be positive".into(),
            ));
        }
        Ok(DecayEnvelope {
            family: Family::Geometric {
                c: kappa * kappa * kappa_prime.powf(gamma),
                rate: gamma * (1.0 / eta).ln(),
            },
        })
    }

    /// Polynomially decaying envelope `nu(i) = c * (i + 1)^(-xi)`.
    ///
    /// `xi > 1` is required for the weighted tail sum to converge.
    pub fn polynomial(c: f64, xi: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "c must be positive, got {c}"
            )));
        }
        if !(xi > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "xi must exceed 1 for summability, got {xi}"
            )));
        }
        Ok(DecayEnvelope {
            family: Family::Polynomial { c, exponent: xi },
        })
    }

    /// Envelope for the random-coordinate Gaussian chain:
    /// the minimum of an exponential branch with rate set by the smallest
    /// eigenvalue and a polynomial branch `(d^2 / (i + 1))^gamma_hat`,
    /// both scaled by `kappa_hat^2`.
    pub fn gaussian_chain(
        kappa_hat: f64,
        gamma_hat: f64,
        d: usize,
        lambda_min: f64,
        lambda_max: f64,
    ) -> Result<Self> {
        let dim = d as f64;
        if !(gamma_hat > 0.0 && gamma_hat <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma_hat must lie in (0, 1], got {gamma_hat}"
            )));
        }
        if !(kappa_hat > 0.0) {
            return Err(Error::InvalidParameter("kappa_hat must be positive".into()));
        }
        if !(lambda_min > 0.0 && lambda_min <= lambda_max) {
            return Err(Error::InvalidParameter(
                "eigenvalue bounds must satisfy 0 < lambda_min <= lambda_max".into(),
            ));
        }
        if lambda_max > dim {
            return Err(Error::InvalidParameter(format!(
                "lambda_max ({lambda_max}) cannot exceed the trace bound d = {dim}"
            )));
        }
        if lambda_min >= dim {
            // The exponential branch would vanish after one step, breaking
            // positivity of the envelope.
            return Err(Error::InvalidParameter(format!(
                "lambda_min ({lambda_min}) must be strictly below d = {dim}"
            )));
        }
        let scale = kappa_hat * kappa_hat;
        Ok(DecayEnvelope {
            family: Family::GaussianChain {
                exp_amp: scale * (lambda_max * dim).powf(gamma_hat),
                exp_rate: -gamma_hat * (1.0 - lambda_min / dim).ln(),
                poly_amp: scale * (dim * dim).powf(gamma_hat),
                gamma: gamma_hat,
            },
        })
    }

    /// Envelope from an arbitrary evaluator. Tail sums are unavailable for
    /// this family because no truncation bound is known.
    pub fn custom(eval: Arc<dyn Fn(u64) -> f64 + Send + Sync>) -> Self {
        DecayEnvelope {
            family: Family::Custom(eval),
        }
    }

    /// Evaluate `nu(i)`.
    pub fn eval(&self, i: u64) -> f64 {
        self.eval_f(i as f64)
    }

    fn eval_f(&self, i: f64) -> f64 {
        match &self.family {
            Family::Geometric { c, rate } => c * (-rate * i).exp(),
            Family::Polynomial { c, exponent } => c * (i + 1.0).powf(-exponent),
            Family::GaussianChain {
                exp_amp,
                exp_rate,
                poly_amp,
                gamma,
            } => {
                let exponential = exp_amp * (-exp_rate * i).exp();
                let polynomial = poly_amp * (i + 1.0).powf(-gamma);
                exponential.min(polynomial)
            }
            Family::Custom(f) => f(i as u64),
        }
    }

    // Amplitude and rate of an exponential upper bound nu(i) <= amp * e^(-rate i),
    // when the family has one.
    fn exponential_bound(&self) -> Option<(f64, f64)> {
        match &self.family {
            Family::Geometric { c, rate } => Some((*c, *rate)),
            Family::GaussianChain {
                exp_amp, exp_rate, ..
            } => Some((*exp_amp, *exp_rate)),
            _ => None,
        }
    }
}

/// Evaluator for the weighted tail sums of a [`DecayEnvelope`].
#[derive(Debug, Clone)]
pub struct TailSum {
    nu: DecayEnvelope,
    tol: f64,
}

impl TailSum {
    /// Evaluator with the default relative tolerance of `1e-9`.
    pub fn new(nu: DecayEnvelope) -> Self {
        TailSum {
            nu,
            tol: DEFAULT_TOL,
        }
    }

    /// Evaluator with an explicit relative tolerance.
    pub fn with_tol(nu: DecayEnvelope, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must lie in (0, 1), got {tol}"
            )));
        }
        Ok(TailSum { nu, tol })
    }

    /// The envelope being summed.
    pub fn envelope(&self) -> &DecayEnvelope {
        &self.nu
    }

    /// The tail sum `nubar(j)`, with relative error at most the tolerance.
    pub fn value(&self, j: u64) -> Result<f64> {
        self.value_at(j as f64)
    }

    /// `nubar(j)` for a possibly enormous real-valued index.
    ///
    /// Level constructions evaluate the tail at dyadic points `k * 2^(l-1)`
    /// that can exceed the integer range long before their probability mass
    /// matters; the polynomial family stays analytic out there and the
    /// exponential families have underflowed to zero.
    pub fn value_at(&self, j: f64) -> Result<f64> {
        assert!(
            j >= 0.0 && j.fract() == 0.0,
            "tail index must be a non-negative integer"
        );
        match &self.nu.family {
            Family::Polynomial { c, exponent } => {
                // sum_{i>=j} sqrt(c) (i+1)^(-(xi+1)/2) = sqrt(c) * zeta((xi+1)/2, j+1),
                // evaluated by Euler-Maclaurin far below the requested tolerance.
                Ok(c.sqrt() * hurwitz_zeta((exponent + 1.0) / 2.0, j + 1.0))
            }
            Family::Custom(_) => Err(Error::NoTailBound),
            _ => {
                if j > u64::MAX as f64 / 2.0 {
                    // Exponential-type envelopes have underflowed by here.
                    return Ok(0.0);
                }
                self.sum_direct(j as u64, None)
            }
        }
    }

    /// The tilted tail sum `nubar_theta(j)`, weighting term `i` by
    /// `theta(log2(4i + 1))`.
    ///
    /// The pair must keep the sum finite: exponential-type envelopes accept
    /// any growth function, while a polynomial envelope with exponent `xi`
    /// accepts the power family and the exponential family only when its
    /// `delta` stays below `xi - 1`.
    pub fn value_tilted(&self, theta: &GrowthFn, j: u64) -> Result<f64> {
        match &self.nu.family {
            Family::Custom(_) => return Err(Error::NoTailBound),
            Family::Polynomial { exponent, .. } => {
                if let GrowthFn::Exponential { delta } = theta {
                    if *delta >= exponent - 1.0 {
                        return Err(Error::InvalidParameter(format!(
                            "exponential growth delta ({delta}) must stay below \
                             xi - 1 = {} for a polynomial envelope",
                            exponent - 1.0
                        )));
                    }
                }
            }
            _ => {}
        }
        self.sum_direct(j, Some(theta))
    }

    // Direct summation with geometrically growing blocks. After each block
    // an analytic majorant of the remaining tail is compared against
    // tol * partial; once it drops below, the partial sum carries the
    // certified relative error.
    fn sum_direct(&self, j: u64, theta: Option<&GrowthFn>) -> Result<f64> {
        let term = |i: u64| -> f64 {
            let base = (self.nu.eval(i) / (i as f64 + 1.0)).sqrt();
            match theta {
                None => base,
                Some(t) => base * t.eval((4.0 * i as f64 + 1.0).log2()).sqrt(),
            }
        };
        let mut partial = 0.0;
        let mut i = j;
        let mut block = 32u64;
        loop {
            let end = i.saturating_add(block);
            while i < end {
                partial += term(i);
                i += 1;
            }
            let majorant = self.tail_majorant(i, theta);
            if majorant <= self.tol * partial {
                return Ok(partial);
            }
            if i - j >= TERM_BUDGET {
                return Err(Error::TailTolerance {
                    requested: self.tol,
                    achieved: if partial > 0.0 {
                        majorant / partial
                    } else {
                        f64::INFINITY
                    },
                });
            }
            block *= 2;
        }
    }

    // Upper bound on the tail starting at the first unsummed index `m`.
    fn tail_majorant(&self, m: u64, theta: Option<&GrowthFn>) -> f64 {
        let mf = m as f64;
        match (&self.nu.family, theta) {
            // Plain geometric-type tails: sqrt(nu(m)/(m+1)) / (1 - e^(-rate/2)),
            // using the exponential bound on nu.
            (_, None) => {
                let (amp, rate) = self
                    .nu
                    .exponential_bound()
                    .expect("direct summation requires an exponential bound");
                let first = (amp * (-rate * mf).exp() / (mf + 1.0)).sqrt();
                first / (1.0 - (-rate / 2.0).exp())
            }
            // Tilted geometric-type tails: geometric series with ratio
            // e^(-rate/2) times the (decreasing) per-step growth of theta.
            (Family::Geometric { .. }, Some(t)) | (Family::GaussianChain { .. }, Some(t)) => {
                let (amp, rate) = self.nu.exponential_bound().unwrap();
                let tilt = t.eval((4.0 * mf + 1.0).log2());
                let first = (amp * (-rate * mf).exp() * tilt / (mf + 1.0)).sqrt();
                let step = (-rate / 2.0).exp() * t.step_ratio_sqrt(mf);
                if step >= 1.0 {
                    return f64::INFINITY;
                }
                first / (1.0 - step)
            }
            // Tilted polynomial tails: absorb theta's growth into a slightly
            // smaller power-law exponent and integrate.
            (Family::Polynomial { c, exponent }, Some(t)) => {
                let s = (exponent + 1.0) / 2.0;
                match t {
                    GrowthFn::Power { delta } => {
                        let eps = delta / (2.0 * (4.0 * mf + 1.0).ln());
                        if s - eps <= 1.0 {
                            return f64::INFINITY;
                        }
                        let tilt_at_m = t.eval((4.0 * mf + 1.0).log2()).sqrt();
                        c.sqrt() * tilt_at_m * mf.powf(1.0 - s) / (s - 1.0 - eps)
                    }
                    GrowthFn::Exponential { delta } => {
                        // theta(log2(4i+1))^(1/2) <= 2^(delta/2) (i+1)^(delta/2)
                        let s_eff = s - delta / 2.0;
                        2f64.powf(delta / 2.0) * c.sqrt() * mf.powf(1.0 - s_eff) / (s_eff - 1.0)
                    }
                }
            }
            (Family::Custom(_), _) => unreachable!("custom envelopes are rejected earlier"),
        }
    }
}

/// Hurwitz zeta `zeta(s, a) = sum_{k>=0} (a + k)^(-s)` for `s > 1`, `a >= 1`,
/// by Euler-Maclaurin with six Bernoulli correction terms.
///
/// Relative accuracy is far below 1e-12 across the parameter ranges used
/// here, and the expansion is valid for arbitrarily large `a`.
pub(crate) fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a >= 1.0);
    // Sum directly until the expansion point is comfortably large.
    let pivot = 16.0 + 2.0 * s;
    let mut sum = 0.0;
    let mut x = a;
    while x < pivot {
        sum += x.powf(-s);
        x += 1.0;
    }
    let mut tail = x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // B_2, B_4, ..., B_12
    const BERNOULLI: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let inv_x2 = 1.0 / (x * x);
    let mut rising = s; // (s)(s+1)...(s + 2j - 2)
    let mut factorial = 2.0; // (2j)!
    let mut power = x.powf(-s - 1.0);
    for (idx, b) in BERNOULLI.iter().enumerate() {
        tail += b / factorial * rising * power;
        let j = (idx + 1) as f64;
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        power *= inv_x2;
    }
    sum + tail
}
