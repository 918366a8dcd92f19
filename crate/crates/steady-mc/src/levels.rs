//! Level distributions and sampling frequencies for randomized debiasing.
//!
//! The bias corrector draws a random level `N` and couples two runs of
//! length `k * 2^N`. Its distribution `(p_l)` controls both the corrector's
//! variance and its expected cost: level `l` costs `3 k 2^l` transition
//! calls, so the distribution must put geometrically little mass on deep
//! levels while keeping every `p_l` positive.
//!
//! Two constructions are provided. The tail-sum-dependent one places mass
//! proportionally to increments of the envelope's tail sum, which is optimal
//! up to constants but requires knowing the envelope. The oblivious one
//! needs only a growth function `theta` and sets the tail probabilities to
//! `P(N >= l) = 1 / (theta(l) 2^l)` exactly.

use crate::decay::{hurwitz_zeta, TailSum};
use crate::error::{Error, Result};
use crate::rng::Stream;

// Remaining doubling-weighted mass below which the cached pmf stops.
const LEVEL_MASS_CUTOFF: f64 = 1e-12;

/// Increasing growth function `theta` with `theta(x) = 1` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum GrowthFn {
    /// `theta(x) = 2^(delta (x - 1))` for `x >= 1`; any `delta > 0`.
    Exponential { delta: f64 },
    /// `theta(x) = max(1, x)^delta`; requires `delta > 1` so that
    /// `sum 1/theta(l)` converges.
    Power { delta: f64 },
}

impl GrowthFn {
    pub fn exponential(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponential growth needs delta > 0, got {delta}"
            )));
        }
        Ok(GrowthFn::Exponential { delta })
    }

    pub fn power(delta: f64) -> Result<Self> {
        if !(delta > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "power growth needs delta > 1 for summability, got {delta}"
            )));
        }
        Ok(GrowthFn::Power { delta })
    }

    /// Evaluate `theta(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 1.0;
        }
        match self {
            GrowthFn::Exponential { delta } => 2f64.powf(delta * (x - 1.0)),
            GrowthFn::Power { delta } => x.powf(*delta),
        }
    }

    /// `theta(l)` at an integer level.
    pub fn at_level(&self, l: u32) -> f64 {
        self.eval(l as f64)
    }

    /// `sum_{l >= 0} 1 / theta(l)`, evaluated in closed form.
    pub fn reciprocal_sum(&self) -> f64 {
        match self {
            // 1 + sum_{l>=1} 2^(-delta (l-1)) = 1 + 1 / (1 - 2^(-delta))
            GrowthFn::Exponential { delta } => 1.0 + 1.0 / (1.0 - 2f64.powf(-delta)),
            // theta(0) = theta(1) = 1, then l^(-delta)
            GrowthFn::Power { delta } => 2.0 + hurwitz_zeta(*delta, 2.0),
        }
    }

    // sup_{i >= m} sqrt(theta(log2(4i+5)) / theta(log2(4i+1))), the per-step
    // tilt growth used by tail-sum truncation bounds. Decreasing in m.
    pub(crate) fn step_ratio_sqrt(&self, m: f64) -> f64 {
        match self {
            GrowthFn::Exponential { delta } => {
                ((4.0 * m + 5.0) / (4.0 * m + 1.0)).powf(delta / 2.0)
            }
            GrowthFn::Power { delta } => {
                let hi = (4.0 * m + 5.0).log2().max(1.0);
                let lo = (4.0 * m + 1.0).log2().max(1.0);
                (hi / lo).powf(delta / 2.0)
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Oblivious {
        theta: GrowthFn,
        reciprocal_sum: f64,
    },
    NuDependent {
        tail: TailSum,
        k: u64,
        nubar_k: f64,
        /// p_0 ..= p_cutoff
        pmf: Vec<f64>,
        /// Cumulative probabilities aligned with `pmf`.
        cum: Vec<f64>,
    },
    Fixed {
        level: u32,
    },
}

/// The law of the random truncation level `N`.
#[derive(Debug, Clone)]
pub struct LevelDistribution {
    kind: Kind,
}

impl LevelDistribution {
    /// Oblivious distribution `p_l = 1/(theta(l) 2^l) - 1/(theta(l+1) 2^(l+1))`.
    pub fn oblivious(theta: GrowthFn) -> Result<Self> {
        let reciprocal_sum = theta.reciprocal_sum();
        Ok(LevelDistribution {
            kind: Kind::Oblivious {
                theta,
                reciprocal_sum,
            },
        })
    }

    /// Tail-sum-dependent distribution for horizon `k`.
    ///
    /// For `l >= 2`, `p_l = (nubar(k 2^(l-2)) - nubar(k 2^(l-1))) / (2^l nubar(k))`;
    /// the first two levels absorb the rest with `p_0 = 2 p_1`. Levels are
    /// cached until the telescoped remainder drops below `1e-12`.
    pub fn nu_dependent(tail: TailSum, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let nubar_k = tail.value(k)?;
        if !(nubar_k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail sum underflows at k = {k}; use the oblivious construction"
            )));
        }
        let mut levels = Vec::new();
        let mut sum_tail = 0.0;
        let mut nb_prev = nubar_k;
        let mut l = 2u32;
        loop {
            let nb_cur = tail.value_at(k as f64 * 2f64.powi(l as i32 - 1))?;
            let p = (nb_prev - nb_cur) / (2f64.powi(l as i32) * nubar_k);
            levels.push(p);
            sum_tail += p;
            if nb_cur / nubar_k < LEVEL_MASS_CUTOFF {
                break;
            }
            if l > 2000 {
                return Err(Error::TailTolerance {
                    requested: LEVEL_MASS_CUTOFF,
                    achieved: nb_cur / nubar_k,
                });
            }
            nb_prev = nb_cur;
            l += 1;
        }
        let p1 = (1.0 - sum_tail) / 3.0;
        let p0 = 2.0 * p1;
        let mut pmf = Vec::with_capacity(levels.len() + 2);
        pmf.push(p0);
        pmf.push(p1);
        pmf.extend(levels);
        let mut cum = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &p in &pmf {
            acc += p;
            cum.push(acc);
        }
        Ok(LevelDistribution {
            kind: Kind::NuDependent {
                tail,
                k,
                nubar_k,
                pmf,
                cum,
            },
        })
    }

    /// Degenerate distribution with all mass on one level. A diagnostic
    /// tool: it violates the positivity the estimator theory asks for, but
    /// makes structural tests deterministic.
    pub fn fixed_level(level: u32) -> Self {
        LevelDistribution {
            kind: Kind::Fixed { level },
        }
    }

    /// `p_l`.
    pub fn pmf(&self, l: u32) -> f64 {
        match &self.kind {
            Kind::Oblivious { theta, .. } => {
                let a = 1.0 / (theta.at_level(l) * 2f64.powi(l as i32));
                let b = 1.0 / (theta.at_level(l + 1) * 2f64.powi(l as i32 + 1));
                a - b
            }
            Kind::NuDependent { pmf, .. } => {
                if let Some(&p) = pmf.get(l as usize) {
                    p
                } else {
                    self.nu_dependent_fresh(l)
                }
            }
            Kind::Fixed { level } => {
                if l == *level {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    // Uncached pmf evaluation past the cutoff (total mass there < 1e-12).
    fn nu_dependent_fresh(&self, l: u32) -> f64 {
        let Kind::NuDependent {
            tail, k, nubar_k, ..
        } = &self.kind
        else {
            unreachable!()
        };
        let hi = tail
            .value_at(*k as f64 * 2f64.powi(l as i32 - 2))
            .unwrap_or(0.0);
        let lo = tail
            .value_at(*k as f64 * 2f64.powi(l as i32 - 1))
            .unwrap_or(0.0);
        ((hi - lo) / (2f64.powi(l as i32) * nubar_k)).max(0.0)
    }

    /// `P(N >= l)`, exact for the oblivious kind.
    pub fn tail_probability(&self, l: u32) -> f64 {
        match &self.kind {
            Kind::Oblivious { theta, .. } => 1.0 / (theta.at_level(l) * 2f64.powi(l as i32)),
            Kind::NuDependent { cum, .. } => {
                if l == 0 {
                    1.0
                } else if let Some(&c) = cum.get(l as usize - 1) {
                    1.0 - c
                } else {
                    (1.0 - cum.last().copied().unwrap_or(1.0)).max(0.0)
                }
            }
            Kind::Fixed { level } => {
                if l <= *level {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `sum_l 2^l p_l`, the expected horizon-doubling factor, in closed form.
    pub fn doubling_mass(&self) -> f64 {
        match &self.kind {
            // 2^l p_l = 1/theta(l) - 1/(2 theta(l+1)) telescopes to
            // (sum 1/theta(l)) / 2 + 1/2.
            Kind::Oblivious { reciprocal_sum, .. } => 0.5 * reciprocal_sum + 0.5,
            // sum_{l>=2} 2^l p_l telescopes to exactly 1.
            Kind::NuDependent { pmf, .. } => pmf[0] + 2.0 * pmf[1] + 1.0,
            Kind::Fixed { level } => 2f64.powi(*level as i32),
        }
    }

    /// Inverse-CDF sample: the smallest `l` with `P(N <= l) >= u`.
    pub fn sample(&self, u: f64) -> u32 {
        debug_assert!((0.0..1.0).contains(&u));
        match &self.kind {
            Kind::Oblivious { theta, .. } => {
                let mut l = 0u32;
                loop {
                    // P(N <= l) = 1 - 1/(theta(l+1) 2^(l+1)), exactly.
                    let tail = 1.0 / (theta.at_level(l + 1) * 2f64.powi(l as i32 + 1));
                    if u <= 1.0 - tail {
                        return l;
                    }
                    l += 1;
                }
            }
            Kind::NuDependent { cum, .. } => {
                for (l, &c) in cum.iter().enumerate() {
                    if u <= c {
                        return l as u32;
                    }
                }
                // Beyond the cache lies < 1e-12 of mass; extend on the fly.
                // Never return a level whose probability underflowed to 0:
                // the corrector divides by it.
                let mut l = cum.len() as u32;
                let mut acc = *cum.last().unwrap();
                let mut fallback = cum.len() as u32 - 1;
                loop {
                    let p = self.nu_dependent_fresh(l);
                    acc += p;
                    if p > 0.0 {
                        if u <= acc {
                            return l;
                        }
                        fallback = l;
                    }
                    if p == 0.0 || l > cum.len() as u32 + 1024 {
                        return fallback;
                    }
                    l += 1;
                }
            }
            Kind::Fixed { level } => *level,
        }
    }

    /// Sample `N` from a stream.
    pub fn sample_with(&self, stream: &mut Stream) -> u32 {
        self.sample(stream.open_uniform())
    }
}

/// The experimental sampling frequency `q = 1 / (3 sum_l 2^l p_l)`.
pub fn frequency_experimental(dist: &LevelDistribution) -> f64 {
    1.0 / (3.0 * dist.doubling_mass())
}

/// The tail-ratio frequency `q = nubar(floor(b'/2)) / nubar(0)`.
///
/// Monotonicity of the tail sum keeps the ratio in `(0, 1]`; it equals 1
/// for `b'` of 0 or 1.
pub fn frequency_nu_dependent(tail: &TailSum, b_prime: u64) -> Result<f64> {
    let q = tail.value(b_prime / 2)? / tail.value(0)?;
    debug_assert!(q > 0.0 && q <= 1.0 + 1e-12);
    Ok(q.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::DecayEnvelope;

    fn exp_half() -> LevelDistribution {
        LevelDistribution::oblivious(GrowthFn::exponential(0.5).unwrap()).unwrap()
    }

    #[test]
    fn growth_families_validate() {
        assert!(GrowthFn::exponential(0.0).is_err());
        assert!(GrowthFn::power(1.0).is_err());
        let theta = GrowthFn::exponential(0.5).unwrap();
        assert_eq!(theta.eval(0.0), 1.0);
        assert_eq!(theta.eval(1.0), 1.0);
        assert!((theta.eval(3.0) - 2.0).abs() < 1e-15);
        let theta = GrowthFn::power(2.0).unwrap();
        assert_eq!(theta.at_level(1), 1.0);
        assert_eq!(theta.at_level(3), 9.0);
    }

    #[test]
    fn oblivious_first_level_is_half() {
        // theta(0) = theta(1) = 1 forces p_0 = 1 - 1/2.
        for theta in [
            GrowthFn::exponential(0.5).unwrap(),
            GrowthFn::power(2.0).unwrap(),
        ] {
            let dist = LevelDistribution::oblivious(theta).unwrap();
            assert_eq!(dist.pmf(0), 0.5);
        }
    }

    #[test]
    fn oblivious_exponential_half_values() {
        let dist = exp_half();
        // p_1 = 1/2 - 1/(4 sqrt(2))
        let expected = 0.5 - 1.0 / (4.0 * 2f64.sqrt());
        assert!((dist.pmf(1) - expected).abs() < 1e-15);
        assert!((expected - 0.323223).abs() < 1e-6);
        // doubling mass (4 + sqrt(2)) / 2 and the frequency it implies,
        // q = 2 / (12 + 3 sqrt(2)) ~ 0.1231327
        let mass = (4.0 + 2f64.sqrt()) / 2.0;
        assert!((dist.doubling_mass() - mass).abs() < 1e-12);
        let q = frequency_experimental(&dist);
        assert!((q - 2.0 / (12.0 + 3.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((q - 0.123_132_7).abs() < 1e-6);
    }

    #[test]
    fn oblivious_tail_identity_machine_precision() {
        for theta in [
            GrowthFn::exponential(0.5).unwrap(),
            GrowthFn::power(2.0).unwrap(),
        ] {
            let dist = LevelDistribution::oblivious(theta).unwrap();
            for l in 0..=20u32 {
                let summed: f64 =
                    (l..60).map(|m| dist.pmf(m)).sum::<f64>() + dist.tail_probability(60);
                let exact = dist.tail_probability(l);
                assert!(
                    (summed - exact).abs() <= 1e-14 * exact.max(1e-300),
                    "tail identity failed at l = {l}"
                );
            }
        }
    }

    #[test]
    fn oblivious_pmf_normalizes() {
        for theta in [
            GrowthFn::exponential(0.5).unwrap(),
            GrowthFn::power(2.0).unwrap(),
        ] {
            let dist = LevelDistribution::oblivious(theta).unwrap();
            let total: f64 = (0..60).map(|l| dist.pmf(l)).sum::<f64>() + dist.tail_probability(60);
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oblivious_rate_orders() {
        // Exponential family: p_l * 2^((delta+1) l) is constant for l >= 2.
        let dist = exp_half();
        let reference = dist.pmf(2) * 2f64.powf(1.5 * 2.0);
        for l in 2..=30u32 {
            let scaled = dist.pmf(l) * 2f64.powf(1.5 * l as f64);
            assert!((scaled - reference).abs() < 1e-9 * reference);
        }
        // Power family: p_l * l^delta * 2^l stays within constant bounds.
        let dist = LevelDistribution::oblivious(GrowthFn::power(2.0).unwrap()).unwrap();
        for l in 2..=30u32 {
            let scaled = dist.pmf(l) * (l as f64).powi(2) * 2f64.powi(l as i32);
            assert!(scaled > 0.4 && scaled < 1.1, "l = {l}: {scaled}");
        }
    }

    #[test]
    fn sampling_inverts_the_cdf() {
        let dist = exp_half();
        assert_eq!(dist.sample(0.4), 0);
        // P(N <= 0) = 0.5 < 0.51 <= P(N <= 1) ~ 0.823223
        assert_eq!(dist.sample(0.51), 1);
        assert_eq!(dist.sample(1e-12), 0);
        // 1 - u = 1e-6 needs the exact tail 2^(-(1.5 l + 1)) below it,
        // which first happens at l + 1 = 14.
        assert_eq!(dist.sample(0.999_999), 13);
    }

    #[test]
    fn nu_dependent_structure() {
        let eta = 0.25f64;
        let nu = DecayEnvelope::from_contraction(1.0, 1.0 / (1.0 - eta), 1.0, eta).unwrap();
        let tail = TailSum::new(nu);
        let dist = LevelDistribution::nu_dependent(tail.clone(), 1).unwrap();

        // p_0 = 2 p_1, with the guaranteed floors.
        assert!((dist.pmf(0) - 2.0 * dist.pmf(1)).abs() < 1e-15);
        assert!(dist.pmf(0) >= 0.5);
        assert!(dist.pmf(1) >= 0.25);

        // p_2 against an independent tail-sum oracle.
        let brute = |j: u64| -> f64 {
            (j..j + 300)
                .map(|i| (0.25f64.powi(i as i32) / (1.0 - eta) / (i as f64 + 1.0)).sqrt())
                .sum()
        };
        let expected = (brute(1) - brute(2)) / (4.0 * brute(1));
        assert!((dist.pmf(2) - expected).abs() < 1e-8 * expected);

        // Doubling-weighted tail mass telescopes to one.
        let doubling_tail: f64 = (2..60u32).map(|l| 2f64.powi(l as i32) * dist.pmf(l)).sum();
        assert!((doubling_tail - 1.0).abs() < 1e-10);

        // Total mass is one.
        let total: f64 = (0..60u32).map(|l| dist.pmf(l)).sum();
        assert!((total - 1.0).abs() < 1e-12);

        // q >= 1/9 via the doubling mass bound.
        let q = frequency_experimental(&dist);
        assert!(q >= 1.0 / 9.0);
        assert!(q <= 1.0);
    }

    #[test]
    fn nu_dependent_polynomial_envelope() {
        // Exercises the analytic tail path at astronomically deep levels.
        let nu = DecayEnvelope::polynomial(1.0, 2.0).unwrap();
        let dist = LevelDistribution::nu_dependent(TailSum::new(nu), 4).unwrap();
        let doubling_tail: f64 = (2..200u32).map(|l| 2f64.powi(l as i32) * dist.pmf(l)).sum();
        assert!((doubling_tail - 1.0).abs() < 1e-10);
        assert!(dist.pmf(0) >= 0.5 && dist.pmf(1) >= 0.25);
        let total: f64 = (0..200u32).map(|l| dist.pmf(l)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nu_dependent_extreme_quantiles_keep_positive_pmf() {
        let nu = DecayEnvelope::from_contraction(1.0, 4.0 / 3.0, 1.0, 0.25).unwrap();
        let dist = LevelDistribution::nu_dependent(TailSum::new(nu), 4).unwrap();
        for u in [0.999_999_999_999_99, 1.0 - 1e-16] {
            let l = dist.sample(u);
            assert!(dist.pmf(l) > 0.0, "u = {u} gave level {l} with zero mass");
        }
    }

    #[test]
    fn nu_dependent_rejects_underflowed_tail() {
        let nu = DecayEnvelope::from_contraction(1.0, 4.0 / 3.0, 1.0, 0.25).unwrap();
        assert!(LevelDistribution::nu_dependent(TailSum::new(nu), 1 << 20).is_err());
    }

    #[test]
    fn sample_histogram_matches_pmf() {
        let dist = exp_half();
        let mut stream = Stream::from_seed(2024);
        let n = 1_000_000usize;
        let mut counts = [0u64; 11];
        for _ in 0..n {
            let l = dist.sample_with(&mut stream);
            if (l as usize) < counts.len() {
                counts[l as usize] += 1;
            }
        }
        for l in 0..=10u32 {
            let p = dist.pmf(l);
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let observed = counts[l as usize] as f64 / n as f64;
            assert!(
                (observed - p).abs() <= 4.0 * sigma + 1e-9,
                "level {l}: observed {observed}, expected {p}"
            );
        }
    }

    #[test]
    fn frequency_from_tail_ratio() {
        let eta = 0.25f64;
        let nu = DecayEnvelope::from_contraction(1.0, 1.0 / (1.0 - eta), 1.0, eta).unwrap();
        let tail = TailSum::new(nu);
        assert_eq!(frequency_nu_dependent(&tail, 0).unwrap(), 1.0);
        assert_eq!(frequency_nu_dependent(&tail, 1).unwrap(), 1.0);
        let brute = |j: u64| -> f64 {
            (j..j + 300)
                .map(|i| (0.25f64.powi(i as i32) / (1.0 - eta) / (i as f64 + 1.0)).sqrt())
                .sum()
        };
        let q = frequency_nu_dependent(&tail, 20).unwrap();
        let expected = brute(10) / brute(0);
        assert!((q - expected).abs() < 1e-8 * expected);
    }

    #[test]
    fn fixed_level_is_degenerate() {
        let dist = LevelDistribution::fixed_level(3);
        assert_eq!(dist.pmf(3), 1.0);
        assert_eq!(dist.pmf(2), 0.0);
        assert_eq!(dist.sample(0.7), 3);
        assert_eq!(dist.doubling_mass(), 8.0);
        // Unit doubling mass pins the frequency at 1/3.
        let unit = LevelDistribution::fixed_level(0);
        assert_eq!(frequency_experimental(&unit), 1.0 / 3.0);
    }
}
