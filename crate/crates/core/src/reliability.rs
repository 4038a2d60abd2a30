//! Scenario treatment of the end-of-life chance constraint.
//!
//! Each unit's degradation threshold is Normal(mu, sigma) truncated below at
//! [`TRUNCATION_FLOOR`]. Requiring `s_j(t) <= S_j^k` for `K` sampled
//! thresholds is the same as requiring `s_j(t) <= floor(min_k S_j^k)`
//! because states are integers; that bound is the unit's effective
//! threshold.
//!
//! # Random streams
//!
//! All draws come from ChaCha20 (`rand_chacha`), seeded with
//! `SeedableRng::seed_from_u64`. A uniform variate is
//! `((next_u64 >> 11) + 0.5) * 2^-53`, always inside (0, 1); a standard
//! normal is [`normal::inverse_cdf`] of that uniform. Draws below the floor
//! are rejected and redrawn from the same stream.
//!
//! - Scenario samples of unit `j` use seed `seed`, stream `j`, in order
//!   `k = 1..K`, so raising `K` only appends samples.
//! - Monte Carlo trial `m` uses seed `seed + m` (wrapping), stream
//!   `u64::MAX`, one draw per unit in unit order.

use alloc::vec::Vec;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::model::{MaintenanceSchedule, UnitFleet};
use crate::normal;
use crate::{Error, Result};

/// Thresholds at or below this value are redrawn.
pub const TRUNCATION_FLOOR: f64 = 1.0 + 1e-6;
/// Smallest acceptance probability of the truncation before sampling is
/// refused.
pub const MIN_ACCEPTANCE: f64 = 1e-6;
const MONTE_CARLO_STREAM: u64 = u64::MAX;
const MAX_REJECTIONS: usize = 100_000_000;

/// Sampled thresholds, unit-major (`samples[j][k]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    pub samples: Vec<Vec<f64>>,
    pub seed: u64,
    pub effective: Vec<u32>,
}

impl ScenarioSet {
    pub fn k(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }
}

/// Source of truncated-normal thresholds with the documented stream layout.
pub struct ThresholdSampler {
    rng: ChaCha20Rng,
}

impl ThresholdSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform variate in the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        normal::inverse_cdf(self.uniform())
    }

    /// Normal(mu, sigma) draw conditioned on exceeding [`TRUNCATION_FLOOR`].
    pub fn threshold(&mut self, unit: usize, mu: f64, sigma: f64) -> Result<f64> {
        if sigma == 0.0 {
            if mu > TRUNCATION_FLOOR {
                return Ok(mu);
            }
            return Err(Error::AcceptanceTooLow { unit, probability: 0.0 });
        }
        for _ in 0..MAX_REJECTIONS {
            let x = mu + sigma * self.standard_normal();
            if x > TRUNCATION_FLOOR {
                return Ok(x);
            }
        }
        Err(Error::AcceptanceTooLow { unit, probability: acceptance(mu, sigma) })
    }
}

fn acceptance(mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return if mu > TRUNCATION_FLOOR { 1.0 } else { 0.0 };
    }
    1.0 - normal::cdf((TRUNCATION_FLOOR - mu) / sigma)
}

fn check_acceptance(fleet: &UnitFleet) -> Result<()> {
    for j in 0..fleet.j_count() {
        let probability = acceptance(fleet.mu()[j], fleet.sigma()[j]);
        if probability < MIN_ACCEPTANCE {
            return Err(Error::AcceptanceTooLow { unit: j, probability });
        }
    }
    Ok(())
}

/// `floor(min)` of a unit's samples.
pub fn effective_threshold(samples: &[f64]) -> u32 {
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    libm::floor(min) as u32
}

/// Draws `k` threshold scenarios per unit and reduces them to effective
/// thresholds.
pub fn sample_scenarios(fleet: &UnitFleet, k: usize, seed: u64) -> Result<ScenarioSet> {
    if k == 0 {
        return Err(Error::validation("k_scenarios", None, "must be positive"));
    }
    check_acceptance(fleet)?;
    let mut samples = Vec::with_capacity(fleet.j_count());
    for j in 0..fleet.j_count() {
        let mut sampler = ThresholdSampler::new(seed, j as u64);
        let row = (0..k)
            .map(|_| sampler.threshold(j, fleet.mu()[j], fleet.sigma()[j]))
            .collect::<Result<Vec<f64>>>()?;
        samples.push(row);
    }
    let effective = samples.iter().map(|row| effective_threshold(row)).collect();
    Ok(ScenarioSet { samples, seed, effective })
}

/// Scenario count `ceil((2 / alpha) (ln(1 / beta) + d))` that makes the
/// sampled constraints an `alpha`-level solution with confidence
/// `1 - beta` for a problem with `d` decision variables.
pub fn scenario_count_hint(alpha: f64, beta: f64, decision_dims: usize) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { what: "alpha", value: alpha });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain { what: "beta", value: beta });
    }
    let raw = (2.0 / alpha) * (-libm::log(beta) + decision_dims as f64);
    // Absorb rounding noise so exact integers are not pushed up by one.
    let nearest = libm::round(raw);
    let k = if (raw - nearest).abs() <= 1e-12 * raw.max(1.0) { nearest } else { libm::ceil(raw) };
    Ok(k as usize)
}

/// Fraction of `m_trials` fresh threshold draws under which `schedule`
/// lets some unit exceed its threshold within the horizon.
pub fn empirical_violation_rate(
    schedule: &MaintenanceSchedule,
    fleet: &UnitFleet,
    m_trials: usize,
    seed: u64,
) -> Result<f64> {
    if schedule.j_count() != fleet.j_count() {
        return Err(Error::DimensionMismatch {
            what: "schedule units",
            expected: fleet.j_count(),
            found: schedule.j_count(),
        });
    }
    if m_trials == 0 {
        return Ok(0.0);
    }
    check_acceptance(fleet)?;
    let peaks: Vec<f64> = (0..fleet.j_count()).map(|j| schedule.peak_state(j) as f64).collect();
    let mut failures = 0usize;
    for trial in 0..m_trials {
        let mut sampler = ThresholdSampler::new(seed.wrapping_add(trial as u64), MONTE_CARLO_STREAM);
        let mut failed = false;
        for (j, &peak) in peaks.iter().enumerate() {
            // Draw every unit so the stream layout does not depend on outcomes.
            let threshold = sampler.threshold(j, fleet.mu()[j], fleet.sigma()[j])?;
            failed |= peak > threshold;
        }
        failures += usize::from(failed);
    }
    Ok(failures as f64 / m_trials as f64)
}
