//! Monte Carlo simulation of the estimation protocols.
//!
//! Randomness is drawn from ChaCha20 with one stream per batch (or per
//! feedback step), so results depend only on the seed and never on how rayon
//! schedules the batches.

mod cat;
mod feedback;
mod sampler;

pub use cat::{cat_protocol, CatConfig, CatOutcome};
pub use feedback::{
    adaptive_feedback, closed_form_resources, feedback_spin, overhead_factor, random_phase,
    FeedbackConfig, FeedbackRecord, FeedbackStep,
};
pub use sampler::{sample_measurement, MeasurementSampler, SamplingMode};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact_moments::{moments_exact, slope_exact, Axis, MIN_SLOPE};
use crate::numeric::{pairwise_sum, snapped_sin_cos};
use crate::spin_model::Spin;
use crate::{Error, Result};

/// RNG for stream `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One simulated estimation experiment: `batches` independent estimates, each
/// from the mean of `nu` measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub spin: Spin,
    pub beta: f64,
    pub phi_true: f64,
    /// Phase at which the response is linearized.
    pub phi_operating: f64,
    pub axis: Axis,
    pub nu: u64,
    pub batches: u64,
    pub seed: u64,
    /// Dephasing strength `Gamma t`.
    pub gamma_t: f64,
    pub sampling: SamplingMode,
}

impl TrialConfig {
    /// Defaults: operating at `phi = 0`, no dephasing, automatic sampling.
    pub fn new(
        spin: Spin,
        beta: f64,
        phi_true: f64,
        axis: Axis,
        nu: u64,
        batches: u64,
        seed: u64,
    ) -> Self {
        TrialConfig {
            spin,
            beta,
            phi_true,
            phi_operating: 0.0,
            axis,
            nu,
            batches,
            seed,
            gamma_t: 0.0,
            sampling: SamplingMode::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    /// Mean of the per-batch estimates.
    pub phi_est: f64,
    pub batch_estimates: Vec<f64>,
    /// Root-mean-square error of the batch estimates about `phi_true`.
    pub empirical_delta_phi: f64,
    /// Standard error of `empirical_delta_phi` (delta method on the squared errors).
    pub empirical_delta_phi_se: f64,
    /// `noise / (|slope| sqrt(nu))` at the operating point, with dephasing.
    pub analytic_delta_phi: f64,
    /// Pooled mean and unbiased variance of all individual outcomes.
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub slope_used: f64,
    pub exact_sampling: bool,
    pub warnings: Vec<String>,
}

/// Per-batch running statistics (Welford), merged in batch order.
#[derive(Debug, Clone, Copy, Default)]
struct BatchStats {
    count: f64,
    mean: f64,
    m2: f64,
}

impl BatchStats {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: BatchStats) -> BatchStats {
        if self.count == 0.0 {
            return other;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        BatchStats {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

/// Half-width of the central fringe of a `J_x`/`J_y` measurement.
pub fn central_fringe_half_width(spin: Spin, beta: f64) -> Option<f64> {
    let (_, cb) = snapped_sin_cos(beta);
    (cb != 0.0).then(|| std::f64::consts::PI / (4.0 * spin.j() * cb.abs()))
}

/// Runs the scaled-mean estimator: `phi_est = phi_op + (mean - <J>_op) / slope_op`.
pub fn run_estimation(config: &TrialConfig) -> Result<TrialOutcome> {
    let TrialConfig {
        spin,
        beta,
        phi_true,
        phi_operating,
        axis,
        nu,
        batches,
        seed,
        gamma_t,
        sampling,
    } = *config;
    if nu == 0 || batches == 0 {
        return Err(Error::InvalidParameter(
            "nu and batches must be at least 1".into(),
        ));
    }
    if gamma_t < 0.0 {
        return Err(Error::NegativeRate(gamma_t));
    }
    let decay = (-gamma_t).exp();
    let slope = slope_exact(spin, beta, phi_operating, axis) * decay;
    if !(slope.abs() >= MIN_SLOPE) {
        return Err(Error::NoInformation(format!(
            "zero slope of J_{axis} at phi = {phi_operating}, beta = {beta}, J = {spin}"
        )));
    }
    let op_moments = crate::exact_moments::dephase_moments(
        spin,
        &moments_exact(spin, beta, phi_operating),
        gamma_t,
    )?;
    let op_mean = op_moments.mean(axis);
    let analytic = op_moments.variance(axis).sqrt() / slope.abs() / (nu as f64).sqrt();

    let mut warnings = Vec::new();
    if let Some(half) = central_fringe_half_width(spin, beta) {
        if (phi_true - phi_operating).abs() > half {
            warnings.push(format!(
                "phi_true - phi_operating = {:.3e} lies outside the central fringe (half-width {half:.3e})",
                phi_true - phi_operating
            ));
        }
    }

    let sampler = MeasurementSampler::new(spin, beta, phi_true, axis, gamma_t, sampling)?;
    if sampler.clamping_risk {
        warnings.push(
            "gaussian outcomes come within 5 sigma of |m| = J; clamping may bias the mean".into(),
        );
    }

    let per_batch: Vec<BatchStats> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let mut stats = BatchStats::default();
            for _ in 0..nu {
                stats.push(sampler.sample(&mut rng));
            }
            stats
        })
        .collect();

    let batch_estimates: Vec<f64> = per_batch
        .iter()
        .map(|s| phi_operating + (s.mean - op_mean) / slope)
        .collect();
    let squared: Vec<f64> = batch_estimates
        .iter()
        .map(|e| (e - phi_true).powi(2))
        .collect();
    let nb = batches as f64;
    let mse = pairwise_sum(&squared) / nb;
    let rms = mse.sqrt();
    let se = if batches > 1 && rms > 0.0 {
        let var_sq = squared.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (nb - 1.0);
        (var_sq / nb).sqrt() / (2.0 * rms)
    } else {
        0.0
    };
    let pooled = per_batch
        .iter()
        .fold(BatchStats::default(), |acc, s| acc.merge(*s));
    let total = pooled.count;

    Ok(TrialOutcome {
        phi_est: pairwise_sum(&batch_estimates) / nb,
        batch_estimates,
        empirical_delta_phi: rms,
        empirical_delta_phi_se: se,
        analytic_delta_phi: analytic,
        sample_mean: pooled.mean,
        sample_variance: if total > 1.0 {
            pooled.m2 / (total - 1.0)
        } else {
            0.0
        },
        slope_used: slope,
        exact_sampling: sampler.is_exact(),
        warnings,
    })
}
