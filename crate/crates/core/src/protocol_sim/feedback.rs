//! Adaptive bit-by-bit estimation of `phi` with `J_y` measurements.
//!
//! Step `l` uses spin `J_l = (1/(2 nu^{1/3})) (f 2^l / pi)^{2/3}` (rounded to
//! the nearest half-integer) so that its precision `1/(sqrt(nu) sqrt(2) J_l^{3/2})`
//! resolves the `l`-th bit of `phi/2pi` with safety factor `f`. Each step
//! estimates the residual `phi - phi_est` at the center of the central fringe.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

use super::{central_fringe_half_width, stream_rng, MeasurementSampler, SamplingMode};
use crate::exact_moments::{moments_exact, slope_exact, Axis, MIN_SLOPE};
use crate::spin_model::Spin;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConfig {
    /// Safety factor `f`.
    pub f: f64,
    /// Measurements per step.
    pub nu: u64,
    /// Number of bits `L`.
    pub bits: u32,
    pub phi_true: f64,
    pub seed: u64,
    pub beta: f64,
    pub sampling: SamplingMode,
}

impl FeedbackConfig {
    pub fn new(f: f64, nu: u64, bits: u32, phi_true: f64, seed: u64) -> Self {
        FeedbackConfig {
            f,
            nu,
            bits,
            phi_true,
            seed,
            beta: FRAC_PI_4,
            sampling: SamplingMode::Auto,
        }
    }
}

/// Unknown phase for a seeded run: uniform on `[-0.25, 0.25]`, drawn from a
/// stream no feedback step uses.
pub fn random_phase(seed: u64) -> f64 {
    stream_rng(seed, u64::MAX).random_range(-0.25..0.25)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackStep {
    pub l: u32,
    /// Unrounded `J_l`.
    pub j_raw: f64,
    pub two_j: u64,
    /// Analytic `delta_phi` at the fringe center for this step.
    pub delta_phi: Option<f64>,
    /// `phi - phi_est` entering the step.
    pub residual_before: f64,
    /// Estimate of `phi` after the step.
    pub estimate: f64,
    pub residual_after: f64,
    /// `J_l = 1/2` carries no information under `J_z^2`; the step is skipped.
    pub no_information: bool,
    /// Residual exceeded half the central-fringe width.
    pub fringe_edge: bool,
    /// `J_l` was rounded up to the minimum `1/2`.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedbackRecord {
    pub steps: Vec<FeedbackStep>,
    /// `nu * sum 2 J_l` over all steps.
    pub total_n: u64,
    /// `(2 nu f / pi)^{2/3} (2^{2L/3} - 1) / (2^{2/3} - 1)`.
    pub closed_form_n: f64,
    pub final_estimate: f64,
    pub final_error: f64,
    /// `2 pi 2^{-L}`.
    pub target_precision: f64,
    pub success: bool,
    /// Share of `total_n` used by the last step.
    pub last_step_fraction: f64,
}

/// `(J_raw, 2J)` for step `l`, with `2J` clamped to at least 1.
pub fn feedback_spin(f: f64, nu: u64, l: u32) -> (f64, u64, bool) {
    let j_raw = (f * 2f64.powi(l as i32) / PI).powf(2.0 / 3.0) / (2.0 * (nu as f64).cbrt());
    let rounded = (2.0 * j_raw).round();
    if rounded < 1.0 {
        (j_raw, 1, true)
    } else {
        (j_raw, rounded as u64, false)
    }
}

/// Closed-form resource count `N` for `L` bits.
pub fn closed_form_resources(f: f64, nu: u64, bits: u32) -> f64 {
    let ratio = 2f64.powf(2.0 / 3.0);
    (2.0 * nu as f64 * f / PI).powf(2.0 / 3.0) * (2f64.powf(2.0 * bits as f64 / 3.0) - 1.0)
        / (ratio - 1.0)
}

/// Constant overhead `2f / (2^{2/3} - 1)^{3/2}` of the final precision.
pub fn overhead_factor(f: f64) -> f64 {
    2.0 * f / (2f64.powf(2.0 / 3.0) - 1.0).powf(1.5)
}

pub fn adaptive_feedback(config: &FeedbackConfig) -> Result<FeedbackRecord> {
    let FeedbackConfig {
        f,
        nu,
        bits,
        phi_true,
        seed,
        beta,
        sampling,
    } = *config;
    if !(f >= 2.0) || bits == 0 || nu == 0 {
        return Err(Error::InvalidParameter(format!(
            "need f >= 2, L >= 1, nu >= 1; got f = {f}, L = {bits}, nu = {nu}"
        )));
    }
    let mut estimate = 0.0;
    let mut steps = Vec::with_capacity(bits as usize);
    let mut total_n = 0u64;

    for l in 1..=bits {
        let (j_raw, two_j, clamped) = feedback_spin(f, nu, l);
        let spin = Spin::from_two_j(two_j)?;
        total_n += nu * two_j;
        let residual_before = phi_true - estimate;
        let slope = slope_exact(spin, beta, 0.0, Axis::Y);
        let fringe_edge =
            central_fringe_half_width(spin, beta).is_some_and(|h| residual_before.abs() > h);

        if !(slope.abs() >= MIN_SLOPE) {
            steps.push(FeedbackStep {
                l,
                j_raw,
                two_j,
                delta_phi: None,
                residual_before,
                estimate,
                residual_after: residual_before,
                no_information: true,
                fringe_edge,
                clamped,
            });
            continue;
        }

        let center = moments_exact(spin, beta, 0.0);
        let delta_phi = center.variance(Axis::Y).sqrt() / slope.abs() / (nu as f64).sqrt();
        let sampler = MeasurementSampler::new(spin, beta, residual_before, Axis::Y, 0.0, sampling)?;
        let mut rng = stream_rng(seed, l as u64);
        let total: f64 = (0..nu).map(|_| sampler.sample(&mut rng)).sum();
        let mean = total / nu as f64;
        estimate += (mean - center.mean(Axis::Y)) / slope;

        steps.push(FeedbackStep {
            l,
            j_raw,
            two_j,
            delta_phi: Some(delta_phi),
            residual_before,
            estimate,
            residual_after: phi_true - estimate,
            no_information: false,
            fringe_edge,
            clamped,
        });
    }

    let target_precision = 2.0 * PI * 2f64.powi(-(bits as i32));
    let final_error = (estimate - phi_true).abs();
    let last = steps.last().map_or(0, |s| s.two_j * nu);
    Ok(FeedbackRecord {
        steps,
        total_n,
        closed_form_n: closed_form_resources(f, nu, bits),
        final_estimate: estimate,
        final_error,
        target_precision,
        success: final_error <= target_precision,
        last_step_fraction: last as f64 / total_n as f64,
    })
}
