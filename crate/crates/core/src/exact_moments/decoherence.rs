//! Independent single-constituent dephasing, applied at the level of moments.
//!
//! Each constituent's transverse Pauli operators decay as `e^{-Gamma t}`, so
//! first transverse moments shrink by `e^{-Gamma t}`, pair correlations by
//! `e^{-2 Gamma t}`, and the single-constituent part of `J_x^2`, `J_y^2`
//! (which is `J/2`) is untouched.

use rayon::prelude::*;
use serde::Serialize;

use super::{moments_exact, slope_exact, Axis, MomentSet, Precision};
use crate::numeric::snapped_sin_cos;
use crate::spin_model::Spin;
use crate::{Error, Result};

/// Dephasing rate and total time budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceSpec {
    pub gamma_rate: f64,
    pub total_time: f64,
}

impl DecoherenceSpec {
    pub fn new(gamma_rate: f64, total_time: f64) -> Result<Self> {
        if gamma_rate < 0.0 {
            return Err(Error::NegativeRate(gamma_rate));
        }
        if !gamma_rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "dephasing rate {gamma_rate} is not finite"
            )));
        }
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "total time {total_time} must be positive"
            )));
        }
        Ok(DecoherenceSpec {
            gamma_rate,
            total_time,
        })
    }

    /// Builds the spec from the dephasing time `tau2 = 1/Gamma`.
    pub fn from_tau2(tau2: f64, total_time: f64) -> Result<Self> {
        if !(tau2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau2 = {tau2} must be positive"
            )));
        }
        DecoherenceSpec::new(1.0 / tau2, total_time)
    }

    /// `1/Gamma`; infinite without dephasing.
    pub fn tau2(&self) -> f64 {
        1.0 / self.gamma_rate
    }
}

/// Applies dephasing of strength `gamma_t = Gamma t` to a moment set.
pub fn dephase_moments(spin: Spin, moments: &MomentSet, gamma_t: f64) -> Result<MomentSet> {
    if gamma_t < 0.0 {
        return Err(Error::NegativeRate(gamma_t));
    }
    let e1 = (-gamma_t).exp();
    let e2 = (-2.0 * gamma_t).exp();
    let floor = spin.j() / 2.0 * -(-2.0 * gamma_t).exp_m1();
    Ok(MomentSet {
        jx: moments.jx * e1,
        jy: moments.jy * e1,
        jx2: moments.jx2 * e2 + floor,
        jy2: moments.jy2 * e2 + floor,
        jxjy_sym: moments.jxjy_sym * e2,
        jzjx_sym: moments.jzjx_sym * e1,
        jzjy_sym: moments.jzjy_sym * e1,
        ..*moments
    })
}

/// Exact dephased single-shot sensitivity `delta_phi` at any operating phase.
///
/// Returns `(delta_phi, slope, noise)` with the slope and noise of the
/// dephased measurement.
pub fn decohered_sensitivity_at(
    spin: Spin,
    beta: f64,
    phi: f64,
    axis: Axis,
    gamma_t: f64,
) -> Result<(Precision, f64, f64)> {
    let dephased = dephase_moments(spin, &moments_exact(spin, beta, phi), gamma_t)?;
    let slope = slope_exact(spin, beta, phi, axis) * (-gamma_t).exp();
    let noise = dephased.variance(axis).sqrt();
    Ok((Precision::from_ratio(noise, slope), slope, noise))
}

/// Dephased sensitivity for a `J_y` measurement at the fringe center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceResult {
    /// `delta gamma` with dephasing, at the requested `t` and `nu`.
    pub delta_gamma: Precision,
    /// The same without dephasing.
    pub delta_gamma_free: Precision,
    /// `tau2 / 2` when the total time is shared as `nu = T/t`; `None` when `Gamma = 0`.
    pub optimal_t: Option<f64>,
    /// `sqrt(e / (T tau2)) / (J^{3/2} |sin 2 beta|)`; `None` when `Gamma = 0`
    /// or `sin 2 beta = 0`.
    pub delta_gamma_optimal: Option<f64>,
}

/// `delta gamma_Gamma` at `phi = 0`, axis `y`, from exact moments:
/// `delta gamma^2 (1 + J (e^{2 Gamma t} - 1) / (2 Var_0))`.
pub fn decohered_sensitivity(
    spin: Spin,
    beta: f64,
    spec: &DecoherenceSpec,
    t: f64,
    nu: f64,
) -> Result<DecoherenceResult> {
    if !(t > 0.0) || !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need t > 0 and nu > 0, got t = {t}, nu = {nu}"
        )));
    }
    let j = spin.j();
    let moments = moments_exact(spin, beta, 0.0);
    let variance = moments.variance(Axis::Y);
    let slope = slope_exact(spin, beta, 0.0, Axis::Y);
    let free = Precision::from_ratio(variance.sqrt(), slope).scaled(1.0 / (t * nu.sqrt()));
    let gamma_t = spec.gamma_rate * t;
    let penalty = 1.0 + j * (2.0 * gamma_t).exp_m1() / (2.0 * variance);
    let delta_gamma = if variance > 0.0 {
        free.scaled(penalty.sqrt())
    } else {
        Precision::NoInformation
    };

    let (sb, cb) = snapped_sin_cos(beta);
    let sin_2beta = (2.0 * sb * cb).abs();
    let (optimal_t, delta_gamma_optimal) = if spec.gamma_rate > 0.0 {
        let tau2 = spec.tau2();
        let closed = (sin_2beta > 0.0).then(|| {
            (std::f64::consts::E / (spec.total_time * tau2)).sqrt() / (j.powf(1.5) * sin_2beta)
        });
        (Some(tau2 / 2.0), closed)
    } else {
        (None, None)
    };
    Ok(DecoherenceResult {
        delta_gamma,
        delta_gamma_free: free,
        optimal_t,
        delta_gamma_optimal,
    })
}

/// A scan of `delta gamma_Gamma` over the per-shot time `t` at fixed total time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DephasingScan {
    pub rows: Vec<(f64, Precision)>,
    pub argmin_t: Option<f64>,
    pub min_delta_gamma: Option<f64>,
}

/// Evaluates [`decohered_sensitivity`] with `nu = T/t` for each `t`.
pub fn scan_dephasing_time(
    spin: Spin,
    beta: f64,
    spec: &DecoherenceSpec,
    times: &[f64],
) -> Result<DephasingScan> {
    let rows = times
        .par_iter()
        .map(|&t| {
            decohered_sensitivity(spin, beta, spec, t, spec.total_time / t)
                .map(|r| (t, r.delta_gamma))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = rows
        .iter()
        .filter_map(|&(t, d)| d.value().map(|v| (t, v)))
        .fold(None, |acc: Option<(f64, f64)>, (t, v)| match acc {
            Some((_, bv)) if bv <= v => acc,
            _ => Some((t, v)),
        });
    Ok(DephasingScan {
        rows,
        argmin_t: best.map(|b| b.0),
        min_delta_gamma: best.map(|b| b.1),
    })
}
