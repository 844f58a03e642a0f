//! The optimal entangled protocol: a superposition of the extreme eigenvectors
//! measured in the `(|max> +- |min>)/sqrt(2)` basis.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use super::stream_rng;
use crate::numeric::pairwise_sum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CatConfig {
    /// Semi-norm `||H|| = Lambda_max - Lambda_min`.
    pub seminorm: f64,
    pub gamma: f64,
    pub t: f64,
    pub nu: u64,
    pub batches: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatOutcome {
    /// Mean of the per-batch estimates.
    pub gamma_est: f64,
    /// RMS error of the per-batch estimates about the true `gamma`.
    pub empirical_delta_gamma: f64,
    /// `1 / (sqrt(nu) t ||H||)`.
    pub analytic_delta_gamma: f64,
    /// `P(+1) = cos^2(||H|| gamma t / 2)`.
    pub p_plus: f64,
    /// `tan^2(||H|| gamma t)`, which must be small compared with `nu`.
    pub tan_squared: f64,
    /// Set when `tan^2(||H|| gamma t) > nu / 10`.
    pub validity_warning: bool,
}

/// Simulates `batches` runs of `nu` two-outcome measurements and inverts
/// `mean(sigma) = cos(||H|| gamma_est t)`.
///
/// The inversion uses the principal branch of `acos`, so the true phase
/// `||H|| gamma t` must lie in `[0, pi]`.
pub fn cat_protocol(config: &CatConfig) -> Result<CatOutcome> {
    let CatConfig {
        seminorm,
        gamma,
        t,
        nu,
        batches,
        seed,
    } = *config;
    if !(seminorm > 0.0) || !(t > 0.0) || nu == 0 || batches == 0 {
        return Err(Error::InvalidParameter(
            "need ||H|| > 0, t > 0, nu >= 1 and batches >= 1".into(),
        ));
    }
    let phase = seminorm * gamma * t;
    let p_plus = (phase / 2.0).cos().powi(2);
    let outcomes = Binomial::new(nu, p_plus).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let estimates: Vec<f64> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let plus = outcomes.sample(&mut stream_rng(seed, b)) as f64;
            let mean = ((2.0 * plus - nu as f64) / nu as f64).clamp(-1.0, 1.0);
            mean.acos() / (seminorm * t)
        })
        .collect();
    let nb = batches as f64;
    let squared: Vec<f64> = estimates.iter().map(|e| (e - gamma).powi(2)).collect();
    let tan_squared = phase.tan().powi(2);
    Ok(CatOutcome {
        gamma_est: pairwise_sum(&estimates) / nb,
        empirical_delta_gamma: (pairwise_sum(&squared) / nb).sqrt(),
        analytic_delta_gamma: 1.0 / ((nu as f64).sqrt() * t * seminorm),
        p_plus,
        tan_squared,
        validity_warning: tan_squared > nu as f64 / 10.0,
    })
}
