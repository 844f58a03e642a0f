//! Single-shot measurement outcomes of `J_x` or `J_y`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::exact_moments::{dephase_moments, moments_exact, Axis};
use crate::oracle::{evolve, measurement_distribution, EXACT_ROTATION_MAX_TWO_J};
use crate::spin_model::{CoherentPreparation, Spin};
use crate::{Error, Result};

/// How outcomes are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// From the exact outcome distribution of the evolved state.
    Exact,
    /// From a normal with the exact mean and variance, rounded to a valid `m`.
    Gaussian,
    /// Exact when `2J <= 512` and there is no dephasing, Gaussian otherwise.
    #[default]
    Auto,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(SamplingMode::Exact),
            "gaussian" => Ok(SamplingMode::Gaussian),
            "auto" => Ok(SamplingMode::Auto),
            other => Err(Error::InvalidParameter(format!(
                "unknown sampling mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Exact { cdf: Vec<f64> },
    Gaussian { normal: Normal<f64> },
}

/// Precomputed sampler for one `(J, beta, phi, axis, Gamma t)` configuration.
#[derive(Debug, Clone)]
pub struct MeasurementSampler {
    spin: Spin,
    kind: Kind,
    mean: f64,
    variance: f64,
    /// Set when the Gaussian comes within `5 sigma` of `|m| = J`.
    pub clamping_risk: bool,
}

impl MeasurementSampler {
    pub fn new(
        spin: Spin,
        beta: f64,
        phi: f64,
        axis: Axis,
        gamma_t: f64,
        mode: SamplingMode,
    ) -> Result<Self> {
        if gamma_t < 0.0 {
            return Err(Error::NegativeRate(gamma_t));
        }
        let exact_affordable = spin.two_j() <= EXACT_ROTATION_MAX_TWO_J;
        let use_exact = match mode {
            SamplingMode::Exact => {
                if gamma_t > 0.0 {
                    return Err(Error::InvalidParameter(
                        "exact sampling has no dephased state; use gaussian sampling".into(),
                    ));
                }
                if !exact_affordable {
                    return Err(Error::BudgetExceeded {
                        needed: spin.two_j() as f64,
                        budget: EXACT_ROTATION_MAX_TWO_J as f64,
                    });
                }
                true
            }
            SamplingMode::Gaussian => false,
            SamplingMode::Auto => exact_affordable && gamma_t == 0.0,
        };
        let moments = dephase_moments(spin, &moments_exact(spin, beta, phi), gamma_t)?;
        let (mean, variance) = (moments.mean(axis), moments.variance(axis));
        let j = spin.j();

        if use_exact {
            let state = evolve(&CoherentPreparation::new(spin, beta)?, phi, 2)?;
            let probs = measurement_distribution(&state, axis.into())?;
            let mut acc = 0.0;
            let mut cdf: Vec<f64> = probs
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect();
            let total = acc;
            cdf.iter_mut().for_each(|c| *c /= total);
            return Ok(MeasurementSampler {
                spin,
                kind: Kind::Exact { cdf },
                mean,
                variance,
                clamping_risk: false,
            });
        }

        let sd = variance.sqrt();
        let normal = Normal::new(mean, sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let clamping_risk = mean.abs() + 5.0 * sd > j;
        Ok(MeasurementSampler {
            spin,
            kind: Kind::Gaussian { normal },
            mean,
            variance,
            clamping_risk,
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.kind, Kind::Exact { .. })
    }

    /// Mean and variance of the modelled measurement.
    pub fn moments(&self) -> (f64, f64) {
        (self.mean, self.variance)
    }

    /// Draws one outcome `m`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let j = self.spin.j();
        match &self.kind {
            Kind::Exact { cdf } => {
                let u: f64 = rng.random();
                let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                self.spin.m(idx)
            }
            Kind::Gaussian { normal } => {
                let x = normal.sample(rng);
                ((x + j).round() - j).clamp(-j, j)
            }
        }
    }
}

/// Draws a single outcome; prefer [`MeasurementSampler`] for repeated draws.
pub fn sample_measurement<R: Rng + ?Sized>(
    spin: Spin,
    beta: f64,
    phi: f64,
    axis: Axis,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<f64> {
    Ok(MeasurementSampler::new(spin, beta, phi, axis, 0.0, mode)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn stats(sampler: &MeasurementSampler, count: usize, seed: u64) -> (f64, f64) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let xs: Vec<f64> = (0..count).map(|_| sampler.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / count as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        (mean, var)
    }

    #[test]
    fn spin_half_y_is_unbiased() {
        let s = MeasurementSampler::new(
            Spin::from_two_j(1).unwrap(),
            FRAC_PI_2,
            0.0,
            Axis::Y,
            0.0,
            SamplingMode::Auto,
        )
        .unwrap();
        assert!(s.is_exact());
        let (mean, _) = stats(&s, 100_000, 1);
        assert!(mean.abs() < 3.0 * 0.5 / (100_000f64).sqrt());
    }

    #[test]
    fn gaussian_mean_near_closed_form() {
        let spin = Spin::from_j(200.0).unwrap();
        let s =
            MeasurementSampler::new(spin, FRAC_PI_4, 1e-4, Axis::Y, 0.0, SamplingMode::Gaussian)
                .unwrap();
        let (expect, var) = s.moments();
        assert!((expect - 3.9895).abs() < 1e-3);
        let (mean, _) = stats(&s, 100_000, 2);
        assert!((mean - expect).abs() < 3.0 * (var / 1e5).sqrt());
    }

    #[test]
    fn exact_and_gaussian_agree() {
        let spin = Spin::from_j(100.0).unwrap();
        let e = MeasurementSampler::new(spin, FRAC_PI_4, 2e-3, Axis::Y, 0.0, SamplingMode::Exact)
            .unwrap();
        let g =
            MeasurementSampler::new(spin, FRAC_PI_4, 2e-3, Axis::Y, 0.0, SamplingMode::Gaussian)
                .unwrap();
        let (me, ve) = stats(&e, 100_000, 3);
        let (mg, vg) = stats(&g, 100_000, 4);
        assert!((me - mg).abs() < 3.0 * ((ve + vg) / 1e5).sqrt());
    }

    #[test]
    fn exact_mode_rejects_dephasing_and_large_spins() {
        let spin = Spin::from_j(10.0).unwrap();
        assert!(
            MeasurementSampler::new(spin, 0.5, 0.0, Axis::Y, 0.1, SamplingMode::Exact).is_err()
        );
        let big = Spin::from_j(300.0).unwrap();
        assert!(MeasurementSampler::new(big, 0.5, 0.0, Axis::Y, 0.0, SamplingMode::Exact).is_err());
        assert!(
            !MeasurementSampler::new(big, 0.5, 0.0, Axis::Y, 0.0, SamplingMode::Auto)
                .unwrap()
                .is_exact()
        );
    }

    #[test]
    fn outcomes_are_valid_projections() {
        let spin = Spin::from_two_j(7).unwrap();
        let g =
            MeasurementSampler::new(spin, 1.2, 0.3, Axis::X, 0.0, SamplingMode::Gaussian).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let m = g.sample(&mut rng);
            assert!(m.abs() <= 3.5 && (m + 3.5).fract() == 0.0);
        }
    }
}
