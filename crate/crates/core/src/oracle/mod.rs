//! Brute-force reference computations in the Dicke basis.
//!
//! Nothing here reuses the closed forms of [`crate::exact_moments`] or the
//! searches of [`crate::bounds`]: states are built amplitude by amplitude,
//! operators are applied through their ladder matrix elements, and eigenvalue
//! extremes are found by enumerating occupation classes.

mod identities;
mod strings;
mod wigner;

pub use identities::{identity_residuals, IDENTITY_MAX_TWO_J};
pub use strings::{product_variance_exact, string_extremes, VARIANCE_MAX_N};
pub use wigner::{
    measurement_distribution, wigner_d_matrix, MeasureAxis, EXACT_ROTATION_MAX_TWO_J,
};

use num_complex::Complex64;

use serde::Serialize;

use crate::exact_moments::{
    moments_exact, sensitivity_exact, Axis, ModelKind, MomentSet, Precision,
};
use crate::numeric::reduced_phase;
use crate::spin_model::{coherent_amplitudes, CoherentPreparation, DickeState, Spin};
use crate::{Error, Result};

/// Largest `2J` the dense evolution accepts.
pub const DENSE_MAX_TWO_J: u64 = 20_000;

/// Ladder matrix elements `J+- |J,m> = Gamma+-_m |J,m+-1>`, indexed by
/// `i = m + J`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderCoefficients {
    pub gamma_plus: Vec<f64>,
    pub gamma_minus: Vec<f64>,
}

impl LadderCoefficients {
    pub fn new(spin: Spin) -> Self {
        let two_j = spin.two_j() as f64;
        let (gamma_plus, gamma_minus) = (0..spin.dim())
            .map(|i| {
                let i = i as f64;
                (
                    ((two_j - i) * (i + 1.0)).sqrt(),
                    (i * (two_j - i + 1.0)).sqrt(),
                )
            })
            .unzip();
        LadderCoefficients {
            gamma_plus,
            gamma_minus,
        }
    }
}

/// `m^k` for a half-integer `m = index - J`.
fn m_power(spin: Spin, index: usize, k: u32) -> f64 {
    spin.m(index).powi(k as i32)
}

/// Evolves a coherent preparation under `phi J_z^k`: `c_m = d_m e^{-i phi m^k}`.
pub fn evolve(prep: &CoherentPreparation, phi: f64, k: u32) -> Result<DickeState> {
    if !prep.is_symmetric() {
        return Err(Error::UnsupportedPhases);
    }
    let spin = prep.spin;
    if spin.two_j() > DENSE_MAX_TWO_J {
        return Err(Error::BudgetExceeded {
            needed: spin.two_j() as f64,
            budget: DENSE_MAX_TWO_J as f64,
        });
    }
    let amplitudes = coherent_amplitudes(spin, prep.beta)
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            let (s, c) = reduced_phase(m_power(spin, i, k), phi).sin_cos();
            Complex64::new(d * c, -d * s)
        })
        .collect();
    DickeState::new(spin, amplitudes)
}

/// `J_z`, `J_x`, `J_y` applied to a state vector.
fn apply_components(spin: Spin, psi: &[Complex64]) -> [Vec<Complex64>; 3] {
    let ladder = LadderCoefficients::new(spin);
    let dim = psi.len();
    let mut jz = vec![Complex64::new(0.0, 0.0); dim];
    let mut up = vec![Complex64::new(0.0, 0.0); dim];
    let mut down = vec![Complex64::new(0.0, 0.0); dim];
    for i in 0..dim {
        jz[i] = psi[i] * spin.m(i);
        if i + 1 < dim {
            up[i + 1] = psi[i] * ladder.gamma_plus[i];
        }
        if i > 0 {
            down[i - 1] = psi[i] * ladder.gamma_minus[i];
        }
    }
    let half_i = Complex64::new(0.0, 0.5);
    let jx: Vec<_> = up.iter().zip(&down).map(|(u, d)| (u + d) * 0.5).collect();
    let jy: Vec<_> = up
        .iter()
        .zip(&down)
        .map(|(u, d)| (u - d) * -half_i)
        .collect();
    [jx, jy, jz]
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// First and second moments by direct operator application.
pub fn collective_moments(state: &DickeState) -> MomentSet {
    let psi = state.amplitudes();
    let [jx, jy, jz] = apply_components(state.spin(), psi);
    let mean = |v: &[Complex64]| inner(psi, v).re;
    let cross = |a: &[Complex64], b: &[Complex64]| inner(a, b).re;
    MomentSet {
        jx: mean(&jx),
        jy: mean(&jy),
        jz: mean(&jz),
        jx2: cross(&jx, &jx),
        jy2: cross(&jy, &jy),
        jz2: cross(&jz, &jz),
        jxjy_sym: cross(&jx, &jy),
        jzjx_sym: cross(&jz, &jx),
        jzjy_sym: cross(&jz, &jy),
        provenance: ModelKind::Oracle,
    }
}

/// `d<J_axis>/d phi` of the evolved state, from `2 Re <d psi | J_axis psi>`
/// with `d psi = -i m^k psi`.
pub fn oracle_slope(prep: &CoherentPreparation, phi: f64, k: u32, axis: Axis) -> Result<f64> {
    let state = evolve(prep, phi, k)?;
    let spin = state.spin();
    let psi = state.amplitudes();
    let d_psi: Vec<Complex64> = psi
        .iter()
        .enumerate()
        .map(|(i, c)| c * Complex64::new(0.0, -m_power(spin, i, k)))
        .collect();
    let [jx, jy, _] = apply_components(spin, psi);
    let applied = match axis {
        Axis::X => jx,
        Axis::Y => jy,
    };
    Ok(2.0 * inner(&d_psi, &applied).re)
}

/// Central finite difference of the oracle mean, with the step scaled by the
/// local fringe frequency `max(1, 2 J |cos beta|)`.
pub fn oracle_slope_fd(
    prep: &CoherentPreparation,
    phi: f64,
    k: u32,
    axis: Axis,
    step: f64,
) -> Result<f64> {
    let freq = (2.0 * prep.spin.j() * prep.beta.cos()).abs().max(1.0);
    let h = step / freq;
    let mean = |p: f64| -> Result<f64> {
        let m = collective_moments(&evolve(prep, p, k)?);
        Ok(match axis {
            Axis::X => m.jx,
            Axis::Y => m.jy,
        })
    };
    Ok((mean(phi + h)? - mean(phi - h)?) / (2.0 * h))
}

/// Worst deviations between the closed forms and the dense simulator for one spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub two_j: u64,
    /// `max |closed - dense| / max(|dense|, 1e-2 J^2)` over all nine moments.
    pub max_moment_deviation: f64,
    /// Same measure on `1/delta_phi = |slope| / noise` for both axes, with the
    /// slope floored at `1e-2 J^2`.
    pub max_sensitivity_deviation: f64,
    /// Points where exactly one route reports no information.
    pub information_mismatches: u32,
}

/// Compares [`moments_exact`] and [`sensitivity_exact`] with [`evolve`] on the
/// grid `beta_i = (i + 1/2) pi / grid`, `phi_j = -pi + (j + 1/2) 2 pi / grid`.
pub fn closed_form_equivalence(spin: Spin, grid: usize) -> Result<EquivalenceReport> {
    use std::f64::consts::PI;
    let scale = spin.j().max(1.0).powi(2);
    let mut report = EquivalenceReport {
        two_j: spin.two_j(),
        max_moment_deviation: 0.0,
        max_sensitivity_deviation: 0.0,
        information_mismatches: 0,
    };
    for i in 0..grid {
        let beta = (i as f64 + 0.5) * PI / grid as f64;
        let prep = CoherentPreparation::new(spin, beta)?;
        for j in 0..grid {
            let phi = -PI + (j as f64 + 0.5) * 2.0 * PI / grid as f64;
            let closed = moments_exact(spin, beta, phi);
            let dense = collective_moments(&evolve(&prep, phi, 2)?);
            for ((_, a), (_, b)) in closed.fields().iter().zip(dense.fields().iter()) {
                let dev = (a - b).abs() / b.abs().max(1e-2 * scale);
                report.max_moment_deviation = report.max_moment_deviation.max(dev);
            }
            for axis in [Axis::X, Axis::Y] {
                let noise = dense.variance(axis).sqrt();
                let dense_sens = Precision::from_ratio(noise, oracle_slope(&prep, phi, 2, axis)?);
                match (
                    sensitivity_exact(spin, beta, phi, axis).delta_phi.value(),
                    dense_sens.value(),
                ) {
                    (Some(a), Some(b)) => {
                        let dev = (1.0 / a - 1.0 / b).abs() / (1.0 / b).max(1e-2 * scale / noise);
                        report.max_sensitivity_deviation =
                            report.max_sensitivity_deviation.max(dev);
                    }
                    (None, None) => {}
                    _ => report.information_mismatches += 1,
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn prep(two_j: u64, beta: f64) -> CoherentPreparation {
        CoherentPreparation::new(Spin::from_two_j(two_j).unwrap(), beta).unwrap()
    }

    #[test]
    fn ladder_invariants() {
        for two_j in [1u64, 2, 7, 30] {
            let l = LadderCoefficients::new(Spin::from_two_j(two_j).unwrap());
            let last = two_j as usize;
            assert_eq!(l.gamma_plus[last], 0.0);
            assert_eq!(l.gamma_minus[0], 0.0);
            for i in 0..last {
                assert_eq!(l.gamma_plus[i], l.gamma_minus[i + 1]);
            }
        }
    }

    #[test]
    fn spin_one_evolved_amplitudes() {
        let phi = 0.37;
        let s = evolve(&prep(2, FRAC_PI_2), phi, 2).unwrap();
        let a = s.amplitudes();
        let edge = Complex64::from_polar(0.5, -phi);
        assert!((a[0] - edge).norm() < 1e-15 && (a[2] - edge).norm() < 1e-15);
        assert!((a[1] - Complex64::new(0.5f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_phase_returns_coherent_amplitudes() {
        let p = prep(9, 1.1);
        let s = evolve(&p, 0.0, 3).unwrap();
        for (c, d) in s.amplitudes().iter().zip(p.amplitudes()) {
            assert_eq!(c.re, d);
            assert_eq!(c.im, 0.0);
        }
    }

    #[test]
    fn spin_half_even_k_is_frozen() {
        for k in [2u32, 4] {
            let a = collective_moments(&evolve(&prep(1, 0.8), 0.0, k).unwrap());
            let b = collective_moments(&evolve(&prep(1, 0.8), 1.7, k).unwrap());
            for ((_, x), (_, y)) in a.fields().iter().zip(b.fields().iter()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn coherent_state_moments() {
        let beta = 0.7;
        let m = collective_moments(&evolve(&prep(30, beta), 0.0, 2).unwrap());
        assert!((m.jx - 15.0 * beta.sin()).abs() < 1e-12);
        assert!((m.jz - 15.0 * beta.cos()).abs() < 1e-12);
    }

    #[test]
    fn spin_one_quarter_phase_moments() {
        let m = collective_moments(&evolve(&prep(2, FRAC_PI_2), FRAC_PI_4, 2).unwrap());
        assert!((m.jx - 0.707_106_78).abs() < 1e-8);
        assert!(m.jy.abs() < 1e-15);
        assert!((m.jx2 - 1.0).abs() < 1e-14);
        assert!((m.jy2 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn casimir_holds() {
        for two_j in [1u64, 6, 45, 300] {
            for k in 1..=3 {
                let m = collective_moments(&evolve(&prep(two_j, 1.3), 0.41, k).unwrap());
                let j = two_j as f64 / 2.0;
                assert!((m.jx2 + m.jy2 + m.jz2 - j * (j + 1.0)).abs() < 1e-10 * j.max(1.0).powi(2));
            }
        }
    }

    #[test]
    fn linear_coupling_precesses_rigidly() {
        let beta = 0.9;
        let phi = 0.6;
        let m = collective_moments(&evolve(&prep(20, beta), phi, 1).unwrap());
        let j = 10.0;
        assert!((m.jx - j * beta.sin() * phi.cos()).abs() < 1e-12);
        assert!((m.jy - j * beta.sin() * phi.sin()).abs() < 1e-12);
    }

    #[test]
    fn analytic_slope_matches_finite_difference() {
        for k in 1..=3u32 {
            let p = prep(16, 0.8);
            for axis in [Axis::X, Axis::Y] {
                let a = oracle_slope(&p, 0.05, k, axis).unwrap();
                let f = oracle_slope_fd(&p, 0.05, k, axis, 1e-6).unwrap();
                assert!(
                    (a - f).abs() < 1e-6 * a.abs().max(1.0),
                    "k={k} {axis}: {a} vs {f}"
                );
            }
        }
    }

    #[test]
    fn phases_and_budget_rejected() {
        let p = prep(4, 0.3).with_phases(vec![0.0, 0.1, 0.0, 0.0]);
        assert_eq!(evolve(&p, 0.1, 2), Err(Error::UnsupportedPhases));
        assert!(matches!(
            evolve(&prep(20_001, 0.3), 0.1, 2),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn equivalence_report_small_spins() {
        for two_j in [1, 2, 7] {
            let r = closed_form_equivalence(Spin::from_two_j(two_j).unwrap(), 6).unwrap();
            assert!(
                r.max_moment_deviation < 1e-12 && r.max_sensitivity_deviation < 1e-12,
                "{r:?}"
            );
            assert_eq!(r.information_mismatches, 0);
        }
    }
}
