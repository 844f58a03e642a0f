//! Approximate models: uniform fringes, Gaussian envelope, the equatorial
//! branch and the general-`k` coherent-state picture.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

use super::{coherent_moments, Axis, ModelKind, MomentSet, Precision, SensitivityPoint};
use crate::numeric::snapped_sin_cos;
use crate::spin_model::Spin;

/// Splits `phi` into `q pi + rest` with `rest` in `[-pi/2, pi/2]`.
fn fold_phase(phi: f64) -> (i64, f64) {
    let q = (phi / PI).round();
    (q as i64, phi - q * PI)
}

/// `(-1)^(q (2J - 1))`: the sign picked up by odd moments under `phi -> phi + q pi`.
fn fold_sign(spin: Spin, q: i64) -> f64 {
    if q.rem_euclid(2) == 1 && (spin.two_j() - 1) % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Output of the uniform-fringe model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FringeResult {
    pub moments: MomentSet,
    pub delta_phi_x: Precision,
    pub delta_phi_y: Precision,
    /// Fringe phase `2 J phi cos(beta)` after folding `phi` into the central period.
    pub psi: f64,
    /// `sqrt(J) |phi| |sin(beta)| < 1` (with `phi` folded).
    pub valid: bool,
}

/// Uniform-fringe model: a coherent state precessing at rate `2 J cos(beta)`.
pub fn fringe_model(spin: Spin, beta: f64, phi: f64) -> FringeResult {
    let j = spin.j();
    let (sb, cb) = snapped_sin_cos(beta);
    let (q, rest) = fold_phase(phi);
    let sign = fold_sign(spin, q);
    let psi = 2.0 * j * rest * cb;
    let (sp, cp) = psi.sin_cos();

    let mut moments = coherent_moments(spin, [sb * cp, sb * sp, cb], ModelKind::Fringe);
    moments.jx *= sign;
    moments.jy *= sign;
    moments.jzjx_sym *= sign;
    moments.jzjy_sym *= sign;

    let rate = 2.0 * j * cb;
    let slope_x = -j * sb * sp * rate;
    let slope_y = j * sb * cp * rate;
    let noise_x = (j / 2.0 * (1.0 - sb * sb * cp * cp)).max(0.0).sqrt();
    let noise_y = (j / 2.0 * (1.0 - sb * sb * sp * sp)).max(0.0).sqrt();

    FringeResult {
        moments,
        delta_phi_x: Precision::from_ratio(noise_x, slope_x),
        delta_phi_y: Precision::from_ratio(noise_y, slope_y),
        psi,
        valid: j.sqrt() * rest.abs() * sb.abs() < 1.0,
    }
}

/// Gaussian-envelope generators `(<J+>, <J+^2>, (1/2)<J_z J+ + J+ J_z>)` and
/// `d<J+>/dphi`, with `phi` folded into the central period.
fn gaussian_generators(spin: Spin, beta: f64, phi: f64) -> [Complex64; 4] {
    let j = spin.j();
    let (sb, cb) = snapped_sin_cos(beta);
    let (q, rest) = fold_phase(phi);
    let sign = fold_sign(spin, q);
    let s2 = sb * sb;

    let single = Complex64::from_polar((-j * rest * rest * s2).exp(), 2.0 * j * rest * cb);
    let double = Complex64::from_polar((-4.0 * j * rest * rest * s2).exp(), 4.0 * j * rest * cb);

    let j_plus = single * (j * sb * sign);
    let d_j_plus = j_plus * Complex64::new(-2.0 * j * rest * s2, 2.0 * j * cb);
    let (j_plus_sq, jz_jplus) = if spin.two_j() >= 2 {
        let pair = j * (2.0 * j - 1.0) / 2.0;
        let (sp, cp) = rest.sin_cos();
        let tilt = Complex64::new(cp * cb, sp);
        (double * (pair * s2), tilt * single * (pair * sb * sign))
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    };
    [j_plus, j_plus_sq, jz_jplus, d_j_plus]
}

/// Moments with the exact power factors replaced by a Gaussian envelope times
/// a uniformly rotating phase.
pub fn gaussian_envelope_moments(spin: Spin, beta: f64, phi: f64) -> MomentSet {
    let j = spin.j();
    let (sb, cb) = snapped_sin_cos(beta);
    let [j_plus, j_plus_sq, jz_jplus, _] = gaussian_generators(spin, beta, phi);
    let equatorial = j + j * (2.0 * j - 1.0) * sb * sb / 2.0;
    MomentSet {
        jx: j_plus.re,
        jy: j_plus.im,
        jz: j * cb,
        jx2: equatorial / 2.0 + j_plus_sq.re / 2.0,
        jy2: equatorial / 2.0 - j_plus_sq.re / 2.0,
        jz2: j * j * cb * cb + j * sb * sb / 2.0,
        jxjy_sym: j_plus_sq.im / 2.0,
        jzjx_sym: jz_jplus.re,
        jzjy_sym: jz_jplus.im,
        provenance: ModelKind::Gaussian,
    }
}

/// Sensitivity from the Gaussian-envelope moments and their analytic slope.
pub fn sensitivity_gaussian(spin: Spin, beta: f64, phi: f64, axis: Axis) -> SensitivityPoint {
    let moments = gaussian_envelope_moments(spin, beta, phi);
    let d = gaussian_generators(spin, beta, phi)[3];
    let slope = match axis {
        Axis::X => d.re,
        Axis::Y => d.im,
    };
    SensitivityPoint::new(
        phi,
        axis,
        slope,
        moments.variance(axis).sqrt(),
        1,
        ModelKind::Gaussian,
    )
}

/// One fringe trough.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub q: i64,
    pub s: i64,
    pub phi: f64,
    /// Fringe-model sensitivity at this point.
    pub delta_phi: Precision,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatingPoints {
    pub points: Vec<OperatingPoint>,
    /// Set when `cos(beta) = 0`: there are no fringes, use [`equator_sensitivity`].
    pub equator_referral: bool,
}

/// Fringe troughs `q pi + (s + 1/2) pi / (2 J cos beta)` for `J_x` and
/// `q pi + s pi / (2 J cos beta)` for `J_y`, sorted by phase.
pub fn operating_points(
    spin: Spin,
    beta: f64,
    axis: Axis,
    q_range: RangeInclusive<i64>,
    s_range: RangeInclusive<i64>,
) -> OperatingPoints {
    let (_, cb) = snapped_sin_cos(beta);
    if cb == 0.0 {
        return OperatingPoints {
            points: Vec::new(),
            equator_referral: true,
        };
    }
    let spacing = PI / (2.0 * spin.j() * cb);
    let offset = match axis {
        Axis::X => 0.5,
        Axis::Y => 0.0,
    };
    let mut points = Vec::new();
    for q in q_range {
        for s in s_range.clone() {
            let phi = q as f64 * PI + (s as f64 + offset) * spacing;
            let fringe = fringe_model(spin, beta, phi);
            let delta_phi = match axis {
                Axis::X => fringe.delta_phi_x,
                Axis::Y => fringe.delta_phi_y,
            };
            points.push(OperatingPoint {
                q,
                s,
                phi,
                delta_phi,
            });
        }
    }
    points.sort_by(|a, b| a.phi.total_cmp(&b.phi));
    OperatingPoints {
        points,
        equator_referral: false,
    }
}

/// Small-`phi` model of a `J_x` measurement on the equator (`beta = pi/2`),
/// where there are no fringes. `delta_phi = 1/sqrt(J (2J - 1))` for `phi != 0`.
pub fn equator_sensitivity(spin: Spin, phi: f64) -> SensitivityPoint {
    let j = spin.j();
    let pair = j * (2.0 * j - 1.0);
    let slope = -pair * phi;
    let noise = (pair * phi * phi).sqrt();
    SensitivityPoint::new(phi, Axis::X, slope, noise, 1, ModelKind::Equator)
}

/// `<J_x>` in the equatorial small-`phi` model and whether `sqrt(J)|phi| < 1`.
pub fn equator_mean(spin: Spin, phi: f64) -> (f64, bool) {
    let j = spin.j();
    (
        j - j * (2.0 * j - 1.0) * phi * phi / 2.0,
        j.sqrt() * phi.abs() < 1.0,
    )
}

/// Coherent-state picture for `H = gamma J_z^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralKModel {
    /// Angular velocity in units of `gamma`: `k (J cos beta)^(k-1)`.
    pub rotation_rate_multiplier: f64,
    /// `pi / multiplier`; `None` when the rate vanishes.
    pub fringe_width: Option<f64>,
    /// `(J cos beta)^(k-2) |phi| sqrt(J) |sin beta| < 1`.
    pub valid: bool,
    /// Zero rotation rate (`cos beta = 0` with `k >= 2`).
    pub degenerate: bool,
    pub moments: MomentSet,
}

pub fn general_k_model(spin: Spin, beta: f64, k: u32, phi: f64) -> GeneralKModel {
    let j = spin.j();
    let (sb, cb) = snapped_sin_cos(beta);
    let jc = j * cb;
    let multiplier = if k == 1 {
        1.0
    } else {
        k as f64 * jc.powi(k as i32 - 1)
    };
    let degenerate = multiplier == 0.0;
    let fringe_width = (!degenerate).then(|| PI / multiplier.abs());
    let envelope = jc.abs().powi(k as i32 - 2) * phi.abs() * j.sqrt() * sb.abs();
    let alpha = phi * multiplier;
    let (sa, ca) = alpha.sin_cos();
    GeneralKModel {
        rotation_rate_multiplier: multiplier,
        fringe_width,
        valid: envelope < 1.0,
        degenerate,
        moments: coherent_moments(spin, [sb * ca, sb * sa, cb], ModelKind::CoherentK),
    }
}
