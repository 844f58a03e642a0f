//! Closed-form moments and sensitivities for `H = gamma J_z^2` acting on a
//! coherent state tilted by `beta` from the `z` axis.
//!
//! Every first and second moment follows from three complex quantities,
//! `<J+>`, `<J+^2>` and `(1/2)<J_z J+ + J+ J_z>`, each of which is a prefactor
//! times an integer power of `cos(phi) + i sin(phi) cos(beta)` (or its
//! double-angle analogue). Powers are taken in log-polar form so that spins up
//! to `J ~ 1e7` stay accurate.

mod decoherence;
mod fringe;
mod scaling;

pub use decoherence::{
    decohered_sensitivity, decohered_sensitivity_at, dephase_moments, scan_dephasing_time,
    DecoherenceResult, DecoherenceSpec, DephasingScan,
};
pub use fringe::{
    equator_mean, equator_sensitivity, fringe_model, gaussian_envelope_moments, general_k_model,
    operating_points, sensitivity_gaussian, FringeResult, GeneralKModel, OperatingPoint,
    OperatingPoints,
};
pub use scaling::{scaling_exponent, OperatingRule, ScalingResult};

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::numeric::{reduced_phase, snapped_sin_cos};
use crate::spin_model::Spin;

/// Slopes smaller than this carry no usable information.
pub const MIN_SLOPE: f64 = 1e-300;

/// Equatorial measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl std::str::FromStr for Axis {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            other => Err(crate::Error::InvalidParameter(format!(
                "unknown axis {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
        })
    }
}

/// Where a moment set or sensitivity came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Exact,
    Fringe,
    Gaussian,
    ShortTime,
    Equator,
    CoherentK,
    Oracle,
}

/// A sensitivity value, or the explicit statement that the measurement carries
/// no information about the phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precision {
    Finite(f64),
    NoInformation,
}

impl Precision {
    /// `noise / |slope|`, or no information when the slope vanishes.
    pub fn from_ratio(noise: f64, slope: f64) -> Self {
        if !(slope.abs() >= MIN_SLOPE) || !noise.is_finite() {
            Precision::NoInformation
        } else {
            Precision::Finite(noise / slope.abs())
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Precision::Finite(v) => Some(v),
            Precision::NoInformation => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Precision::Finite(_))
    }

    /// Scales a finite value; no information stays no information.
    pub fn scaled(self, factor: f64) -> Self {
        match self {
            Precision::Finite(v) => Precision::Finite(v * factor),
            Precision::NoInformation => Precision::NoInformation,
        }
    }
}

impl Serialize for Precision {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Precision::Finite(v) => s.serialize_f64(*v),
            Precision::NoInformation => s.serialize_str("no-information"),
        }
    }
}

/// First and second moments of the collective spin.
///
/// Cross moments are symmetrized: `jxjy_sym = <J_x J_y + J_y J_x> / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub jx2: f64,
    pub jy2: f64,
    pub jz2: f64,
    pub jxjy_sym: f64,
    pub jzjx_sym: f64,
    pub jzjy_sym: f64,
    pub provenance: ModelKind,
}

impl MomentSet {
    pub fn mean(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.jx,
            Axis::Y => self.jy,
        }
    }

    pub fn second(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.jx2,
            Axis::Y => self.jy2,
        }
    }

    /// Variance along `axis`, clamped at zero against rounding.
    pub fn variance(&self, axis: Axis) -> f64 {
        let m = self.mean(axis);
        (self.second(axis) - m * m).max(0.0)
    }

    /// Named fields in a fixed order, for table output and comparisons.
    pub fn fields(&self) -> [(&'static str, f64); 9] {
        [
            ("jx", self.jx),
            ("jy", self.jy),
            ("jz", self.jz),
            ("jx2", self.jx2),
            ("jy2", self.jy2),
            ("jz2", self.jz2),
            ("jxjy_sym", self.jxjy_sym),
            ("jzjx_sym", self.jzjx_sym),
            ("jzjy_sym", self.jzjy_sym),
        ]
    }
}

/// Moments of a spin-`J` coherent state pointing along the unit vector `n`.
pub fn coherent_moments(spin: Spin, n: [f64; 3], provenance: ModelKind) -> MomentSet {
    let j = spin.j();
    let pair = j * (2.0 * j - 1.0) / 2.0;
    let second = |a: usize, b: usize| pair * n[a] * n[b] + if a == b { j / 2.0 } else { 0.0 };
    MomentSet {
        jx: j * n[0],
        jy: j * n[1],
        jz: j * n[2],
        jx2: second(0, 0),
        jy2: second(1, 1),
        jz2: second(2, 2),
        jxjy_sym: second(0, 1),
        jzjx_sym: second(2, 0),
        jzjy_sym: second(2, 1),
        provenance,
    }
}

/// Sensitivity `delta_phi = noise / (|slope| sqrt(nu))` at one operating phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityPoint {
    pub phi: f64,
    pub axis: Axis,
    pub delta_phi: Precision,
    /// `d<J_axis>/d phi`.
    pub slope: f64,
    /// Standard deviation of a single measurement of `J_axis`.
    pub noise: f64,
    pub nu: u64,
    pub model: ModelKind,
}

impl SensitivityPoint {
    pub fn new(phi: f64, axis: Axis, slope: f64, noise: f64, nu: u64, model: ModelKind) -> Self {
        let delta_phi = Precision::from_ratio(noise, slope).scaled(1.0 / (nu as f64).sqrt());
        SensitivityPoint {
            phi,
            axis,
            delta_phi,
            slope,
            noise,
            nu,
            model,
        }
    }
}

/// Modulus, phase and phase-derivatives of `z = cos(phi) + i sin(phi) cos(beta)`
/// and `Z = cos(2 phi) + i sin(2 phi) cos(beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarFactors {
    pub r: f64,
    pub theta: f64,
    pub big_r: f64,
    pub big_theta: f64,
    pub dr: f64,
    pub dtheta: f64,
    pub dbig_r: f64,
    pub dbig_theta: f64,
    ln_r: f64,
    ln_big_r: f64,
    z: Complex64,
    big_z: Complex64,
}

impl PolarFactors {
    pub fn new(beta: f64, phi: f64) -> Self {
        let (sb, cb) = snapped_sin_cos(beta);
        let (sp, cp) = phi.sin_cos();
        let (s2p, c2p) = (2.0 * phi).sin_cos();
        let sb2 = sb * sb;

        let z = Complex64::new(cp, sp * cb);
        let big_z = Complex64::new(c2p, s2p * cb);
        let (r, ln_r) = modulus_and_log(cp, sp, cb, sb2);
        let (big_r, ln_big_r) = modulus_and_log(c2p, s2p, cb, sb2);
        let theta = z.im.atan2(z.re);
        let big_theta = big_z.im.atan2(big_z.re);

        let dr = if r > 0.0 { -sb2 * sp * cp / r } else { 0.0 };
        let dtheta = if r > 0.0 { cb / (r * r) } else { 0.0 };
        let dbig_r = if big_r > 0.0 {
            -2.0 * sb2 * s2p * c2p / big_r
        } else {
            0.0
        };
        let dbig_theta = if big_r > 0.0 {
            2.0 * cb / (big_r * big_r)
        } else {
            0.0
        };

        PolarFactors {
            r,
            theta,
            big_r,
            big_theta,
            dr,
            dtheta,
            dbig_r,
            dbig_theta,
            ln_r,
            ln_big_r,
            z,
            big_z,
        }
    }

    /// `z^power` for a non-negative integer power.
    pub fn z_pow(&self, power: u64) -> Complex64 {
        polar_pow(self.z, self.r, self.ln_r, self.theta, power)
    }

    /// `Z^power` for a non-negative integer power.
    pub fn big_z_pow(&self, power: u64) -> Complex64 {
        polar_pow(self.big_z, self.big_r, self.ln_big_r, self.big_theta, power)
    }

    /// `d(z^power)/d phi` through the modulus/phase chain rule.
    pub fn z_pow_derivative(&self, power: u64) -> Complex64 {
        if power == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let n = power as f64;
        // d/dphi r^n e^{i n theta} = n e^{i n theta} (r^{n-1} r' + i r^n theta')
        let rn1 = real_pow(self.r, self.ln_r, power - 1);
        let rn = real_pow(self.r, self.ln_r, power);
        let rotation = unit_phase(self.z, self.theta, power);
        rotation * Complex64::new(n * rn1 * self.dr, n * rn * self.dtheta)
    }
}

fn modulus_and_log(c: f64, s: f64, cb: f64, sb2: f64) -> (f64, f64) {
    let r2 = c * c + s * s * cb * cb;
    let ln_r = if r2 > 0.5 {
        0.5 * (-(s * s) * sb2).ln_1p()
    } else {
        0.5 * r2.ln()
    };
    (r2.sqrt(), ln_r)
}

fn real_pow(r: f64, ln_r: f64, power: u64) -> f64 {
    if power == 0 {
        1.0
    } else if r == 0.0 {
        0.0
    } else {
        (power as f64 * ln_r).exp()
    }
}

/// `e^{i n theta}`; exactly real when the base is real.
fn unit_phase(base: Complex64, theta: f64, power: u64) -> Complex64 {
    if base.im == 0.0 {
        let sign = if base.re < 0.0 && power % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        return Complex64::new(sign, 0.0);
    }
    let (s, c) = reduced_phase(power as f64, theta).sin_cos();
    Complex64::new(c, s)
}

fn polar_pow(base: Complex64, r: f64, ln_r: f64, theta: f64, power: u64) -> Complex64 {
    unit_phase(base, theta, power) * real_pow(r, ln_r, power)
}

/// The three complex generators of all moments, plus `<J+>`'s derivative.
struct Generators {
    j_plus: Complex64,
    j_plus_sq: Complex64,
    jz_jplus_sym: Complex64,
    d_j_plus: Complex64,
}

fn generators(spin: Spin, beta: f64, phi: f64) -> Generators {
    let two_j = spin.two_j();
    let j = spin.j();
    let (sb, cb) = snapped_sin_cos(beta);
    let pf = PolarFactors::new(beta, phi);

    let j_plus = pf.z_pow(two_j - 1) * (j * sb);
    let d_j_plus = pf.z_pow_derivative(two_j - 1) * (j * sb);
    let (j_plus_sq, jz_jplus_sym) = if two_j >= 2 {
        let pair = j * (2.0 * j - 1.0) / 2.0;
        let (sp, cp) = phi.sin_cos();
        let tilt = Complex64::new(cp * cb, sp);
        (
            pf.big_z_pow(two_j - 2) * (pair * sb * sb),
            tilt * pf.z_pow(two_j - 2) * (pair * sb),
        )
    } else {
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    };
    Generators {
        j_plus,
        j_plus_sq,
        jz_jplus_sym,
        d_j_plus,
    }
}

/// Exact first and second moments after evolving for phase `phi`.
pub fn moments_exact(spin: Spin, beta: f64, phi: f64) -> MomentSet {
    let j = spin.j();
    let (sb, cb) = snapped_sin_cos(beta);
    let g = generators(spin, beta, phi);
    // (1/2)<J+J- + J-J+>
    let equatorial = j + j * (2.0 * j - 1.0) * sb * sb / 2.0;
    MomentSet {
        jx: g.j_plus.re,
        jy: g.j_plus.im,
        jz: j * cb,
        jx2: equatorial / 2.0 + g.j_plus_sq.re / 2.0,
        jy2: equatorial / 2.0 - g.j_plus_sq.re / 2.0,
        jz2: j * j * cb * cb + j * sb * sb / 2.0,
        jxjy_sym: g.j_plus_sq.im / 2.0,
        jzjx_sym: g.jz_jplus_sym.re,
        jzjy_sym: g.jz_jplus_sym.im,
        provenance: ModelKind::Exact,
    }
}

/// `d<J_axis>/d phi` from the closed form.
pub fn slope_exact(spin: Spin, beta: f64, phi: f64, axis: Axis) -> f64 {
    let g = generators(spin, beta, phi);
    match axis {
        Axis::X => g.d_j_plus.re,
        Axis::Y => g.d_j_plus.im,
    }
}

/// Exact single-shot sensitivity `Delta J_axis / |d<J_axis>/d phi|`.
pub fn sensitivity_exact(spin: Spin, beta: f64, phi: f64, axis: Axis) -> SensitivityPoint {
    let moments = moments_exact(spin, beta, phi);
    let slope = slope_exact(spin, beta, phi, axis);
    let noise = moments.variance(axis).sqrt();
    SensitivityPoint::new(phi, axis, slope, noise, 1, ModelKind::Exact)
}

/// Minimum of the exact `delta_phi` over `[center - half_width, center + half_width]`:
/// a 64-point scan picks the bracket, golden-section search refines it.
/// Returns `(phi, delta_phi)`.
pub fn locate_trough(
    spin: Spin,
    beta: f64,
    axis: Axis,
    center: f64,
    half_width: f64,
) -> Option<(f64, f64)> {
    const SCAN: usize = 64;
    let cost = |phi: f64| {
        sensitivity_exact(spin, beta, phi, axis)
            .delta_phi
            .value()
            .unwrap_or(f64::INFINITY)
    };
    let step = 2.0 * half_width / SCAN as f64;
    let node = |i: usize| center - half_width + i as f64 * step;
    let best = (0..=SCAN)
        .map(|i| (i, cost(node(i))))
        .min_by(|x, y| x.1.total_cmp(&y.1))?
        .0;
    let (mut a, mut b) = (node(best.saturating_sub(1)), node((best + 1).min(SCAN)));

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + center.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = cost(d);
        }
    }
    let phi = 0.5 * (a + b);
    let value = cost(phi);
    value.is_finite().then_some((phi, value))
}
