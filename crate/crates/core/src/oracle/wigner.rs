//! Reduced Wigner rotation matrices by three-term recursion, and exact
//! measurement statistics along `x`, `y` or `z`.
//!
//! For fixed row `m` the entries `d_{m,m'}(beta)` satisfy
//!
//! ```text
//! (sin(beta)/2) (G+_{m'} d_{m,m'+1} + G-_{m'} d_{m,m'-1}) = (m' cos(beta) - m) d_{m,m'}
//! ```
//!
//! The recursion is run inward from both ends of the row (each direction is
//! stable while it grows out of a classically forbidden edge), the two halves
//! are matched deep inside the allowed region, and the row is normalized.
//! Only the overall sign needs outside information: it is taken from the
//! closed-form last column `d_{m,J}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use super::LadderCoefficients;
use crate::numeric::snapped_sin_cos;
use crate::spin_model::{DickeState, Spin};
use crate::{Error, Result};

/// Largest `2J` for which exact rotated distributions are built.
pub const EXACT_ROTATION_MAX_TWO_J: u64 = 512;

const RESCALE_ABOVE: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureAxis {
    X,
    Y,
    Z,
}

impl From<crate::exact_moments::Axis> for MeasureAxis {
    fn from(a: crate::exact_moments::Axis) -> Self {
        match a {
            crate::exact_moments::Axis::X => MeasureAxis::X,
            crate::exact_moments::Axis::Y => MeasureAxis::Y,
        }
    }
}

/// Row-major `d^J_{m,m'}(beta)`, rows and columns indexed by `m + J`.
pub fn wigner_d_matrix(spin: Spin, beta: f64) -> Vec<Vec<f64>> {
    let dim = spin.dim();
    let (sb, cb) = snapped_sin_cos(beta);
    if sb == 0.0 {
        // identity (beta = 0) or the antidiagonal (-1)^{J - m'} pattern (beta = pi)
        return (0..dim)
            .map(|i| {
                let mut row = vec![0.0; dim];
                if cb > 0.0 {
                    row[i] = 1.0;
                } else {
                    let col = dim - 1 - i;
                    row[col] = if (dim - 1 - col).is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                }
                row
            })
            .collect();
    }
    let ladder = LadderCoefficients::new(spin);
    let (sh, ch) = snapped_sin_cos(beta / 2.0);
    (0..dim)
        .map(|row| recursive_row(spin, &ladder, row, sb, cb, sh, ch))
        .collect()
}

fn recursive_row(
    spin: Spin,
    ladder: &LadderCoefficients,
    row: usize,
    sb: f64,
    cb: f64,
    sh: f64,
    ch: f64,
) -> Vec<f64> {
    let dim = spin.dim();
    let two_j = spin.two_j() as usize;
    let j = spin.j();
    let m = spin.m(row);
    let coeff = |col: usize| 2.0 * (spin.m(col) * cb - m) / sb;

    if dim == 1 {
        return vec![1.0];
    }

    // Match point: where the row is most deeply oscillatory.
    let allowed = |col: usize| {
        let mp = spin.m(col);
        sb * sb * (j * (j + 1.0) - mp * mp) - (mp * cb - m).powi(2)
    };
    let centre = (0..dim)
        .max_by(|&a, &b| allowed(a).total_cmp(&allowed(b)))
        .unwrap_or(0);
    let lo = centre.saturating_sub(2);
    let hi = (centre + 2).min(two_j);

    // Forward: G+_{i} d_{i+1} = coeff(i) d_i - G-_{i} d_{i-1}, from i = 0.
    let mut fwd = vec![0.0; hi + 1];
    fwd[0] = 1.0;
    for i in 0..hi {
        let prev = if i > 0 { fwd[i - 1] } else { 0.0 };
        fwd[i + 1] = (coeff(i) * fwd[i] - ladder.gamma_minus[i] * prev) / ladder.gamma_plus[i];
        if fwd[i + 1].abs() > RESCALE_ABOVE {
            fwd.iter_mut().take(i + 2).for_each(|v| *v /= RESCALE_ABOVE);
        }
    }

    // Backward: G-_{i} d_{i-1} = coeff(i) d_i - G+_{i} d_{i+1}, from i = 2J.
    let mut bwd = vec![0.0; dim];
    bwd[two_j] = 1.0;
    for i in (lo + 1..=two_j).rev() {
        let next = if i < two_j { bwd[i + 1] } else { 0.0 };
        bwd[i - 1] = (coeff(i) * bwd[i] - ladder.gamma_plus[i] * next) / ladder.gamma_minus[i];
        if bwd[i - 1].abs() > RESCALE_ABOVE {
            bwd.iter_mut().skip(i - 1).for_each(|v| *v /= RESCALE_ABOVE);
        }
    }

    let (num, den) = (lo..=hi).fold((0.0, 0.0), |(n, d), i| {
        (n + fwd[i] * bwd[i], d + bwd[i] * bwd[i])
    });
    let ratio = num / den;
    let mut out: Vec<f64> = (0..dim)
        .map(|i| if i <= centre { fwd[i] } else { bwd[i] * ratio })
        .collect();

    // Rescale before squaring so the norm cannot overflow.
    let peak = out.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let norm = out.iter().map(|v| (v / peak).powi(2)).sum::<f64>().sqrt() * peak;
    // sign of d_{m,J} = cos(beta/2)^{J+m} sin(beta/2)^{J-m} up to a positive factor
    let up = row as u64;
    let down = spin.two_j() - up;
    let negative = (ch < 0.0 && up % 2 == 1) != (sh < 0.0 && down % 2 == 1);
    let target_sign = if negative { -1.0 } else { 1.0 };
    let scale = target_sign * out[two_j].signum() / norm;
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

/// Outcome probabilities of measuring `J_axis`, indexed by `m + J`.
pub fn measurement_distribution(state: &DickeState, axis: MeasureAxis) -> Result<Vec<f64>> {
    let spin = state.spin();
    let c = state.amplitudes();
    if axis == MeasureAxis::Z {
        return Ok(c.iter().map(|a| a.norm_sqr()).collect());
    }
    if spin.two_j() > EXACT_ROTATION_MAX_TWO_J {
        return Err(Error::BudgetExceeded {
            needed: spin.two_j() as f64,
            budget: EXACT_ROTATION_MAX_TWO_J as f64,
        });
    }
    // Rotate the measurement axis onto z: x needs R_y(-pi/2); y first undoes
    // the pi/2 rotation about z.
    let rotated: Vec<Complex64> = if axis == MeasureAxis::Y {
        c.iter()
            .enumerate()
            .map(|(i, a)| a * Complex64::from_polar(1.0, FRAC_PI_2 * spin.m(i)))
            .collect()
    } else {
        c.to_vec()
    };
    let d = wigner_d_matrix(spin, -FRAC_PI_2);
    Ok(d.iter()
        .map(|row| {
            row.iter()
                .zip(&rotated)
                .map(|(x, a)| a * *x)
                .sum::<Complex64>()
                .norm_sqr()
        })
        .collect())
}
