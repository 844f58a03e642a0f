//! Binomial-sum identities behind the closed-form moments, checked by direct
//! summation.

use crate::numeric::ln_binomial;
use crate::spin_model::Spin;
use crate::{Error, Result};

/// Largest `2J` for direct summation.
pub const IDENTITY_MAX_TWO_J: u64 = 60;

fn relative(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// Relative residuals of
///
/// 1. `sum (J-m) C(2J, J-m) a^{J+m} b^{J-m} = 2J b (a+b)^{2J-1}`
/// 2. `sum (J^2-m^2) C(2J, J-m) a^{J+m} b^{J-m} = 2J(2J-1) a b (a+b)^{2J-2}`
/// 3. `sum (J-m)(J-m-1) C(2J, J-m) a^{J+m} b^{J-m} = 2J(2J-1) b^2 (a+b)^{2J-2}`
pub fn identity_residuals(spin: Spin, a: f64, b: f64) -> Result<[f64; 3]> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need a, b > 0, got a = {a}, b = {b}"
        )));
    }
    let two_j = spin.two_j();
    if two_j > IDENTITY_MAX_TWO_J {
        return Err(Error::BudgetExceeded {
            needed: two_j as f64,
            budget: IDENTITY_MAX_TWO_J as f64,
        });
    }
    let mut sums = [0.0; 3];
    // up = J + m, down = J - m
    for up in 0..=two_j {
        let down = two_j - up;
        let term = ln_binomial(two_j, down).exp() * a.powi(up as i32) * b.powi(down as i32);
        let (u, d) = (up as f64, down as f64);
        sums[0] += d * term;
        sums[1] += d * u * term;
        sums[2] += d * (d - 1.0) * term;
    }
    let tj = two_j as f64;
    let s = a + b;
    let pair = if two_j >= 2 {
        tj * (tj - 1.0) * s.powi(two_j as i32 - 2)
    } else {
        0.0
    };
    let rhs = [
        tj * b * s.powi(two_j as i32 - 1),
        pair * a * b,
        pair * b * b,
    ];
    Ok([
        relative(sums[0], rhs[0]),
        relative(sums[1], rhs[1]),
        relative(sums[2], rhs[2]),
    ])
}
