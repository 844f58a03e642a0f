//! Two-point scaling exponents `xi` with `delta_phi ~ J^{-xi}`.

use serde::{Deserialize, Serialize};

use super::{sensitivity_exact, Axis};
use crate::spin_model::Spin;
use crate::{Error, Result};

/// How the operating phase is chosen at each `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatingRule {
    /// `phi = 0`, the fringe center for `J_y`.
    PhiZero,
    /// `phi = 1/(sqrt(2) J)`, the compromise point for `J_x`.
    InverseSqrt2J,
    /// `phi = c / J`.
    ScaledInverseJ(f64),
}

impl OperatingRule {
    pub fn phi(self, spin: Spin) -> f64 {
        let j = spin.j();
        match self {
            OperatingRule::PhiZero => 0.0,
            OperatingRule::InverseSqrt2J => 1.0 / (2f64.sqrt() * j),
            OperatingRule::ScaledInverseJ(c) => c / j,
        }
    }

    /// The default rule for an axis.
    pub fn default_for(axis: Axis) -> Self {
        match axis {
            Axis::X => OperatingRule::InverseSqrt2J,
            Axis::Y => OperatingRule::PhiZero,
        }
    }
}

impl std::fmt::Display for OperatingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatingRule::PhiZero => f.write_str("phi=0"),
            OperatingRule::InverseSqrt2J => f.write_str("phi=1/(sqrt(2)J)"),
            OperatingRule::ScaledInverseJ(c) => write!(f, "phi={c}/J"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingResult {
    pub xi: f64,
    pub j_lo: f64,
    pub j_hi: f64,
    pub delta_phi_lo: f64,
    pub delta_phi_hi: f64,
    pub operating_rule: OperatingRule,
}

/// `xi = ln(delta_phi(J_lo) / delta_phi(J_hi)) / ln(J_hi / J_lo)` from the
/// exact sensitivity.
pub fn scaling_exponent(
    beta: f64,
    axis: Axis,
    j_lo: Spin,
    j_hi: Spin,
    rule: OperatingRule,
) -> Result<ScalingResult> {
    if j_hi <= j_lo {
        return Err(Error::InvalidParameter(format!(
            "need J_hi > J_lo, got {j_hi} and {j_lo}"
        )));
    }
    let eval = |spin: Spin| {
        sensitivity_exact(spin, beta, rule.phi(spin), axis)
            .delta_phi
            .value()
            .ok_or_else(|| {
                Error::NoInformation(format!(
                    "zero signal for axis {axis} at beta = {beta}, J = {spin}, {rule}"
                ))
            })
    };
    let (lo, hi) = (eval(j_lo)?, eval(j_hi)?);
    Ok(ScalingResult {
        xi: (lo / hi).ln() / (j_hi.j() / j_lo.j()).ln(),
        j_lo: j_lo.j(),
        j_hi: j_hi.j(),
        delta_phi_lo: lo,
        delta_phi_hi: hi,
        operating_rule: rule,
    })
}
