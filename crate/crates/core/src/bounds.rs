//! Precision bounds: extreme eigenvalues of the collective coupling and the
//! entangled-state bound, product-state variance and its optimum, and the
//! short-time sensitivity of a separable measurement.

use serde::Serialize;

use crate::exact_moments::{Axis, ModelKind, Precision, SensitivityPoint};
use crate::numeric::{ln_binomial, snapped_sin_cos};
use crate::spin_model::{CouplingSpec, ExperimentClock, SingleBodySpectrum};
use crate::{Error, Result};

/// Largest number of occupation classes an exact extreme search may visit.
pub const SEARCH_BUDGET: f64 = 1e6;

/// Which eigenvalue structure applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremeCase {
    /// `k` odd: extremes at all-`lambda_max` and all-`lambda_min`.
    OddK,
    /// `k` even, `lambda_min >= 0`.
    EvenNonNegative,
    /// `k` even, `lambda_max <= 0`.
    EvenNonPositive,
    /// `k` even, `lambda_min < 0 < lambda_max`: the minimum sits near zero.
    EvenMixedSign,
    /// Coupling without self-interaction terms.
    NoSelfInteraction,
}

/// Extreme eigenvalues of the coupling and the occupation counts achieving them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeResult {
    pub case: ExtremeCase,
    pub lambda_cap_max: f64,
    pub lambda_cap_min: f64,
    /// Constituents per spectrum level (same order as `SingleBodySpectrum::levels`).
    pub counts_max: Vec<u64>,
    pub counts_min: Vec<u64>,
    /// Distance of `n |lambda_min| / ||h||` from the nearest integer
    /// (mixed-sign even `k` only).
    pub delta: Option<f64>,
    /// `delta - Lambda_min^{1/k} / ||h||`; `None` when not determined exactly.
    pub epsilon: Option<f64>,
    /// `true` when found by closed form or exhaustive search.
    pub exact: bool,
}

impl ExtremeResult {
    /// Semi-norm `Lambda_max - Lambda_min` of the coupling.
    pub fn seminorm(&self) -> f64 {
        self.lambda_cap_max - self.lambda_cap_min
    }
}

/// Number of ways to distribute `n` constituents over `levels` levels.
pub fn occupation_class_count(n: u64, levels: usize) -> f64 {
    if levels <= 1 {
        return 1.0;
    }
    ln_binomial(n + levels as u64 - 1, levels as u64 - 1)
        .exp()
        .round()
}

/// `k! e_k` of the multiset with `counts[i]` copies of `levels[i]`: the
/// eigenvalue of the coupling with self-interactions removed.
///
/// Uses the coefficient of `x^k` in `prod_i (1 + levels[i] x)^counts[i]`.
pub fn distinct_tuple_eigenvalue(levels: &[f64], counts: &[u64], k: u32) -> f64 {
    let k = k as usize;
    let mut poly = vec![0.0; k + 1];
    poly[0] = 1.0;
    for (&lambda, &count) in levels.iter().zip(counts) {
        if count == 0 {
            continue;
        }
        // (1 + lambda x)^count truncated at degree k
        let top = k.min(count as usize);
        let mut factor = vec![0.0; top + 1];
        factor[0] = 1.0;
        for j in 1..=top {
            factor[j] = factor[j - 1] * (count - j as u64 + 1) as f64 / j as f64 * lambda;
        }
        let mut next = vec![0.0; k + 1];
        for (a, &pa) in poly.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for (b, &fb) in factor.iter().enumerate().take(k + 1 - a) {
                next[a + b] += pa * fb;
            }
        }
        poly = next;
    }
    let factorial: f64 = (1..=k).map(|i| i as f64).product();
    factorial * poly[k]
}

/// Eigenvalue of the coupling with self-interactions for an occupation class.
fn full_power_eigenvalue(levels: &[f64], counts: &[u64], k: u32) -> f64 {
    let sum: f64 = levels.iter().zip(counts).map(|(&l, &c)| l * c as f64).sum();
    sum.powi(k as i32)
}

/// Visits every composition of `n` into `parts` non-negative parts.
fn for_each_composition(n: u64, parts: usize, visit: &mut impl FnMut(&[u64])) {
    fn recurse(remaining: u64, idx: usize, counts: &mut Vec<u64>, visit: &mut impl FnMut(&[u64])) {
        if idx + 1 == counts.len() {
            counts[idx] = remaining;
            visit(counts);
            return;
        }
        for c in (0..=remaining).rev() {
            counts[idx] = c;
            recurse(remaining - c, idx + 1, counts, visit);
        }
    }
    let mut counts = vec![0; parts];
    recurse(n, 0, &mut counts, visit);
}

struct SearchOutcome {
    max: (f64, Vec<u64>),
    min: (f64, Vec<u64>),
}

/// Exhaustive extreme search over occupation classes of the given levels.
/// Ties keep the first class visited.
fn search_classes(levels: &[f64], n: u64, value: impl Fn(&[u64]) -> f64) -> SearchOutcome {
    let mut max = (f64::NEG_INFINITY, Vec::new());
    let mut min = (f64::INFINITY, Vec::new());
    for_each_composition(n, levels.len(), &mut |counts| {
        let v = value(counts);
        if v > max.0 {
            max = (v, counts.to_vec());
        }
        if v < min.0 {
            min = (v, counts.to_vec());
        }
    });
    SearchOutcome { max, min }
}

/// Expands counts over the two extreme levels into counts over all levels.
fn extreme_counts(levels: usize, at_max: u64, at_min: u64) -> Vec<u64> {
    let mut counts = vec![0; levels];
    counts[0] = at_min;
    counts[levels - 1] += at_max;
    counts
}

/// Extreme eigenvalues of `(sum h_j)^k`, or of its self-interaction-free
/// counterpart `k! e_k(h_1, ..., h_n)`.
pub fn extreme_eigenvalues(
    spectrum: &SingleBodySpectrum,
    coupling: &CouplingSpec,
) -> Result<ExtremeResult> {
    let CouplingSpec {
        k,
        n,
        self_interactions,
    } = *coupling;
    if k == 0 || n < k as u64 {
        return Err(Error::InvalidCoupling(format!(
            "need n >= k >= 1, got n = {n}, k = {k}"
        )));
    }
    let levels = spectrum.levels();
    let l = levels.len();
    let (lmin, lmax) = (spectrum.lambda_min(), spectrum.lambda_max());
    let nf = n as f64;
    let budget_ok = occupation_class_count(n, l) <= SEARCH_BUDGET;

    if !self_interactions {
        let value = |c: &[u64]| distinct_tuple_eigenvalue(levels, c, k);
        let (outcome, exact) = if budget_ok {
            (search_classes(levels, n, value), true)
        } else {
            let pair = [lmin, lmax];
            let o = search_classes(&pair, n, |c| distinct_tuple_eigenvalue(&pair, c, k));
            let expand = |c: &[u64]| extreme_counts(l, c[1], c[0]);
            (
                SearchOutcome {
                    max: (o.max.0, expand(&o.max.1)),
                    min: (o.min.0, expand(&o.min.1)),
                },
                false,
            )
        };
        return Ok(ExtremeResult {
            case: ExtremeCase::NoSelfInteraction,
            lambda_cap_max: outcome.max.0,
            lambda_cap_min: outcome.min.0,
            counts_max: outcome.max.1,
            counts_min: outcome.min.1,
            delta: None,
            epsilon: None,
            exact,
        });
    }

    let all_at = |level_is_max: bool| {
        if level_is_max {
            extreme_counts(l, n, 0)
        } else {
            extreme_counts(l, 0, n)
        }
    };
    let power = |x: f64| (nf * x).powi(k as i32);

    if k % 2 == 1 || lmin >= 0.0 {
        let case = if k % 2 == 1 {
            ExtremeCase::OddK
        } else {
            ExtremeCase::EvenNonNegative
        };
        return Ok(ExtremeResult {
            case,
            lambda_cap_max: power(lmax),
            lambda_cap_min: power(lmin),
            counts_max: all_at(true),
            counts_min: all_at(false),
            delta: None,
            epsilon: None,
            exact: true,
        });
    }
    if lmax <= 0.0 {
        return Ok(ExtremeResult {
            case: ExtremeCase::EvenNonPositive,
            lambda_cap_max: power(lmin),
            lambda_cap_min: power(lmax),
            counts_max: all_at(false),
            counts_min: all_at(true),
            delta: None,
            epsilon: None,
            exact: true,
        });
    }

    // Mixed signs, k even.
    let norm = spectrum.seminorm();
    let target = nf * lmin.abs() / norm;
    let nearest = target.round();
    let delta = (target - nearest).abs();
    let counts_max = all_at(lmax.abs() >= lmin.abs());
    let lambda_cap_max = power(spectrum.abs_max());

    if budget_ok {
        let outcome = search_classes(levels, n, |c| full_power_eigenvalue(levels, c, k));
        let lambda_cap_min = outcome.min.0;
        let epsilon = if spectrum.is_two_level() {
            0.0
        } else {
            (delta - lambda_cap_min.powf(1.0 / k as f64) / norm).max(0.0)
        };
        return Ok(ExtremeResult {
            case: ExtremeCase::EvenMixedSign,
            lambda_cap_max,
            lambda_cap_min,
            counts_max,
            counts_min: outcome.min.1,
            delta: Some(delta),
            epsilon: Some(epsilon),
            exact: true,
        });
    }

    // Two-extreme-level construction: evaluate both integers around the target.
    let candidates = [target.floor(), target.ceil(), nearest];
    let (at_max, value) = candidates
        .iter()
        .filter(|&&a| a >= 0.0 && a <= nf)
        .map(|&a| {
            (
                a as u64,
                full_power_eigenvalue(&[lmin, lmax], &[n - a as u64, a as u64], k),
            )
        })
        .fold((0u64, f64::INFINITY), |best, cand| {
            if cand.1 < best.1 {
                cand
            } else {
                best
            }
        });
    Ok(ExtremeResult {
        case: ExtremeCase::EvenMixedSign,
        lambda_cap_max,
        lambda_cap_min: value,
        counts_max,
        counts_min: extreme_counts(l, at_max, n - at_max),
        delta: Some(delta),
        epsilon: spectrum.is_two_level().then_some(0.0),
        exact: spectrum.is_two_level(),
    })
}

/// Entangled-state bound `1 / (sqrt(nu) t (Lambda_max - Lambda_min))`.
pub fn qcrb_entangled(extremes: &ExtremeResult, clock: &ExperimentClock) -> Precision {
    Precision::from_ratio(
        1.0,
        (clock.nu as f64).sqrt() * clock.t * extremes.seminorm(),
    )
}

/// Bound `1 / (sqrt(nu) 2 t Delta H)` from a variance of the coupling.
pub fn qcrb_from_variance(variance: f64, clock: &ExperimentClock) -> Precision {
    Precision::from_ratio(
        1.0,
        (clock.nu as f64).sqrt() * 2.0 * clock.t * variance.max(0.0).sqrt(),
    )
}

/// Leading-order `(Delta H)^2 = k^2 n^{2k-1} x^{2(k-1)} (lambda_max - x)(x - lambda_min)`
/// for identical product constituents with `<h> = x`.
pub fn product_variance_leading(
    spectrum: &SingleBodySpectrum,
    coupling: &CouplingSpec,
    x: f64,
) -> Result<f64> {
    let (lmin, lmax) = (spectrum.lambda_min(), spectrum.lambda_max());
    if !(x >= lmin && x <= lmax) {
        return Err(Error::OutOfDomain {
            value: x,
            lo: lmin,
            hi: lmax,
        });
    }
    let k = coupling.k as i32;
    let n = coupling.n as f64;
    Ok((k * k) as f64 * n.powi(2 * k - 1) * x.powi(2 * (k - 1)) * (lmax - x) * (x - lmin))
}

/// Which stationary point of the product variance is the global maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
    /// Symmetric spectrum: both maxima give the same variance.
    Both,
    /// `k = 1`: a single maximum at the spectrum midpoint.
    Single,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalProductResult {
    pub x_plus: f64,
    pub x_minus: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub plus_in_domain: bool,
    pub minus_in_domain: bool,
    pub global_branch: Branch,
    /// Mean `<h>` of the chosen optimum (`x_plus` when both tie).
    pub x_opt: f64,
    pub p_opt: f64,
    pub beta_opt: f64,
    /// Leading-order `(Delta H)^2` at the optimum.
    pub variance: f64,
    /// `1/(2 Delta H)`: the product-state bound for `t = 1`, `nu = 1`.
    pub qcrb: f64,
}

/// `f(x) = x^{2(k-1)} (lambda_max - x)(x - lambda_min)`.
pub fn product_objective(spectrum: &SingleBodySpectrum, k: u32, x: f64) -> f64 {
    x.powi(2 * (k as i32 - 1)) * (spectrum.lambda_max() - x) * (x - spectrum.lambda_min())
}

/// Optimal identical product state for the leading-order variance.
pub fn optimal_product_state(
    spectrum: &SingleBodySpectrum,
    coupling: &CouplingSpec,
) -> OptimalProductResult {
    let k = coupling.k;
    let kf = k as f64;
    let (lmin, lmax) = (spectrum.lambda_min(), spectrum.lambda_max());
    let norm = spectrum.seminorm();
    let mean = spectrum.mean();
    let prob = |x: f64| ((x - lmin) / norm).clamp(0.0, 1.0);
    let angle = |p: f64| 2.0 * p.sqrt().acos();

    let (x_plus, x_minus) = if k == 1 {
        (mean, mean)
    } else if spectrum.is_symmetric() {
        let half = 0.5 * norm * (1.0 - 1.0 / kf).sqrt();
        (half, -half)
    } else {
        let centre = (1.0 - 0.5 / kf) * mean;
        let spread = 0.5 * (mean * mean / (kf * kf) + (1.0 - 1.0 / kf) * norm * norm).sqrt();
        (centre + spread, centre - spread)
    };
    let in_domain = |x: f64| x >= lmin && x <= lmax;
    let (plus_in_domain, minus_in_domain) = (in_domain(x_plus), in_domain(x_minus));

    let global_branch = if k == 1 {
        Branch::Single
    } else if spectrum.is_symmetric() {
        Branch::Both
    } else {
        let score = |x: f64, ok: bool| {
            if ok {
                product_objective(spectrum, k, x)
            } else {
                f64::NEG_INFINITY
            }
        };
        if score(x_plus, plus_in_domain) >= score(x_minus, minus_in_domain) {
            Branch::Plus
        } else {
            Branch::Minus
        }
    };
    let x_opt = if global_branch == Branch::Minus {
        x_minus
    } else {
        x_plus
    };

    let n = coupling.n as f64;
    let variance = if spectrum.is_symmetric() && k >= 2 {
        kf * (1.0 - 1.0 / kf).powi(k as i32 - 1)
            * n.powi(2 * k as i32 - 1)
            * (norm / 2.0).powi(2 * k as i32)
    } else {
        kf * kf * n.powi(2 * k as i32 - 1) * product_objective(spectrum, k, x_opt)
    };
    let (p_plus, p_minus) = (prob(x_plus), prob(x_minus));
    OptimalProductResult {
        x_plus,
        x_minus,
        p_plus,
        p_minus,
        beta_plus: angle(p_plus),
        beta_minus: angle(p_minus),
        plus_in_domain,
        minus_in_domain,
        global_branch,
        x_opt,
        p_opt: prob(x_opt),
        beta_opt: angle(prob(x_opt)),
        variance,
        qcrb: 1.0 / (2.0 * variance.sqrt()),
    }
}

/// Short-time sensitivity of a `J_y` measurement with its optimal angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortTimeResult {
    pub point: SensitivityPoint,
    /// `asin(1/sqrt(k))`.
    pub optimal_beta: f64,
    /// Heuristic `n >= 10 k` check; the expansion assumes `n >> k`.
    pub large_n: bool,
}

/// `delta_phi = (1/sqrt(nu)) 2^{k-1} / (k n^{k-1/2} sin(beta) |cos(beta)|^{k-1})`
/// from slope `k (n/2)^k sin(beta) cos^{k-1}(beta)` and noise `sqrt(n)/2`.
pub fn short_time_sensitivity(n: u64, k: u32, beta: f64, nu: u64) -> ShortTimeResult {
    let (sb, cb) = snapped_sin_cos(beta);
    let nf = n as f64;
    let slope = k as f64 * (nf / 2.0).powi(k as i32) * sb * cb.powi(k as i32 - 1);
    let noise = nf.sqrt() / 2.0;
    ShortTimeResult {
        point: SensitivityPoint::new(0.0, Axis::Y, slope, noise, nu, ModelKind::ShortTime),
        optimal_beta: (1.0 / (k as f64).sqrt()).asin(),
        large_n: n >= 10 * k as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn qubit() -> SingleBodySpectrum {
        SingleBodySpectrum::qubit()
    }

    fn coupling(k: u32, n: u64, self_interactions: bool) -> CouplingSpec {
        CouplingSpec::new(k, n, self_interactions).unwrap()
    }

    #[test]
    fn odd_k_extremes() {
        let r = extreme_eigenvalues(&qubit(), &coupling(3, 4, true)).unwrap();
        assert_eq!((r.lambda_cap_max, r.lambda_cap_min), (8.0, -8.0));
        assert_eq!(r.case, ExtremeCase::OddK);
    }

    #[test]
    fn even_k_mixed_sign_extremes() {
        let r = extreme_eigenvalues(&qubit(), &coupling(2, 5, true)).unwrap();
        assert_eq!((r.lambda_cap_max, r.lambda_cap_min), (6.25, 0.25));
        assert_eq!(r.delta, Some(0.5));
        let r = extreme_eigenvalues(&qubit(), &coupling(2, 4, true)).unwrap();
        assert_eq!((r.lambda_cap_max, r.lambda_cap_min), (4.0, 0.0));
        assert_eq!(r.counts_min, vec![2, 2]);
    }

    #[test]
    fn same_sign_cases() {
        let pos = SingleBodySpectrum::new(&[0.0, 1.0]).unwrap();
        let r = extreme_eigenvalues(&pos, &coupling(2, 3, true)).unwrap();
        assert_eq!(
            (r.case, r.lambda_cap_max, r.lambda_cap_min),
            (ExtremeCase::EvenNonNegative, 9.0, 0.0)
        );
        let neg = SingleBodySpectrum::new(&[-2.0, -1.0]).unwrap();
        let r = extreme_eigenvalues(&neg, &coupling(2, 3, true)).unwrap();
        assert_eq!(
            (r.case, r.lambda_cap_max, r.lambda_cap_min),
            (ExtremeCase::EvenNonPositive, 36.0, 9.0)
        );
        assert_eq!(r.counts_max, vec![3, 0]);
    }

    #[test]
    fn distinct_tuple_examples() {
        let r = extreme_eigenvalues(&qubit(), &coupling(2, 4, false)).unwrap();
        assert_eq!(r.lambda_cap_max, 3.0);
        // k = 2 qubits: 2 e_2 = S^2 - n/4, minimized at S = 0
        assert_eq!(r.lambda_cap_min, -1.0);
        assert_eq!(distinct_tuple_eigenvalue(&[-0.5, 0.5], &[0, 4], 2), 3.0);
    }

    #[test]
    fn multi_level_search_beats_two_levels() {
        let s = SingleBodySpectrum::new(&[-1.0, 0.3, 1.0]).unwrap();
        let r = extreme_eigenvalues(&s, &coupling(2, 3, true)).unwrap();
        // two extreme levels alone give (2 - 1)^2 = 1 at best; the 0.3 level reaches 0.09
        assert!((r.lambda_cap_min - 0.09).abs() < 1e-12);
        assert!(r.exact);
        let eps = r.epsilon.unwrap();
        assert!((eps - (r.delta.unwrap() - 0.3 / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn fallback_beyond_budget_is_flagged() {
        let levels: Vec<f64> = (0..8).map(|i| -1.0 + i as f64 * 2.0 / 7.0 + 0.01).collect();
        let s = SingleBodySpectrum::new(&levels).unwrap();
        let c = coupling(2, 200, true);
        assert!(occupation_class_count(200, 8) > SEARCH_BUDGET);
        let r = extreme_eigenvalues(&s, &c).unwrap();
        assert!(!r.exact && r.epsilon.is_none());
        let norm = s.seminorm();
        assert!((r.lambda_cap_min - (r.delta.unwrap() * norm).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn qcrb_examples() {
        let r = extreme_eigenvalues(&qubit(), &coupling(2, 4, true)).unwrap();
        let clock = ExperimentClock::new(0.0, 1.0, 1).unwrap();
        assert_eq!(qcrb_entangled(&r, &clock), Precision::Finite(0.25));
        let s = SingleBodySpectrum::new(&[0.0, 1.0]).unwrap();
        let r = extreme_eigenvalues(&s, &coupling(3, 4, true)).unwrap();
        assert_eq!(qcrb_entangled(&r, &clock), Precision::Finite(0.015625));
        let clock4 = ExperimentClock::new(0.0, 1.0, 4).unwrap();
        assert_eq!(qcrb_entangled(&r, &clock4), Precision::Finite(0.0078125));
    }

    #[test]
    fn leading_variance_examples() {
        let x = 2f64.sqrt() / 4.0;
        let v = product_variance_leading(&qubit(), &coupling(2, 4, true), x).unwrap();
        assert!((v - 4.0).abs() < 1e-12);
        let v = product_variance_leading(&qubit(), &coupling(2, 100, true), x).unwrap();
        assert!((v - 62500.0).abs() < 1e-8);
        let v = product_variance_leading(&qubit(), &coupling(1, 10, true), 0.0).unwrap();
        assert_eq!(v, 2.5);
        assert!(matches!(
            product_variance_leading(&qubit(), &coupling(2, 4, true), 0.7),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn optimal_product_examples() {
        let r = optimal_product_state(&qubit(), &coupling(2, 100, true));
        assert!((r.x_plus - 0.353_553_39).abs() < 1e-8);
        assert!((r.x_minus + 0.353_553_39).abs() < 1e-8);
        assert!((r.beta_plus - FRAC_PI_4).abs() < 1e-12);
        assert!((r.beta_minus - 3.0 * FRAC_PI_4).abs() < 1e-12);
        assert!((r.qcrb - 2.0 / 100f64.powf(1.5)).abs() < 1e-15);
        assert_eq!(r.global_branch, Branch::Both);

        let s = SingleBodySpectrum::new(&[0.0, 1.0]).unwrap();
        let r = optimal_product_state(&s, &coupling(2, 10, true));
        assert!((r.x_plus - 0.75).abs() < 1e-14);
        assert_eq!(r.global_branch, Branch::Plus);

        let r = optimal_product_state(&qubit(), &coupling(1, 10, true));
        assert_eq!(r.x_opt, 0.0);
        assert_eq!(r.variance, 2.5);
        assert_eq!(r.global_branch, Branch::Single);
    }

    #[test]
    fn global_branch_follows_larger_magnitude() {
        let s = SingleBodySpectrum::new(&[-0.3, 1.0]).unwrap();
        assert_eq!(
            optimal_product_state(&s, &coupling(3, 10, true)).global_branch,
            Branch::Plus
        );
        let s = SingleBodySpectrum::new(&[-1.0, 0.3]).unwrap();
        assert_eq!(
            optimal_product_state(&s, &coupling(3, 10, true)).global_branch,
            Branch::Minus
        );
        let s = SingleBodySpectrum::new(&[-2.0, -1.0]).unwrap();
        let r = optimal_product_state(&s, &coupling(2, 10, true));
        assert_eq!(r.global_branch, Branch::Minus);
        assert!(!r.plus_in_domain);
    }

    #[test]
    fn symmetric_variance_matches_general_formula() {
        for k in 2..=6u32 {
            let c = coupling(k, 50, true);
            let r = optimal_product_state(&qubit(), &c);
            let general = product_variance_leading(&qubit(), &c, r.x_plus).unwrap();
            assert!((r.variance - general).abs() <= 1e-12 * general);
        }
    }

    #[test]
    fn short_time_examples() {
        let r = short_time_sensitivity(100, 2, FRAC_PI_4, 1);
        assert!((r.point.delta_phi.value().unwrap() - 2e-3).abs() < 1e-15);
        let r = short_time_sensitivity(400, 1, PI / 2.0, 1);
        assert!((r.point.delta_phi.value().unwrap() - 0.05).abs() < 1e-15);
        let n = 300u64;
        let b3 = (1.0 / 3f64.sqrt()).asin();
        let r = short_time_sensitivity(n, 3, b3, 1);
        let expect = 2.0 * 3f64.sqrt() / (n as f64).powf(2.5);
        assert!((r.point.delta_phi.value().unwrap() - expect).abs() < 1e-12 * expect);
        assert!((r.optimal_beta - b3).abs() < 1e-15);
        assert_eq!(
            short_time_sensitivity(100, 2, PI / 2.0, 1).point.delta_phi,
            Precision::NoInformation
        );
    }

    #[test]
    fn short_time_grid_minimum_at_optimal_angle() {
        for k in 1..=5u32 {
            let grid = 20_000;
            let best = (1..grid)
                .map(|i| i as f64 * (PI / 2.0) / grid as f64)
                .min_by(|&a, &b| {
                    let f = |x| {
                        short_time_sensitivity(1000, k, x, 1)
                            .point
                            .delta_phi
                            .value()
                            .unwrap_or(f64::INFINITY)
                    };
                    f(a).total_cmp(&f(b))
                })
                .unwrap();
            let opt = short_time_sensitivity(1000, k, 0.0, 1).optimal_beta;
            assert!((best - opt).abs() <= (PI / 2.0) / grid as f64, "k={k}");
        }
    }

    proptest! {
        #[test]
        fn stationary_points_are_global_maxima(
            lo in -2.0f64..1.0, width in 0.1f64..3.0, k in 2u32..7
        ) {
            let s = SingleBodySpectrum::new(&[lo, lo + width]).unwrap();
            let r = optimal_product_state(&s, &coupling(k, 10, true));
            let f = |x: f64| product_objective(&s, k, x);
            // derivative of f scaled by its curvature
            let h = 1e-5 * width;
            for (x, ok) in [(r.x_plus, r.plus_in_domain), (r.x_minus, r.minus_in_domain)] {
                if ok && x.abs() > 1e-6 {
                    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
                    let d2 = ((f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)).abs();
                    prop_assert!(d1.abs() <= 1e-5 * d2.max(1e-12) + 1e-9 * f(x).abs() / width);
                }
            }
            let best = f(r.x_opt);
            for i in 0..=1000 {
                let x = lo + width * i as f64 / 1000.0;
                prop_assert!(f(x) <= best * (1.0 + 1e-12) + 1e-300);
            }
        }

        #[test]
        fn mixed_sign_minimum_ratio(n in 4u64..60, k in prop::sample::select(vec![2u32, 4])) {
            let r = extreme_eigenvalues(&SingleBodySpectrum::qubit(), &coupling(k, n, true)).unwrap();
            prop_assert!(r.lambda_cap_min / r.lambda_cap_max <= (n as f64).powi(-(k as i32)) * (1.0 + 1e-12));
            if n % 2 == 0 {
                prop_assert_eq!(r.lambda_cap_min, 0.0);
            }
            prop_assert_eq!(r.lambda_cap_min, (r.delta.unwrap() * 1.0).powi(k as i32));
        }
    }
}
