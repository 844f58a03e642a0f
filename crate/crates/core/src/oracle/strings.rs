//! Eigenvalue extremes and product-state variances by enumeration.

use crate::bounds::{ExtremeCase, ExtremeResult, SEARCH_BUDGET};
use crate::numeric::{binomial_pmf, ln_binomial};
use crate::spin_model::{CouplingSpec, SingleBodySpectrum};
use crate::{Error, Result};

/// Largest constituent count for the exact binomial variance.
pub const VARIANCE_MAX_N: u64 = 10_000;

/// Elementary symmetric polynomials `e_0..=e_k` of an explicit list of values,
/// by the one-value-at-a-time update `e_j += x e_{j-1}`.
fn elementary_symmetric(values: impl Iterator<Item = f64>, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for x in values {
        for j in (1..=k).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// Expands occupation counts into the explicit string of eigenvalues.
fn expand<'a>(levels: &'a [f64], counts: &'a [u64]) -> impl Iterator<Item = f64> + 'a {
    levels
        .iter()
        .zip(counts)
        .flat_map(|(&l, &c)| std::iter::repeat_n(l, c as usize))
}

fn string_value(levels: &[f64], counts: &[u64], k: u32, self_interactions: bool) -> f64 {
    if self_interactions {
        expand(levels, counts).sum::<f64>().powi(k as i32)
    } else {
        let e = elementary_symmetric(expand(levels, counts), k as usize);
        (1..=k).map(|i| i as f64).product::<f64>() * e[k as usize]
    }
}

/// Advances `counts` to the next composition of its total in reverse
/// lexicographic order; returns `false` after the last one.
fn next_composition(counts: &mut [u64]) -> bool {
    let last = counts.len() - 1;
    // find the rightmost non-last position with a positive count
    let Some(pos) = (0..last).rev().find(|&i| counts[i] > 0) else {
        return false;
    };
    counts[pos] -= 1;
    let tail: u64 = counts[pos + 1..].iter().sum::<u64>() + 1;
    counts[pos + 1..].iter_mut().for_each(|c| *c = 0);
    counts[pos + 1] = tail;
    true
}

/// Exact extremes by visiting every occupation class of the spectrum levels
/// and evaluating the eigenvalue on the expanded string.
pub fn string_extremes(
    spectrum: &SingleBodySpectrum,
    coupling: &CouplingSpec,
) -> Result<ExtremeResult> {
    let levels = spectrum.levels();
    let CouplingSpec {
        k,
        n,
        self_interactions,
    } = *coupling;
    let classes = ln_binomial(n + levels.len() as u64 - 1, levels.len() as u64 - 1)
        .exp()
        .round();
    if classes > SEARCH_BUDGET {
        return Err(Error::BudgetExceeded {
            needed: classes,
            budget: SEARCH_BUDGET,
        });
    }
    let mut counts = vec![0u64; levels.len()];
    counts[0] = n;
    let mut best_max = (f64::NEG_INFINITY, counts.clone());
    let mut best_min = (f64::INFINITY, counts.clone());
    loop {
        let v = string_value(levels, &counts, k, self_interactions);
        if v > best_max.0 {
            best_max = (v, counts.clone());
        }
        if v < best_min.0 {
            best_min = (v, counts.clone());
        }
        if !next_composition(&mut counts) {
            break;
        }
    }
    let case = if !self_interactions {
        ExtremeCase::NoSelfInteraction
    } else if k % 2 == 1 {
        ExtremeCase::OddK
    } else if spectrum.lambda_min() >= 0.0 {
        ExtremeCase::EvenNonNegative
    } else if spectrum.lambda_max() <= 0.0 {
        ExtremeCase::EvenNonPositive
    } else {
        ExtremeCase::EvenMixedSign
    };
    Ok(ExtremeResult {
        case,
        lambda_cap_max: best_max.0,
        lambda_cap_min: best_min.0,
        counts_max: best_max.1,
        counts_min: best_min.1,
        delta: None,
        epsilon: None,
        exact: true,
    })
}

/// Exact `(Delta H)^2` for `n` identical two-level constituents, each in
/// `lambda_max` with probability `p`.
///
/// The number `a` of constituents in `lambda_max` is binomial; the coupling is
/// diagonal, so the variance is that of the classical random variable `H(a)`.
pub fn product_variance_exact(
    spectrum: &SingleBodySpectrum,
    p: f64,
    n: u64,
    k: u32,
    self_interactions: bool,
) -> Result<f64> {
    if !spectrum.is_two_level() {
        return Err(Error::InvalidParameter(
            "exact product variance needs a two-level spectrum".into(),
        ));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfDomain {
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if n > VARIANCE_MAX_N {
        return Err(Error::BudgetExceeded {
            needed: n as f64,
            budget: VARIANCE_MAX_N as f64,
        });
    }
    let (lo, hi) = (spectrum.lambda_min(), spectrum.lambda_max());
    let value = |a: u64| {
        if self_interactions {
            (a as f64 * hi + (n - a) as f64 * lo).powi(k as i32)
        } else {
            // k! sum_j C(a, j) C(n - a, k - j) hi^j lo^(k - j)
            let choose = |m: u64, r: u64| if r > m { 0.0 } else { ln_binomial(m, r).exp() };
            let sum: f64 = (0..=k as u64)
                .map(|j| {
                    choose(a, j)
                        * choose(n - a, k as u64 - j)
                        * hi.powi(j as i32)
                        * lo.powi((k as u64 - j) as i32)
                })
                .sum();
            (1..=k).map(|i| i as f64).product::<f64>() * sum
        }
    };
    let weights: Vec<(f64, f64)> = (0..=n)
        .map(|a| (binomial_pmf(a, n, p, 1.0 - p), value(a)))
        .collect();
    let mean: f64 = weights.iter().map(|(w, v)| w * v).sum();
    Ok(weights.iter().map(|(w, v)| w * (v - mean).powi(2)).sum())
}
