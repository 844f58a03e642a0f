//! Small numerical kernels shared across modules.
//!
//! The binomial probability uses the saddle-point expansion of Loader
//! ("Fast and accurate computation of binomial probabilities", 2000): the
//! Stirling remainder and the deviance term are evaluated separately so that
//! nothing of size `ln(n!)` is ever formed and cancelled. Relative accuracy is
//! a few ulps for every `n` we care about.

use std::f64::consts::{PI, TAU};

/// `ln(n!) - ln(sqrt(2 pi n) (n/e)^n)` at integer `n`, tabulated for small
/// arguments where the asymptotic series is not yet accurate.
const STIRLING_ERROR_TABLE: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_09,
    0.027_677_925_684_998_339_15,
    0.020_790_672_103_765_093_11,
    0.016_644_691_189_821_192_16,
    0.013_876_128_823_070_747_99,
    0.011_896_709_945_891_770_10,
    0.010_411_265_261_972_096_50,
    0.009_255_462_182_712_732_918,
    0.008_330_563_433_362_871_256,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_866,
    0.006_408_994_188_004_207_068,
    0.005_951_370_112_758_847_736,
    0.005_554_733_551_962_801_371,
];

/// Stirling-series remainder of `ln(n!)`.
pub fn stirling_error(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < 16 {
        return STIRLING_ERROR_TABLE[n as usize];
    }
    let n = n as f64;
    let nn = n * n;
    if n > 500.0 {
        (S0 - S1 / nn) / n
    } else if n > 80.0 {
        (S0 - (S1 - S2 / nn) / nn) / n
    } else if n > 35.0 {
        (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n
    }
}

/// Deviance term `x ln(x/np) + np - x`, evaluated without cancellation when
/// `x` is close to `np`.
pub fn binomial_deviance(x: f64, np: f64) -> f64 {
    if (x - np).abs() < 0.1 * (x + np) {
        let mut v = (x - np) / (x + np);
        let mut s = (x - np) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let s1 = s + ej / (2 * j + 1) as f64;
            if s1 == s {
                return s1;
            }
            s = s1;
        }
        return s;
    }
    x * (x / np).ln() + np - x
}

/// Natural log of the binomial probability `C(n, x) p^x q^(n-x)`.
///
/// `p` and `q` are passed separately so callers can supply `q` without the
/// rounding of `1 - p`. Returns `-inf` for impossible outcomes.
pub fn ln_binomial_pmf(x: u64, n: u64, p: f64, q: f64) -> f64 {
    if x > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if x == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if q == 0.0 {
        return if x == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if x == 0 {
        if n == 0 {
            return 0.0;
        }
        return if p < 0.1 {
            -binomial_deviance(nf, nf * q) - nf * p
        } else {
            nf * q.ln()
        };
    }
    if x == n {
        return if q < 0.1 {
            -binomial_deviance(nf, nf * p) - nf * q
        } else {
            nf * p.ln()
        };
    }
    let xf = x as f64;
    let lc = stirling_error(n)
        - stirling_error(x)
        - stirling_error(n - x)
        - binomial_deviance(xf, nf * p)
        - binomial_deviance(nf - xf, nf * q);
    let lf = (2.0 * PI).ln() + xf.ln() + (-xf / nf).ln_1p();
    lc - 0.5 * lf
}

/// Binomial probability `C(n, x) p^x q^(n-x)`.
pub fn binomial_pmf(x: u64, n: u64, p: f64, q: f64) -> f64 {
    ln_binomial_pmf(x, n, p, q).exp()
}

/// `ln C(n, k)` via the same Stirling remainders (exact to a few ulps).
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n, "ln_binomial: k > n");
    if k == 0 || k == n {
        return 0.0;
    }
    // C(n,k) = pmf(k; n, 1/2) * 2^n
    ln_binomial_pmf(k, n, 0.5, 0.5) + n as f64 * std::f64::consts::LN_2
}

/// `sin` and `cos` with results below `1e-15` in magnitude snapped to exactly
/// zero, so that inputs such as `PI / 2` or `PI` produce exact nodes.
pub fn snapped_sin_cos(x: f64) -> (f64, f64) {
    const SNAP: f64 = 1e-15;
    let (mut s, mut c) = x.sin_cos();
    if s.abs() < SNAP {
        s = 0.0;
        c = c.signum();
    }
    if c.abs() < SNAP {
        c = 0.0;
        s = s.signum();
    }
    (s, c)
}

/// `n * theta` reduced to `(-pi, pi]`, with the product formed exactly via
/// FMA and the reduction done against a two-word `2 pi`.
pub fn reduced_phase(n: f64, theta: f64) -> f64 {
    const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;
    let hi = n * theta;
    let lo = n.mul_add(theta, -hi);
    let turns = (hi / TAU).round();
    if turns == 0.0 {
        return hi + lo;
    }
    let a = turns.mul_add(-TAU, hi);
    let r = a - turns * TAU_LO + lo;
    if r > PI {
        r - TAU
    } else if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Sum of a slice by pairwise recursion; order-independent to within the
/// usual `O(eps log n)` bound and deterministic for a fixed slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_binomial(n: u64, k: u64) -> f64 {
        let k = k.min(n - k);
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn stirling_error_matches_table_boundary() {
        // series branch at n = 16 against ln(16!) - Stirling
        let ln_fact: f64 = (1..=16).map(|i| (i as f64).ln()).sum();
        let n = 16.0f64;
        let expect = ln_fact - (0.5 * (2.0 * PI * n).ln() + n * n.ln() - n);
        assert!((stirling_error(16) - expect).abs() < 1e-14);
    }

    #[test]
    fn pmf_sums_to_one() {
        for &n in &[1u64, 7, 40, 513, 20_000] {
            let p = 0.3;
            let total: f64 = (0..=n).map(|x| binomial_pmf(x, n, p, 1.0 - p)).sum();
            assert!((total - 1.0).abs() < 1e-13, "n={n} total={total}");
        }
    }

    #[test]
    fn ln_binomial_agrees_with_product_formula() {
        for n in [10u64, 60, 200] {
            for k in 0..=n {
                let direct = direct_binomial(n, k).ln();
                assert!((ln_binomial(n, k) - direct).abs() < 1e-12 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn snapping_produces_exact_nodes() {
        assert_eq!(snapped_sin_cos(PI / 2.0), (1.0, 0.0));
        assert_eq!(snapped_sin_cos(PI), (0.0, -1.0));
        assert_eq!(snapped_sin_cos(0.0), (0.0, 1.0));
    }

    #[test]
    fn reduced_phase_stays_accurate_for_large_multipliers() {
        let theta = 0.123_456_789_f64;
        let n = 19_999_999.0;
        let r = reduced_phase(n, theta);
        // reference from exact rational reduction via repeated small steps
        let (s, c) = r.sin_cos();
        let (s_ref, c_ref) = (n * theta).sin_cos();
        assert!((s - s_ref).abs() < 1e-8 && (c - c_ref).abs() < 1e-8);
        assert!(r > -PI && r <= PI);
    }
}
