//! Domain types for spectra, couplings, probe preparation and Dicke-basis
//! states, plus the coherent-state (Wigner top-row) amplitudes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::{ln_binomial_pmf, snapped_sin_cos};
use crate::{Error, Result};

/// Total spin `J`, stored as the integer `2J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Spin(u64);

impl Spin {
    pub fn from_two_j(two_j: u64) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidSpin(two_j));
        }
        Ok(Spin(two_j))
    }

    /// Rounds `j` to the nearest half-integer.
    pub fn from_j(j: f64) -> Result<Self> {
        if !j.is_finite() || j < 0.25 {
            return Err(Error::InvalidParameter(format!(
                "J = {j} does not round to a half-integer >= 1/2"
            )));
        }
        Spin::from_two_j((2.0 * j).round() as u64)
    }

    /// Spin of the symmetric subspace of `n` qubits.
    pub fn from_qubits(n: u64) -> Result<Self> {
        Spin::from_two_j(n)
    }

    pub fn two_j(self) -> u64 {
        self.0
    }

    pub fn j(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Hilbert-space dimension `2J + 1`.
    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// Magnetic quantum number for basis index `i` (`m = -J + i`).
    pub fn m(self, index: usize) -> f64 {
        index as f64 - self.j()
    }

    /// All `m` values in ascending order.
    pub fn ms(self) -> impl Iterator<Item = f64> {
        let j = self.j();
        (0..self.dim()).map(move |i| i as f64 - j)
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Distinct eigenvalues of the single-body operator `h`, sorted ascending.
///
/// Repeated eigenvalues collapse to one level; every quantity in the crate
/// depends only on which levels exist, not on their degeneracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleBodySpectrum {
    levels: Vec<f64>,
}

impl SingleBodySpectrum {
    pub fn new(eigenvalues: &[f64]) -> Result<Self> {
        spectrum_stats(eigenvalues)
    }

    /// The qubit spectrum `{-1/2, +1/2}` of `h = Z/2`.
    pub fn qubit() -> Self {
        SingleBodySpectrum {
            levels: vec![-0.5, 0.5],
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn lambda_max(&self) -> f64 {
        *self.levels.last().expect("non-empty")
    }

    pub fn lambda_min(&self) -> f64 {
        self.levels[0]
    }

    /// Semi-norm `lambda_max - lambda_min`.
    pub fn seminorm(&self) -> f64 {
        self.lambda_max() - self.lambda_min()
    }

    /// Midpoint of the extreme eigenvalues.
    pub fn mean(&self) -> f64 {
        (self.lambda_max() + self.lambda_min()) / 2.0
    }

    /// `max(|lambda_max|, |lambda_min|)`.
    pub fn abs_max(&self) -> f64 {
        self.lambda_max().abs().max(self.lambda_min().abs())
    }

    pub fn is_two_level(&self) -> bool {
        self.levels.len() == 2
    }

    pub fn is_symmetric(&self) -> bool {
        self.lambda_min() == -self.lambda_max()
    }
}

/// Builds a [`SingleBodySpectrum`] from raw eigenvalues.
pub fn spectrum_stats(eigenvalues: &[f64]) -> Result<SingleBodySpectrum> {
    if eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateSpectrum);
    }
    let mut levels = eigenvalues.to_vec();
    levels.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    levels.dedup();
    if levels.len() < 2 {
        return Err(Error::DegenerateSpectrum);
    }
    Ok(SingleBodySpectrum { levels })
}

/// Degree and size of the collective coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub k: u32,
    pub n: u64,
    /// `true` for `(sum h_j)^k`, `false` for the sum over distinct tuples only.
    pub self_interactions: bool,
}

impl CouplingSpec {
    pub fn new(k: u32, n: u64, self_interactions: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidCoupling("k must be at least 1".into()));
        }
        if n < k as u64 {
            return Err(Error::InvalidCoupling(format!(
                "n = {n} is smaller than k = {k}"
            )));
        }
        Ok(CouplingSpec {
            k,
            n,
            self_interactions,
        })
    }
}

/// Product-state preparation: every constituent rotated by `beta` about `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentPreparation {
    pub spin: Spin,
    pub beta: f64,
    /// Relative phases per constituent; empty means all zero.
    pub phases: Vec<f64>,
}

impl CoherentPreparation {
    pub fn new(spin: Spin, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} is not finite"
            )));
        }
        Ok(CoherentPreparation {
            spin,
            beta,
            phases: Vec::new(),
        })
    }

    pub fn with_phases(mut self, phases: Vec<f64>) -> Self {
        self.phases = phases;
        self
    }

    /// True when every constituent has zero relative phase, i.e. the state lies
    /// in the symmetric subspace.
    pub fn is_symmetric(&self) -> bool {
        self.phases.iter().all(|&p| p == 0.0)
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        coherent_amplitudes(self.spin, self.beta)
    }
}

/// Pure state of the symmetric subspace in the `|J, m>` basis, `m` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    spin: Spin,
    amplitudes: Vec<Complex64>,
}

impl DickeState {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(spin: Spin, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != spin.dim() {
            return Err(Error::InvalidParameter(format!(
                "expected {} amplitudes for J = {spin}, got {}",
                spin.dim(),
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "state norm {norm} differs from 1"
            )));
        }
        Ok(DickeState { spin, amplitudes })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Coupling constant, evolution time and trial count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentClock {
    pub gamma: f64,
    pub t: f64,
    pub nu: u64,
}

impl ExperimentClock {
    pub fn new(gamma: f64, t: f64, nu: u64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "evolution time t = {t} must be positive"
            )));
        }
        if nu == 0 {
            return Err(Error::InvalidParameter(
                "trial count nu must be at least 1".into(),
            ));
        }
        Ok(ExperimentClock { gamma, t, nu })
    }

    /// Dimensionless phase `gamma * t`.
    pub fn phi(&self) -> f64 {
        self.gamma * self.t
    }
}

/// Reduced Wigner rotation-matrix column `d^J_{m,J}(beta)` for `m = -J..J`.
///
/// The squares are a binomial distribution with success probability
/// `cos^2(beta/2)`, so each amplitude is the square root of a binomial
/// probability evaluated in log space, with the sign of
/// `cos(beta/2)^(J+m) sin(beta/2)^(J-m)` restored afterwards.
pub fn coherent_amplitudes(spin: Spin, beta: f64) -> Vec<f64> {
    let two_j = spin.two_j();
    let (sh, ch) = snapped_sin_cos(beta / 2.0);
    let mut out = vec![0.0; spin.dim()];
    if sh == 0.0 {
        out[two_j as usize] = parity_sign(ch, two_j);
        return out;
    }
    if ch == 0.0 {
        out[0] = parity_sign(sh, two_j);
        return out;
    }
    let (p, q) = (ch * ch, sh * sh);
    for (i, slot) in out.iter_mut().enumerate() {
        let i = i as u64;
        let magnitude = (0.5 * ln_binomial_pmf(i, two_j, p, q)).exp();
        *slot = magnitude * parity_sign(ch, i) * parity_sign(sh, two_j - i);
    }
    out
}

fn parity_sign(x: f64, power: u64) -> f64 {
    if x < 0.0 && power % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Direct evaluation of the amplitude formula with a product-form binomial.
    fn direct_amplitudes(two_j: u64, beta: f64) -> Vec<f64> {
        let (s, c) = (beta / 2.0).sin_cos();
        (0..=two_j)
            .map(|i| {
                let k = i.min(two_j - i);
                let binom = (0..k).fold(1.0, |acc, t| acc * (two_j - t) as f64 / (t + 1) as f64);
                binom.sqrt() * c.powi(i as i32) * s.powi((two_j - i) as i32)
            })
            .collect()
    }

    #[test]
    fn spin_half_equal_superposition() {
        let d = coherent_amplitudes(Spin::from_two_j(1).unwrap(), PI / 2.0);
        assert!((d[0] - 0.707_106_78).abs() < 1e-8);
        assert!((d[1] - 0.707_106_78).abs() < 1e-8);
    }

    #[test]
    fn spin_one_at_sixty_degrees() {
        let d = coherent_amplitudes(Spin::from_two_j(2).unwrap(), PI / 3.0);
        // ordered m = -1, 0, 1
        assert!((d[2] - 0.75).abs() < 1e-12);
        assert!((d[1] - 0.612_372_44).abs() < 1e-8);
        assert!((d[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn poles_are_exact_deltas() {
        let spin = Spin::from_two_j(7).unwrap();
        let north = coherent_amplitudes(spin, 0.0);
        assert_eq!(north[7], 1.0);
        assert!(north[..7].iter().all(|&v| v == 0.0));
        let south = coherent_amplitudes(spin, PI);
        assert_eq!(south[0], 1.0);
        assert!(south[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn large_spin_is_normalized() {
        for &two_j in &[100u64, 2_000, 20_000] {
            for b in 0..50 {
                let beta = (b as f64 + 0.5) * PI / 50.0;
                let d = coherent_amplitudes(Spin::from_two_j(two_j).unwrap(), beta);
                let norm: f64 = d.iter().map(|x| x * x).sum();
                assert!(
                    (norm - 1.0).abs() < 1e-12,
                    "2J={two_j} beta={beta} norm={norm}"
                );
            }
        }
    }

    #[test]
    fn log_space_matches_direct_evaluation() {
        for two_j in [1u64, 2, 5, 17, 64, 121, 200] {
            for b in 0..25 {
                let beta = 0.05 + b as f64 * 0.125;
                let fast = coherent_amplitudes(Spin::from_two_j(two_j).unwrap(), beta);
                let slow = direct_amplitudes(two_j, beta);
                for (x, y) in fast.iter().zip(&slow) {
                    if y.abs() > 1e-290 {
                        assert!(
                            (x - y).abs() <= 1e-12 * y.abs(),
                            "2J={two_j} beta={beta}: {x} vs {y}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn negative_amplitudes_outside_zero_pi() {
        let beta = 1.5 * PI;
        let d = coherent_amplitudes(Spin::from_two_j(3).unwrap(), beta);
        let slow = direct_amplitudes(3, beta);
        for (x, y) in d.iter().zip(&slow) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(d.iter().any(|&v| v < 0.0));
    }

    #[test]
    fn spectrum_stats_examples() {
        let s = spectrum_stats(&[0.5, -0.5]).unwrap();
        assert_eq!(s.seminorm(), 1.0);
        assert_eq!(s.mean(), 0.0);
        let s = spectrum_stats(&[0.0, 1.0]).unwrap();
        assert_eq!((s.seminorm(), s.mean()), (1.0, 0.5));
        let s = spectrum_stats(&[-0.3, 0.1, 0.7]).unwrap();
        assert_eq!((s.lambda_max(), s.lambda_min()), (0.7, -0.3));
        assert!((s.seminorm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_spectrum_rejected() {
        assert_eq!(spectrum_stats(&[0.2, 0.2]), Err(Error::DegenerateSpectrum));
        assert_eq!(spectrum_stats(&[1.0]), Err(Error::DegenerateSpectrum));
        assert_eq!(
            spectrum_stats(&[f64::NAN, 1.0]),
            Err(Error::DegenerateSpectrum)
        );
    }

    #[test]
    fn coupling_requires_n_at_least_k() {
        assert!(CouplingSpec::new(3, 2, true).is_err());
        assert!(CouplingSpec::new(0, 2, true).is_err());
        assert!(CouplingSpec::new(2, 2, false).is_ok());
    }

    #[test]
    fn spin_rounding_and_display() {
        assert_eq!(Spin::from_j(2.0246).unwrap().two_j(), 4);
        assert_eq!(Spin::from_j(1e4).unwrap().two_j(), 20_000);
        assert_eq!(Spin::from_two_j(3).unwrap().to_string(), "3/2");
        assert!(Spin::from_j(0.1).is_err());
    }

    proptest! {
        #[test]
        fn normalization_holds(two_j in 1u64..=20_000, beta in 0.0f64..PI) {
            let d = coherent_amplitudes(Spin::from_two_j(two_j).unwrap(), beta);
            let norm: f64 = d.iter().map(|x| x * x).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }

        #[test]
        fn reflection_symmetry(two_j in 1u64..=400, beta in 0.05f64..(PI - 0.05)) {
            // pi - beta is itself rounded, which perturbs high powers of
            // sin(beta/2) by a few parts in 1e12.
            let spin = Spin::from_two_j(two_j).unwrap();
            let a = coherent_amplitudes(spin, beta);
            let b = coherent_amplitudes(spin, PI - beta);
            for i in 0..spin.dim() {
                let (x, y) = (a[i], b[spin.dim() - 1 - i]);
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(y.abs()).max(1e-300));
            }
        }
    }
}
