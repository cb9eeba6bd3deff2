//! The separable set: coherent spin states and their mixtures.
//!
//! A separable state of `N` bosons in two modes is a mixture of coherent
//! spin states `|z, phi; N>`, all particles sharing one single-particle
//! state. The mixing measure is realized here as a finite list of
//! nonnegative weights, so positivity of the P-function holds by
//! construction for every representable ensemble.

mod search;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::fock::{check_weights, FockVector, GeneratorSpec, NumberSectorMixture, SectorDensity};
use crate::linalg::CMatrix;
use crate::special::{ln_binomial, ln_falling_factorial};
use crate::witnesses::{qfi_low_rank, CorrelationIntegrals};
use crate::{Error, Result};

pub use search::{maximize_witness, maximize_witness_with, EnsembleObjective, SearchConfig, SearchOutcome, WitnessObjective};

/// `|z, phi; N>`: every particle in `sqrt(z) e^{i phi} |a> + sqrt(1-z) |b>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherentSpinState {
    pub z: f64,
    pub phi: f64,
    pub n_total: usize,
}

impl CoherentSpinState {
    pub fn new(z: f64, phi: f64, n_total: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidParameter(format!("imbalance z = {z} is outside [0, 1]")));
        }
        if !(-PI..=PI).contains(&phi) {
            return Err(Error::InvalidParameter(format!("phase phi = {phi} is outside [-pi, pi]")));
        }
        Ok(Self { z, phi, n_total })
    }

    /// Single-particle amplitudes `(sqrt(z) e^{i phi}, sqrt(1 - z))` on modes `(a, b)`.
    pub fn single_particle(&self) -> [Complex64; 2] {
        [Complex64::from_polar(self.z.sqrt(), self.phi), Complex64::new((1.0 - self.z).sqrt(), 0.0)]
    }

    /// Amplitude of `|k, N-k>` is `sqrt(C(N,k)) z^{k/2} (1-z)^{(N-k)/2} e^{i k phi}`.
    pub fn to_fock(&self) -> FockVector {
        let n = self.n_total;
        let ln_z = self.z.ln();
        let ln_1mz = (1.0 - self.z).ln();
        let amplitudes = (0..=n)
            .map(|k| {
                let a_part = if k == 0 { 0.0 } else { k as f64 * ln_z };
                let b_part = if k == n { 0.0 } else { (n - k) as f64 * ln_1mz };
                let ln_mag = 0.5 * (ln_binomial(n as u64, k as u64) + a_part + b_part);
                // k * phi reduced to keep the phase accurate for large k
                let phase = (k as f64 * self.phi) % (2.0 * PI);
                Complex64::from_polar(ln_mag.exp(), phase)
            })
            .collect();
        FockVector::from_unnormalized(amplitudes).expect("coherent spin state has unit mass")
    }
}

/// Closed-form first and second spin moments of a separable state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub jx_mean: f64,
    pub jy_mean: f64,
    pub jz_mean: f64,
    pub jz_variance: f64,
    /// `<N>`
    pub n_mean: f64,
}

impl SpinMoments {
    /// Accumulates `prob * |z, phi; N><z, phi; N|` contributions. Uses
    /// `<J_x> - i <J_y> = N sqrt(z(1-z)) e^{-i phi}`, `<J_z> = N (z - 1/2)` and
    /// `<J_z^2> = N/4 + N(N-1)(z - 1/2)^2`.
    fn from_weighted<'a>(items: impl Iterator<Item = (f64, &'a CoherentSpinState)>) -> Self {
        let (mut jx, mut jy, mut jz, mut jz2, mut n_mean) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (w, s) in items {
            let n = s.n_total as f64;
            let amp = n * (s.z * (1.0 - s.z)).sqrt();
            let dz = s.z - 0.5;
            jx += w * amp * s.phi.cos();
            jy -= w * amp * s.phi.sin();
            jz += w * n * dz;
            jz2 += w * (0.25 * n + n * (n - 1.0) * dz * dz);
            n_mean += w * n;
        }
        Self { jx_mean: jx, jy_mean: jy, jz_mean: jz, jz_variance: jz2 - jz * jz, n_mean }
    }
}

/// Finite P-function over coherent spin states of one sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableEnsemble {
    n_total: usize,
    components: Vec<(f64, CoherentSpinState)>,
}

impl SeparableEnsemble {
    pub fn new(n_total: usize, components: Vec<(f64, CoherentSpinState)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidState("ensemble has no components".into()));
        }
        check_weights(components.iter().map(|(w, _)| *w))?;
        if let Some((_, s)) = components.iter().find(|(_, s)| s.n_total != n_total) {
            return Err(Error::InvalidState(format!(
                "component with N = {} in an ensemble of N = {n_total}",
                s.n_total
            )));
        }
        Ok(Self { n_total, components })
    }

    pub fn single(state: CoherentSpinState) -> Self {
        Self { n_total: state.n_total, components: vec![(1.0, state)] }
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn components(&self) -> &[(f64, CoherentSpinState)] {
        &self.components
    }

    /// `sum_k w_k |z_k, phi_k; N><z_k, phi_k; N|`
    pub fn to_density(&self, n_max: usize) -> Result<SectorDensity> {
        if self.n_total > n_max {
            return Err(Error::SectorTooLarge { n_total: self.n_total, n_max });
        }
        let dim = self.n_total + 1;
        let mut matrix = CMatrix::zeros(dim);
        for (w, s) in &self.components {
            let psi = s.to_fock();
            let amps = psi.amplitudes();
            for i in 0..dim {
                let wi = amps[i] * *w;
                for j in 0..dim {
                    matrix[(i, j)] += wi * amps[j].conj();
                }
            }
        }
        Ok(SectorDensity::from_matrix_unchecked(matrix))
    }

    pub fn analytic_spin_moments(&self) -> SpinMoments {
        SpinMoments::from_weighted(self.components.iter().map(|(w, s)| (*w, s)))
    }

    /// Quantum Fisher information for each generator, from the rank-`k`
    /// decomposition; no sector-size cap applies.
    pub fn qfi_many(&self, generators: &[GeneratorSpec]) -> Result<Vec<f64>> {
        let comps: Vec<(f64, FockVector)> = self.components.iter().map(|(w, s)| (*w, s.to_fock())).collect();
        qfi_low_rank(&comps, generators)
    }

    /// Order-`2m` correlation integrals with the modes taken as the two
    /// regions: `alpha * sum w z^{2m}`, `alpha * sum w (1-z)^{2m}` and
    /// `alpha * sum w z^m (1-z)^m` with `alpha = N!/(N-2m)!`.
    pub fn analytic_correlations(&self, m: usize) -> CorrelationIntegrals {
        let (mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0);
        for (w, s) in &self.components {
            let fa = s.z.powi(m as i32);
            let fb = (1.0 - s.z).powi(m as i32);
            aa += w * fa * fa;
            bb += w * fb * fb;
            ab += w * fa * fb;
        }
        let alpha = prefactor_alpha(self.n_total, m);
        CorrelationIntegrals { order_m: m, g_aa: alpha * aa, g_bb: alpha * bb, g_ab: alpha * ab, prefactor_alpha: alpha }
    }
}

/// `alpha_{2m} = N!/(N-2m)!`, zero when `2m > N`.
pub fn prefactor_alpha(n_total: usize, m: usize) -> f64 {
    if 2 * m > n_total {
        0.0
    } else {
        ln_falling_factorial(n_total as u64, 2 * m as u64).exp()
    }
}

/// Probability distribution of the total particle number.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NumberDistribution {
    Deterministic { n: usize },
    /// Truncated to the smallest central window holding `1 - 1e-12` of the mass.
    Poisson { mean: f64 },
    Binomial { n: usize, p: f64 },
}

/// Probability mass that truncated distributions are allowed to drop.
pub const TRUNCATION_MASS: f64 = 1e-12;

impl NumberDistribution {
    /// `(N, p_N)` pairs ascending in `N`, renormalized after truncation.
    pub fn weights(&self) -> Result<Vec<(usize, f64)>> {
        match *self {
            NumberDistribution::Deterministic { n } => Ok(vec![(n, 1.0)]),
            NumberDistribution::Poisson { mean } => {
                if !(mean > 0.0) || !mean.is_finite() {
                    return Err(Error::InvalidParameter(format!("Poisson mean {mean} must be positive")));
                }
                let ln_pmf = |k: usize| k as f64 * mean.ln() - mean - crate::special::ln_factorial(k as u64);
                // grow a window around the mode until it holds enough mass
                let mode = mean.floor() as usize;
                let (mut lo, mut hi) = (mode, mode);
                let mut mass = ln_pmf(mode).exp();
                while mass < 1.0 - TRUNCATION_MASS {
                    let left = if lo > 0 { ln_pmf(lo - 1).exp() } else { -1.0 };
                    let right = ln_pmf(hi + 1).exp();
                    if left >= right {
                        lo -= 1;
                        mass += left;
                    } else {
                        hi += 1;
                        mass += right;
                    }
                }
                Ok((lo..=hi).map(|k| (k, ln_pmf(k).exp() / mass)).collect())
            }
            NumberDistribution::Binomial { n, p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!("binomial p = {p} is outside [0, 1]")));
                }
                let pmf: Vec<(usize, f64)> = (0..=n)
                    .map(|k| {
                        let ln_a = if k == 0 { 0.0 } else { k as f64 * p.ln() };
                        let ln_b = if k == n { 0.0 } else { (n - k) as f64 * (1.0 - p).ln() };
                        (k, (ln_binomial(n as u64, k as u64) + ln_a + ln_b).exp())
                    })
                    .filter(|(_, w)| *w > 0.0)
                    .collect();
                let total: f64 = pmf.iter().map(|(_, w)| w).sum();
                Ok(pmf.into_iter().map(|(k, w)| (k, w / total)).collect())
            }
        }
    }
}

/// Separable state with a fluctuating number of particles: a separable
/// ensemble in each number sector, mixed with probabilities `p_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluctuatingEnsemble {
    number_weights: Vec<(usize, f64)>,
    per_sector: BTreeMap<usize, SeparableEnsemble>,
}

impl FluctuatingEnsemble {
    pub fn new(number_weights: Vec<(usize, f64)>, per_sector: BTreeMap<usize, SeparableEnsemble>) -> Result<Self> {
        if number_weights.is_empty() {
            return Err(Error::InvalidState("no number sectors".into()));
        }
        check_weights(number_weights.iter().map(|(_, p)| *p))?;
        for (n, _) in &number_weights {
            match per_sector.get(n) {
                Some(e) if e.n_total == *n => {}
                _ => return Err(Error::InvalidState(format!("no separable ensemble for sector N = {n}"))),
            }
        }
        let mut number_weights = number_weights;
        number_weights.sort_by_key(|(n, _)| *n);
        if number_weights.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidState("number sectors must be distinct".into()));
        }
        let per_sector = per_sector.into_iter().filter(|(n, _)| number_weights.iter().any(|(m, _)| m == n)).collect();
        Ok(Self { number_weights, per_sector })
    }

    /// Builds the per-sector ensembles from `sector(N)`.
    pub fn from_distribution(
        distribution: &NumberDistribution,
        mut sector: impl FnMut(usize) -> Result<SeparableEnsemble>,
    ) -> Result<Self> {
        let number_weights = distribution.weights()?;
        let per_sector = number_weights.iter().map(|(n, _)| Ok((*n, sector(*n)?))).collect::<Result<_>>()?;
        Self::new(number_weights, per_sector)
    }

    pub fn number_weights(&self) -> &[(usize, f64)] {
        &self.number_weights
    }

    pub fn sector(&self, n_total: usize) -> Option<&SeparableEnsemble> {
        self.per_sector.get(&n_total)
    }

    /// `(p_N, ensemble_N)` ascending in `N`.
    pub fn sectors(&self) -> impl Iterator<Item = (f64, &SeparableEnsemble)> {
        self.number_weights.iter().map(|(n, p)| (*p, &self.per_sector[n]))
    }

    pub fn mean_number(&self) -> f64 {
        self.number_weights.iter().map(|(n, p)| *n as f64 * p).sum()
    }

    pub fn to_mixture(&self, n_max: usize) -> Result<NumberSectorMixture> {
        let sectors = self.sectors().map(|(p, e)| Ok((p, e.to_density(n_max)?))).collect::<Result<Vec<_>>>()?;
        NumberSectorMixture::new(sectors)
    }

    /// Spin moments of the full mixture, summed sector by sector. When every
    /// sector shares one P-function this reduces to `<J_x> = <N> ...` and
    /// `Var J_z = <N>/4 + (<N^2> - <N>) E[(z-1/2)^2] - <N>^2 E[z-1/2]^2`.
    pub fn analytic_spin_moments(&self) -> SpinMoments {
        SpinMoments::from_weighted(
            self.sectors().flat_map(|(p, e)| e.components.iter().map(move |(w, s)| (p * w, s))),
        )
    }

    /// `sum_N p_N F_Q[rho_N]` for each generator.
    pub fn qfi_many(&self, generators: &[GeneratorSpec]) -> Result<Vec<f64>> {
        let mut total = vec![0.0; generators.len()];
        for (p, e) in self.sectors() {
            for (t, f) in total.iter_mut().zip(e.qfi_many(generators)?) {
                *t += p * f;
            }
        }
        Ok(total)
    }

    /// Correlation integrals of the mixture: the `p_N`-weighted sum of the
    /// per-sector integrals.
    pub fn analytic_correlations(&self, m: usize) -> CorrelationIntegrals {
        let mut total = CorrelationIntegrals { order_m: m, g_aa: 0.0, g_bb: 0.0, g_ab: 0.0, prefactor_alpha: 0.0 };
        for (p, e) in self.sectors() {
            let c = e.analytic_correlations(m);
            total.g_aa += p * c.g_aa;
            total.g_bb += p * c.g_bb;
            total.g_ab += p * c.g_ab;
            total.prefactor_alpha += p * c.prefactor_alpha;
        }
        total
    }
}

/// Random ensemble: `z ~ U[0,1]`, `phi ~ U[-pi,pi]`, flat Dirichlet weights.
pub fn sample_ensemble_with(rng: &mut impl Rng, n_total: usize, n_components: usize) -> SeparableEnsemble {
    let n_components = n_components.max(1);
    let raw: Vec<f64> = (0..n_components).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let components = raw
        .into_iter()
        .map(|w| {
            let z = rng.gen_range(0.0..=1.0);
            let phi = rng.gen_range(-PI..=PI);
            (w / total, CoherentSpinState { z, phi, n_total })
        })
        .collect();
    let mut e = SeparableEnsemble { n_total, components };
    if n_components == 1 {
        e.components[0].0 = 1.0;
    }
    e
}

/// Seeded [`sample_ensemble_with`] on a ChaCha8 stream.
pub fn sample_ensemble(seed: u64, n_total: usize, n_components: usize) -> SeparableEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_ensemble_with(&mut rng, n_total, n_components)
}

/// Random fluctuating ensemble: `1..=max_components` components per sector.
pub fn sample_fluctuating_with(
    rng: &mut impl Rng,
    distribution: &NumberDistribution,
    max_components: usize,
) -> Result<FluctuatingEnsemble> {
    FluctuatingEnsemble::from_distribution(distribution, |n| {
        let k = rng.gen_range(1..=max_components.max(1));
        Ok(sample_ensemble_with(rng, n, k))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{GeneratorSpec, TwoModeState};

    /// Binomial expansion of (sqrt z e^{i phi} a^dag + sqrt(1-z) b^dag)^N |0> / sqrt(N!)
    fn oracle_css(z: f64, phi: f64, n: usize) -> Vec<Complex64> {
        let fact = |k: usize| (1..=k).map(|j| j as f64).product::<f64>();
        (0..=n)
            .map(|k| {
                let binom = fact(n) / (fact(k) * fact(n - k));
                // (a^dag)^k (b^dag)^{n-k} |0> = sqrt(k! (n-k)!) |k, n-k>
                let coeff = binom * (fact(k) * fact(n - k)).sqrt() / fact(n).sqrt();
                Complex64::from_polar(coeff * z.sqrt().powi(k as i32) * (1.0 - z).sqrt().powi((n - k) as i32), k as f64 * phi)
            })
            .collect()
    }

    #[test]
    fn css_amplitudes() {
        let psi = CoherentSpinState::new(0.5, 0.0, 2).unwrap().to_fock();
        let expected = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (a, e) in psi.amplitudes().iter().zip(expected) {
            assert!((a - Complex64::new(e, 0.0)).norm() < 1e-15);
        }
        let full = CoherentSpinState::new(1.0, 0.7, 5).unwrap().to_fock();
        assert!((full.amplitudes()[5] - Complex64::from_polar(1.0, 3.5)).norm() < 1e-14);
        assert!(full.amplitudes()[..5].iter().all(|c| c.norm() == 0.0));
        let empty = CoherentSpinState::new(0.0, 0.7, 5).unwrap().to_fock();
        assert!((empty.amplitudes()[0].re - 1.0).abs() < 1e-15);
        for (z, phi, n) in [(0.3, 1.1, 12), (0.9, -2.0, 7)] {
            let psi = CoherentSpinState::new(z, phi, n).unwrap().to_fock();
            for (a, e) in psi.amplitudes().iter().zip(oracle_css(z, phi, n)) {
                assert!((a - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn css_ladder_relations() {
        // a|z,phi;N> = sqrt(N z) e^{i phi} |z,phi;N-1>
        let s = CoherentSpinState::new(0.35, 0.8, 9).unwrap();
        let psi = s.to_fock();
        let lower = CoherentSpinState { n_total: 8, ..s }.to_fock();
        let a_psi = crate::fock::annihilate(psi.amplitudes(), 1, 0).unwrap();
        let b_psi = crate::fock::annihilate(psi.amplitudes(), 0, 1).unwrap();
        let fa = Complex64::from_polar((9.0 * 0.35f64).sqrt(), 0.8);
        let fb = (9.0 * 0.65f64).sqrt();
        for k in 0..=8 {
            assert!((a_psi[k] - fa * lower.amplitudes()[k]).norm() < 1e-12);
            assert!((b_psi[k] - fb * lower.amplitudes()[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn css_number_mean() {
        let psi = CoherentSpinState::new(0.3, 0.0, 50).unwrap().to_fock();
        assert!((psi.normally_ordered_moment(1, 0, 0, 1).re - 15.0).abs() < 1e-9);
        // very large N stays normalized
        let big = CoherentSpinState::new(0.4, 2.5, 200_000).unwrap().to_fock();
        assert!((big.norm_sqr() - 1.0).abs() < 1e-12);
        let (mean, var) = big.angular_moments(&GeneratorSpec::z());
        assert!((mean - 200_000.0 * -0.1).abs() < 1e-6);
        assert!((var - 200_000.0 * 0.24).abs() < 1e-6);
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(CoherentSpinState::new(1.2, 0.0, 3).is_err());
        assert!(CoherentSpinState::new(0.2, 4.0, 3).is_err());
        assert!(CoherentSpinState::new(f64::NAN, 0.0, 3).is_err());
        let s = CoherentSpinState::new(0.2, 0.0, 3).unwrap();
        assert!(SeparableEnsemble::new(4, vec![(1.0, s)]).is_err());
        assert!(SeparableEnsemble::new(3, vec![(0.5, s)]).is_err());
        assert!(SeparableEnsemble::new(3, vec![]).is_err());
    }

    #[test]
    fn density_of_orthogonal_components() {
        let e = SeparableEnsemble::new(
            3,
            vec![(0.5, CoherentSpinState::new(0.0, 0.0, 3).unwrap()), (0.5, CoherentSpinState::new(1.0, 0.0, 3).unwrap())],
        )
        .unwrap();
        let rho = e.to_density(crate::DEFAULT_N_MAX).unwrap();
        let expected = CMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
        assert!(matches!(e.to_density(2), Err(Error::SectorTooLarge { n_total: 3, n_max: 2 })));
    }

    #[test]
    fn single_component_density_is_projector() {
        let s = CoherentSpinState::new(0.4, -1.0, 6).unwrap();
        let rho = SeparableEnsemble::single(s).to_density(10).unwrap();
        assert!(rho.matrix().max_abs_diff(s.to_fock().to_density().matrix()) < 1e-15);
    }

    #[test]
    fn analytic_moments_single_component() {
        let m = SeparableEnsemble::single(CoherentSpinState::new(0.5, 0.0, 10).unwrap()).analytic_spin_moments();
        assert!((m.jx_mean - 5.0).abs() < 1e-14);
        assert!(m.jy_mean.abs() < 1e-14);
        assert!((m.jz_variance - 2.5).abs() < 1e-14);
        let m = SeparableEnsemble::single(CoherentSpinState::new(0.3, 0.0, 50).unwrap()).analytic_spin_moments();
        assert!((m.jz_variance - 10.5).abs() < 1e-12);
    }

    #[test]
    fn analytic_moments_match_density_path() {
        for seed in 0..20 {
            let e = sample_ensemble(seed, 12, 1 + seed as usize % 5);
            let rho = e.to_density(crate::DEFAULT_N_MAX).unwrap();
            let m = e.analytic_spin_moments();
            let (jx, _) = rho.angular_moments(&GeneratorSpec::x());
            let (jy, _) = rho.angular_moments(&GeneratorSpec::y());
            let (jz, vz) = rho.angular_moments(&GeneratorSpec::z());
            assert!((m.jx_mean - jx).abs() < 1e-9);
            assert!((m.jy_mean - jy).abs() < 1e-9);
            assert!((m.jz_mean - jz).abs() < 1e-9);
            assert!((m.jz_variance - vz).abs() < 1e-9);
            // linearity: density expectation = weighted pure expectations
            let weighted: f64 = e
                .components()
                .iter()
                .map(|(w, s)| w * s.to_fock().angular_moments(&GeneratorSpec::z()).0)
                .sum();
            assert!((weighted - jz).abs() < 1e-10);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_uniform() {
        assert_eq!(sample_ensemble(42, 10, 4), sample_ensemble(42, 10, 4));
        assert_ne!(sample_ensemble(42, 10, 4), sample_ensemble(43, 10, 4));
        let single = sample_ensemble(1, 10, 1);
        assert_eq!(single.components().len(), 1);
        assert_eq!(single.components()[0].0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mean_z: f64 = (0..10_000).map(|_| sample_ensemble_with(&mut rng, 4, 1).components()[0].1.z).sum::<f64>() / 1e4;
        assert!((0.49..=0.51).contains(&mean_z), "{mean_z}");
    }

    #[test]
    fn number_distributions() {
        assert_eq!(NumberDistribution::Deterministic { n: 7 }.weights().unwrap(), vec![(7, 1.0)]);
        let poisson = NumberDistribution::Poisson { mean: 20.0 }.weights().unwrap();
        let total: f64 = poisson.iter().map(|(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        // direct-sum oracle for the truncated mean
        let mut raw = Vec::new();
        let mut pmf = (-20f64).exp();
        for k in 0..200usize {
            if k > 0 {
                pmf *= 20.0 / k as f64;
            }
            raw.push((k, pmf));
        }
        let kept: Vec<(usize, f64)> = raw.iter().copied().filter(|(k, _)| poisson.iter().any(|(j, _)| j == k)).collect();
        let mass: f64 = kept.iter().map(|(_, p)| p).sum();
        let oracle_mean: f64 = kept.iter().map(|(k, p)| *k as f64 * p).sum::<f64>() / mass;
        let mean: f64 = poisson.iter().map(|(k, p)| *k as f64 * p).sum();
        assert!((mean - oracle_mean).abs() < 1e-10);
        assert!((mass - 1.0).abs() <= 1e-12 + 1e-15);
        let binom = NumberDistribution::Binomial { n: 10, p: 0.3 }.weights().unwrap();
        let mean: f64 = binom.iter().map(|(k, p)| *k as f64 * p).sum();
        assert!((mean - 3.0).abs() < 1e-12);
        assert!(NumberDistribution::Poisson { mean: -1.0 }.weights().is_err());
    }

    #[test]
    fn fluctuating_moments_match_mixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = sample_fluctuating_with(&mut rng, &NumberDistribution::Binomial { n: 12, p: 0.5 }, 3).unwrap();
        let mix = e.to_mixture(crate::DEFAULT_N_MAX).unwrap();
        let m = e.analytic_spin_moments();
        assert!((mix.angular_moments(&GeneratorSpec::x()).0 - m.jx_mean).abs() < 1e-9);
        assert!((mix.angular_moments(&GeneratorSpec::y()).0 - m.jy_mean).abs() < 1e-9);
        assert!((mix.angular_moments(&GeneratorSpec::z()).1 - m.jz_variance).abs() < 1e-9);
        assert!((mix.mean_number() - e.mean_number()).abs() < 1e-12);
    }

    #[test]
    fn shared_p_function_reduces_to_number_moments() {
        // Same two-component P in every sector: Var J_z uses <N^2> - <N>.
        let dist = NumberDistribution::Poisson { mean: 6.0 };
        let comps = |n| {
            SeparableEnsemble::new(
                n,
                vec![(0.3, CoherentSpinState { z: 0.2, phi: 0.4, n_total: n }), (0.7, CoherentSpinState { z: 0.7, phi: -1.0, n_total: n })],
            )
        };
        let e = FluctuatingEnsemble::from_distribution(&dist, comps).unwrap();
        let w = dist.weights().unwrap();
        let n1: f64 = w.iter().map(|(n, p)| *n as f64 * p).sum();
        let n2: f64 = w.iter().map(|(n, p)| (*n as f64).powi(2) * p).sum();
        let e1 = 0.3 * (0.2 - 0.5) + 0.7 * (0.7 - 0.5);
        let e2 = 0.3 * (0.2f64 - 0.5).powi(2) + 0.7 * (0.7f64 - 0.5).powi(2);
        let var = n1 / 4.0 + (n2 - n1) * e2 - n1 * n1 * e1 * e1;
        assert!((e.analytic_spin_moments().jz_variance - var).abs() < 1e-10);
    }
}
