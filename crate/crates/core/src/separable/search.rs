//! Random-restart hill climbing over separable ensembles.
//!
//! Used to probe how close separable states get to the bounds of the
//! entanglement witnesses. A probe, not a proof: only finite mixtures of up
//! to `max_components` coherent spin states are explored.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{sample_ensemble_with, CoherentSpinState, SeparableEnsemble};
use crate::fock::GeneratorSpec;
use crate::witnesses::{csi_ratio, spin_squeezing_from_moments};
use crate::Result;

/// A functional to maximize over separable ensembles. `None` marks points
/// where the functional is undefined; they are never accepted.
pub trait EnsembleObjective: Sync {
    fn evaluate(&self, ensemble: &SeparableEnsemble) -> Option<f64>;
}

impl<F> EnsembleObjective for F
where
    F: Fn(&SeparableEnsemble) -> Option<f64> + Sync,
{
    fn evaluate(&self, ensemble: &SeparableEnsemble) -> Option<f64> {
        self(ensemble)
    }
}

/// Built-in witness functionals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessObjective {
    /// Cauchy-Schwarz ratio `C_2m` with the modes as regions.
    Csi { m: usize },
    /// Quantum Fisher information for the generator `J_n`.
    Qfi { generator: GeneratorSpec },
    /// `-xi^2`, so that maximizing searches for spin squeezing.
    NegSpinSqueezing,
}

impl EnsembleObjective for WitnessObjective {
    fn evaluate(&self, ensemble: &SeparableEnsemble) -> Option<f64> {
        match self {
            WitnessObjective::Csi { m } => csi_ratio(&ensemble.analytic_correlations(*m)).ok(),
            WitnessObjective::Qfi { generator } => ensemble.qfi_many(std::slice::from_ref(generator)).ok().map(|v| v[0]),
            WitnessObjective::NegSpinSqueezing => {
                spin_squeezing_from_moments(&ensemble.analytic_spin_moments()).ok().map(|x| -x)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub restarts: usize,
    /// Components of each random starting ensemble are drawn from `1..=max_components`.
    pub max_components: usize,
    pub sigma_z: f64,
    pub sigma_phi: f64,
    pub sigma_weight: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 20, max_components: 4, sigma_z: 0.05, sigma_phi: 0.2, sigma_weight: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_value: f64,
    pub best_ensemble: SeparableEnsemble,
    pub evaluations: usize,
    /// Restart that produced the best value.
    pub best_restart: usize,
}

/// [`maximize_witness_with`] under the default configuration.
pub fn maximize_witness(
    objective: &impl EnsembleObjective,
    n_total: usize,
    budget: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    maximize_witness_with(objective, n_total, budget, seed, &SearchConfig::default())
}

/// Hill climbing with random restarts. `budget` counts objective
/// evaluations over all restarts. Restart `r` draws from ChaCha8 stream `r`
/// of `seed`, so results are reproducible and independent of scheduling.
pub fn maximize_witness_with(
    objective: &impl EnsembleObjective,
    n_total: usize,
    budget: usize,
    seed: u64,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(crate::Error::InvalidParameter("search budget must be at least 1".into()));
    }
    let restarts = config.restarts.clamp(1, budget);
    let per_restart: Vec<usize> = (0..restarts).map(|r| budget / restarts + usize::from(r < budget % restarts)).collect();

    let climb = |r: usize| climb(objective, n_total, per_restart[r], seed, r, config);

    #[cfg(feature = "parallel")]
    let results: Vec<(Option<(f64, SeparableEnsemble)>, usize)> = {
        use rayon::prelude::*;
        (0..restarts).into_par_iter().map(climb).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(Option<(f64, SeparableEnsemble)>, usize)> = (0..restarts).map(climb).collect();

    let evaluations = results.iter().map(|(_, n)| n).sum();
    let mut best: Option<(f64, SeparableEnsemble, usize)> = None;
    for (r, (found, _)) in results.into_iter().enumerate() {
        if let Some((value, ensemble)) = found {
            if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
                best = Some((value, ensemble, r));
            }
        }
    }
    let (best_value, best_ensemble, best_restart) = best.ok_or_else(|| {
        crate::Error::InvalidParameter("objective was undefined at every visited ensemble".into())
    })?;
    Ok(SearchOutcome { best_value, best_ensemble, evaluations, best_restart })
}

fn climb(
    objective: &impl EnsembleObjective,
    n_total: usize,
    budget: usize,
    seed: u64,
    restart: usize,
    config: &SearchConfig,
) -> (Option<(f64, SeparableEnsemble)>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let k = rng.gen_range(1..=config.max_components.max(1));
    let mut current = sample_ensemble_with(&mut rng, n_total, k);
    let mut current_value = objective.evaluate(&current);
    let mut used = 1;
    while used < budget {
        let proposal = perturb(&mut rng, &current, config);
        let value = objective.evaluate(&proposal);
        used += 1;
        if let Some(v) = value {
            if current_value.is_none_or(|c| v >= c) {
                current = proposal;
                current_value = Some(v);
            }
        } else if current_value.is_none() {
            // keep moving until the objective becomes defined
            current = proposal;
        }
    }
    (current_value.map(|v| (v, current)), used)
}

fn perturb(rng: &mut ChaCha8Rng, ensemble: &SeparableEnsemble, config: &SearchConfig) -> SeparableEnsemble {
    let dz = Normal::new(0.0, config.sigma_z).expect("finite sigma");
    let dphi = Normal::new(0.0, config.sigma_phi).expect("finite sigma");
    let dw = Normal::new(0.0, config.sigma_weight).expect("finite sigma");
    let mut weights: Vec<f64> = ensemble.components.iter().map(|(w, _)| (w + dw.sample(rng)).max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    } else {
        weights = ensemble.components.iter().map(|(w, _)| *w).collect();
    }
    let components = ensemble
        .components
        .iter()
        .zip(weights)
        .map(|((_, s), w)| {
            let z = reflect_unit(s.z + dz.sample(rng));
            let phi = wrap_phase(s.phi + dphi.sample(rng));
            (w, CoherentSpinState { z, phi, n_total: s.n_total })
        })
        .collect();
    SeparableEnsemble { n_total: ensemble.n_total, components }
}

/// Reflects into `[0, 1]`.
fn reflect_unit(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0);
    if y > 1.0 {
        y = 2.0 - y;
    }
    y.clamp(0.0, 1.0)
}

fn wrap_phase(phi: f64) -> f64 {
    let wrapped = (phi + PI).rem_euclid(2.0 * PI) - PI;
    wrapped.clamp(-PI, PI)
}
