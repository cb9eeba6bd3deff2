//! Certification sweep: random separable states against every witness bound.
//!
//! Sample `i` draws from ChaCha8 stream `i` of the run seed, so the report
//! does not depend on how samples are scheduled across threads.

use bosent::separable::{sample_ensemble_with, sample_fluctuating_with};
use bosent::witnesses::{csi_ratio, integrated_g2m, qfi, spin_squeezing, spin_squeezing_from_moments, CorrelationIntegrals};
use bosent::{FluctuatingEnsemble, GeneratorSpec, NumberDistribution, SeparableEnsemble, TwoModeState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CSI_TOLERANCE: f64 = 1e-9;
pub const QFI_TOLERANCE: f64 = 1e-6;
pub const XI_TOLERANCE: f64 = 1e-9;
/// Allowed disagreement between closed-form and Fock-space evaluations.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub samples: usize,
    pub n_total: usize,
    pub seed: u64,
    /// Sample fluctuating-number ensembles instead of fixed `N`.
    pub fluctuating: Option<NumberDistribution>,
    pub directions: usize,
    pub max_components: usize,
    pub n_max: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            samples: 1000,
            n_total: 40,
            seed: 0,
            fluctuating: None,
            directions: 10,
            max_components: 4,
            n_max: bosent::DEFAULT_N_MAX,
        }
    }
}

/// Parses `poisson:MEAN`, `binomial:N:P` or `deterministic:N`.
pub fn parse_distribution(s: &str) -> Result<NumberDistribution, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("distribution {s:?}: expected poisson:MEAN, binomial:N:P or deterministic:N");
    let dist = match parts[..] {
        ["poisson", mean] => NumberDistribution::Poisson { mean: mean.parse().map_err(|_| bad())? },
        ["binomial", n, p] => {
            NumberDistribution::Binomial { n: n.parse().map_err(|_| bad())?, p: p.parse().map_err(|_| bad())? }
        }
        ["deterministic", n] => NumberDistribution::Deterministic { n: n.parse().map_err(|_| bad())? },
        _ => return Err(bad()),
    };
    dist.weights().map_err(|e| format!("distribution {s:?}: {e}"))?;
    Ok(dist)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampledEnsemble {
    Fixed(SeparableEnsemble),
    Fluctuating(FluctuatingEnsemble),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `value <= limit + tolerance`
    AtMost,
    /// `value >= limit - tolerance`
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub name: String,
    pub relation: Relation,
    pub tolerance: f64,
    /// Samples where the quantity was defined.
    pub evaluated: usize,
    /// Samples where it was undefined, e.g. a vanishing denominator.
    pub undefined: usize,
    pub violations: usize,
    /// The sample closest to (or furthest past) the bound.
    pub worst_value: Option<f64>,
    pub worst_limit: Option<f64>,
    pub worst_sample: Option<usize>,
    pub worst_ensemble: Option<SampledEnsemble>,
}

impl BoundSummary {
    fn new(name: &str, relation: Relation, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            relation,
            tolerance,
            evaluated: 0,
            undefined: 0,
            violations: 0,
            worst_value: None,
            worst_limit: None,
            worst_sample: None,
            worst_ensemble: None,
        }
    }

    /// Distance from the bound; negative past it.
    fn margin(&self, value: f64, limit: f64) -> f64 {
        match self.relation {
            Relation::AtMost => limit - value,
            Relation::AtLeast => value - limit,
        }
    }

    fn record(&mut self, sample: usize, check: Option<(f64, f64)>, ensemble: &SampledEnsemble) {
        let Some((value, limit)) = check else {
            self.undefined += 1;
            return;
        };
        self.evaluated += 1;
        let margin = self.margin(value, limit);
        if margin < -self.tolerance || !margin.is_finite() {
            self.violations += 1;
        }
        let worse = match (self.worst_value, self.worst_limit) {
            (Some(v), Some(l)) => margin < self.margin(v, l),
            _ => true,
        };
        if worse {
            self.worst_value = Some(value);
            self.worst_limit = Some(limit);
            self.worst_sample = Some(sample);
            self.worst_ensemble = Some(ensemble.clone());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub samples: usize,
    /// Fixed particle number, absent for fluctuating scans.
    pub n_total: Option<usize>,
    pub distribution: Option<NumberDistribution>,
    pub directions_per_sample: usize,
    pub max_components: usize,
    pub bounds: Vec<BoundSummary>,
    pub violations: usize,
}

impl ScanReport {
    pub fn exit_code(&self) -> i32 {
        if self.violations == 0 {
            0
        } else {
            4
        }
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        use crate::render::{opt, sig15};
        self.bounds
            .iter()
            .map(|b| {
                vec![
                    b.name.clone(),
                    match b.relation {
                        Relation::AtMost => "<=".into(),
                        Relation::AtLeast => ">=".into(),
                    },
                    sig15(b.tolerance),
                    b.evaluated.to_string(),
                    b.undefined.to_string(),
                    b.violations.to_string(),
                    opt(b.worst_value),
                    opt(b.worst_limit),
                    b.worst_sample.map(|s| s.to_string()).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

pub const CSV_HEADER: &str = "bound,relation,tolerance,evaluated,undefined,violations,worst_value,worst_limit,worst_sample";

/// `(value, limit)` per bound; `None` where undefined.
struct SampleOutcome {
    ensemble: SampledEnsemble,
    csi: Option<(f64, f64)>,
    qfi: Option<(f64, f64)>,
    xi2: Option<(f64, f64)>,
    consistency: Option<(f64, f64)>,
}

const BOUND_NAMES: [(&str, Relation, f64); 4] = [
    ("csi", Relation::AtMost, CSI_TOLERANCE),
    ("qfi", Relation::AtMost, QFI_TOLERANCE),
    ("spin_squeezing", Relation::AtLeast, XI_TOLERANCE),
    ("analytic_consistency", Relation::AtMost, CONSISTENCY_TOLERANCE),
];

pub fn run_scan(config: &ScanConfig) -> Result<ScanReport, CliError> {
    if config.samples == 0 {
        return Err(CliError::Input("scan-separable needs at least one sample".into()));
    }
    if config.max_components == 0 {
        return Err(CliError::Input("--max-components must be at least 1".into()));
    }
    let largest = match &config.fluctuating {
        None => config.n_total,
        Some(d) => d.weights().map_err(|e| CliError::Input(e.to_string()))?.last().map_or(0, |(n, _)| *n),
    };
    if largest > config.n_max {
        return Err(CliError::Input(format!(
            "sector N = {largest} exceeds --n-max {}; the Fock-space cross-check needs dense sectors",
            config.n_max
        )));
    }

    let outcomes: Vec<SampleOutcome> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            match &config.fluctuating {
                None => fixed_sample(&mut rng, config),
                Some(d) => fluctuating_sample(&mut rng, d, config),
            }
        })
        .collect::<Result<_, bosent::Error>>()
        .map_err(|e| CliError::Input(e.to_string()))?;

    let mut bounds: Vec<BoundSummary> = BOUND_NAMES.iter().map(|(n, r, t)| BoundSummary::new(n, *r, *t)).collect();
    for (i, o) in outcomes.iter().enumerate() {
        for (b, check) in bounds.iter_mut().zip([o.csi, o.qfi, o.xi2, o.consistency]) {
            b.record(i, check, &o.ensemble);
        }
    }
    let violations = bounds.iter().map(|b| b.violations).sum();
    Ok(ScanReport {
        samples: config.samples,
        n_total: config.fluctuating.is_none().then_some(config.n_total),
        distribution: config.fluctuating,
        directions_per_sample: config.directions,
        max_components: config.max_components,
        bounds,
        violations,
    })
}

/// Largest defined ratio over all feasible orders.
fn max_csi(correlations: impl Iterator<Item = CorrelationIntegrals>) -> Option<f64> {
    correlations.filter_map(|c| csi_ratio(&c).ok()).reduce(f64::max)
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn fixed_sample(rng: &mut ChaCha8Rng, config: &ScanConfig) -> bosent::Result<SampleOutcome> {
    let n = config.n_total;
    let k = rng.gen_range(1..=config.max_components);
    let ensemble = sample_ensemble_with(rng, n, k);
    let generators: Vec<GeneratorSpec> = (0..config.directions).map(|_| GeneratorSpec::random(rng)).collect();

    let csi = max_csi((1..=n / 2).map(|m| ensemble.analytic_correlations(m))).map(|c| (c, 1.0));
    let qfi_values = ensemble.qfi_many(&generators)?;
    let qfi_max = qfi_values.iter().copied().reduce(f64::max).map(|f| (f, n as f64));
    let moments = ensemble.analytic_spin_moments();
    let xi2 = spin_squeezing_from_moments(&moments).ok().map(|x| (x, 1.0));

    // the same quantities through the dense Fock-space representation
    let rho = ensemble.to_density(config.n_max)?;
    let mut gap: f64 = 0.0;
    let (jx, _) = rho.angular_moments(&GeneratorSpec::x());
    let (jy, _) = rho.angular_moments(&GeneratorSpec::y());
    let (jz, var_z) = rho.angular_moments(&GeneratorSpec::z());
    for (a, b) in [(jx, moments.jx_mean), (jy, moments.jy_mean), (jz, moments.jz_mean), (var_z, moments.jz_variance)] {
        gap = gap.max(relative_gap(a, b));
    }
    if n >= 2 {
        let dense = integrated_g2m(&rho, 1)?;
        let closed = ensemble.analytic_correlations(1);
        for (a, b) in [(dense.g_aa, closed.g_aa), (dense.g_bb, closed.g_bb), (dense.g_ab, closed.g_ab)] {
            gap = gap.max(relative_gap(a, b));
        }
    }
    if let (Some(g), Some(f)) = (generators.first(), qfi_values.first()) {
        gap = gap.max(relative_gap(qfi(&rho, g)?, *f));
    }

    Ok(SampleOutcome {
        ensemble: SampledEnsemble::Fixed(ensemble),
        csi,
        qfi: qfi_max,
        xi2,
        consistency: Some((gap, 0.0)),
    })
}

fn fluctuating_sample(
    rng: &mut ChaCha8Rng,
    distribution: &NumberDistribution,
    config: &ScanConfig,
) -> bosent::Result<SampleOutcome> {
    let ensemble = sample_fluctuating_with(rng, distribution, config.max_components)?;
    let generators: Vec<GeneratorSpec> = (0..config.directions).map(|_| GeneratorSpec::random(rng)).collect();
    let n_mean = ensemble.mean_number();
    let n_largest = ensemble.number_weights().last().map_or(0, |(n, _)| *n);

    let csi = max_csi((1..=n_largest / 2).map(|m| ensemble.analytic_correlations(m))).map(|c| (c, 1.0));
    let qfi_values = ensemble.qfi_many(&generators)?;
    let qfi_max = qfi_values.iter().copied().reduce(f64::max).map(|f| (f, n_mean));
    let moments = ensemble.analytic_spin_moments();
    let xi2 = spin_squeezing_from_moments(&moments).ok().map(|x| (x, 1.0));

    let mix = ensemble.to_mixture(config.n_max)?;
    let mut gap = relative_gap(mix.mean_number(), n_mean);
    let (jx, _) = mix.angular_moments(&GeneratorSpec::x());
    let (jy, _) = mix.angular_moments(&GeneratorSpec::y());
    let (jz, var_z) = mix.angular_moments(&GeneratorSpec::z());
    for (a, b) in [(jx, moments.jx_mean), (jy, moments.jy_mean), (jz, moments.jz_mean), (var_z, moments.jz_variance)] {
        gap = gap.max(relative_gap(a, b));
    }
    if let (Ok(dense), Some((closed, _))) = (spin_squeezing(&mix), xi2) {
        gap = gap.max(relative_gap(dense, closed));
    }
    let dense = integrated_g2m(&mix, 1)?;
    let closed = ensemble.analytic_correlations(1);
    for (a, b) in [(dense.g_aa, closed.g_aa), (dense.g_bb, closed.g_bb), (dense.g_ab, closed.g_ab)] {
        gap = gap.max(relative_gap(a, b));
    }

    Ok(SampleOutcome {
        ensemble: SampledEnsemble::Fluctuating(ensemble),
        csi,
        qfi: qfi_max,
        xi2,
        consistency: Some((gap, 0.0)),
    })
}
