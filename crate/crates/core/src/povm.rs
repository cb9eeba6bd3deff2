//! Generalized measurements on the single-particle space.
//!
//! A POVM is a finite set of labelled positive operators `E(xi)` summing to
//! the identity on `C^d`. For separable ensembles the region-integrated
//! correlation functions reduce to single-particle response functions. For
//! arbitrary two-mode states (`d = 2`) the second-order function is
//! evaluated in second quantization.

use std::collections::{BTreeSet, HashSet};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::fock::{check_weights, TwoModeState};
use crate::linalg::{hermitian_eig, CMatrix};
use crate::separable::{prefactor_alpha, CoherentSpinState, FluctuatingEnsemble};
use crate::witnesses::CorrelationIntegrals;
use crate::{Error, Result};

pub use crate::witnesses::csi_ratio as csi_povm;

pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub label: String,
    pub matrix: CMatrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmSet {
    dim: usize,
    elements: Vec<PovmElement>,
}

impl PovmSet {
    /// Checks shapes and label uniqueness only; see [`validate_povm`] for
    /// positivity and completeness.
    pub fn new(dim: usize, elements: Vec<PovmElement>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &elements {
            if e.matrix.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: e.matrix.dim() });
            }
            if !seen.insert(e.label.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate outcome label {:?}", e.label)));
            }
        }
        Ok(Self { dim, elements })
    }

    /// `{|a><a|, |b><b|}` with labels `"a"` and `"b"`.
    pub fn mode_projective() -> Self {
        let elements = vec![
            PovmElement { label: "a".into(), matrix: CMatrix::diagonal(&[1.0, 0.0]) },
            PovmElement { label: "b".into(), matrix: CMatrix::diagonal(&[0.0, 1.0]) },
        ];
        Self { dim: 2, elements }
    }

    /// `k` copies of `I/k`, labelled `"e0"`, `"e1"`, ...
    pub fn trivial(dim: usize, k: usize) -> Self {
        let elements = (0..k)
            .map(|i| PovmElement { label: format!("e{i}"), matrix: CMatrix::identity(dim).scale((1.0 / k as f64).into()) })
            .collect();
        Self { dim, elements }
    }

    /// `E_i = S^{-1/2} G_i^H G_i S^{-1/2}` with gaussian `G_i` and
    /// `S = sum_i G_i^H G_i`; complete by construction.
    pub fn random(rng: &mut impl Rng, dim: usize, k: usize) -> Self {
        assert!(dim > 0 && k > 0, "random POVM needs dim > 0 and k > 0");
        let positives: Vec<CMatrix> = (0..k)
            .map(|_| {
                let g = CMatrix::from_fn(dim, |_, _| {
                    Complex64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
                });
                &g.adjoint() * &g
            })
            .collect();
        let sum = positives.iter().skip(1).fold(positives[0].clone(), |acc, p| &acc + p);
        let inv_sqrt = hermitian_eig(&sum).expect("sum of gram matrices is hermitian").map(|x| (1.0 / x.sqrt()).into());
        let elements = positives
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let e = &(&inv_sqrt * p) * &inv_sqrt;
                // restore exact hermiticity lost to rounding
                let e = CMatrix::from_fn(dim, |r, c| 0.5 * (e[(r, c)] + e[(c, r)].conj()));
                PovmElement { label: format!("e{i}"), matrix: e }
            })
            .collect();
        Self { dim, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|e| e.label.as_str())
    }

    pub fn element(&self, label: &str) -> Result<&PovmElement> {
        self.elements.iter().find(|e| e.label == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PovmReport {
    /// `max |sum_xi E(xi) - I|`
    pub completeness_deviation: f64,
    pub min_eigenvalue: f64,
    /// Every element is idempotent within the completeness tolerance.
    pub projective: bool,
}

/// Positivity of each element and completeness of the set.
pub fn validate_povm(p: &PovmSet) -> Result<PovmReport> {
    let mut min_eigenvalue = f64::INFINITY;
    let mut projective = true;
    for e in &p.elements {
        let eig = hermitian_eig(&e.matrix)?;
        let lowest = eig.values.first().copied().unwrap_or(0.0);
        if lowest < -POSITIVITY_TOLERANCE {
            return Err(Error::NegativeElement { label: e.label.clone(), eigenvalue: lowest });
        }
        min_eigenvalue = min_eigenvalue.min(lowest);
        projective &= (&e.matrix * &e.matrix).max_abs_diff(&e.matrix) <= COMPLETENESS_TOLERANCE;
    }
    let sum = p.elements.iter().fold(CMatrix::zeros(p.dim), |acc, e| &acc + &e.matrix);
    let completeness_deviation = sum.max_abs_diff(&CMatrix::identity(p.dim));
    if completeness_deviation > COMPLETENESS_TOLERANCE {
        return Err(Error::IncompletePovm { deviation: completeness_deviation });
    }
    Ok(PovmReport { completeness_deviation, min_eigenvalue, projective })
}

/// A set of outcome labels `X`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeRegion {
    pub labels: BTreeSet<String>,
}

impl OutcomeRegion {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        Self { labels: labels.into_iter().map(Into::into).collect() }
    }

    pub fn full(p: &PovmSet) -> Self {
        Self::new(p.labels())
    }

    pub fn is_disjoint(&self, other: &OutcomeRegion) -> bool {
        self.labels.is_disjoint(&other.labels)
    }
}

/// A unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingleParticleState {
    vector: Vec<Complex64>,
}

impl SingleParticleState {
    pub fn new(vector: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = vector.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("single-particle state has norm^2 {norm}")));
        }
        Ok(Self { vector })
    }

    /// `(sqrt(z) e^{i phi}, sqrt(1-z))` in the mode basis.
    pub fn from_css(s: &CoherentSpinState) -> Self {
        let [a, b] = s.single_particle();
        Self { vector: vec![a, b] }
    }

    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }
}

/// `sum_{xi in X} <phi|E(xi)|phi>`
pub fn region_response(p: &PovmSet, region: &OutcomeRegion, phi: &SingleParticleState) -> Result<f64> {
    if phi.vector.len() != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, found: phi.vector.len() });
    }
    region
        .labels
        .iter()
        .map(|l| Ok(p.element(l)?.matrix.sandwich(&phi.vector, &phi.vector).re))
        .sum()
}

/// `G_ij = alpha_2m sum_k w_k F_i(phi_k)^m F_j(phi_k)^m` for `N`
/// particles distributed by the weighted single-particle states.
pub fn integrated_gm_separable(
    p: &PovmSet,
    ensemble: &[(f64, SingleParticleState)],
    n_total: usize,
    m: usize,
    xa: &OutcomeRegion,
    xb: &OutcomeRegion,
) -> Result<CorrelationIntegrals> {
    if m == 0 {
        return Err(Error::InvalidParameter("correlation order m must be at least 1".into()));
    }
    if 2 * m > n_total {
        return Err(Error::OrderTooHigh { order: 2 * m, n_total });
    }
    check_weights(ensemble.iter().map(|(w, _)| *w))?;
    warn_on_overlap(xa, xb);
    let (mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0);
    for (w, phi) in ensemble {
        let fa = region_response(p, xa, phi)?.powi(m as i32);
        let fb = region_response(p, xb, phi)?.powi(m as i32);
        aa += w * fa * fa;
        bb += w * fb * fb;
        ab += w * fa * fb;
    }
    let alpha = prefactor_alpha(n_total, m);
    Ok(CorrelationIntegrals { order_m: m, g_aa: alpha * aa, g_bb: alpha * bb, g_ab: alpha * ab, prefactor_alpha: alpha })
}

/// Fluctuating particle number: the `p_N`-weighted sum of the per-sector
/// integrals, equivalently the integrals of the averaged measure
/// `sum_N p_N alpha_2m(N) P_N`. Sectors with `2m > N` contribute nothing.
pub fn integrated_gm_fluctuating(
    p: &PovmSet,
    ensemble: &FluctuatingEnsemble,
    m: usize,
    xa: &OutcomeRegion,
    xb: &OutcomeRegion,
) -> Result<CorrelationIntegrals> {
    let mut total = CorrelationIntegrals { order_m: m, g_aa: 0.0, g_bb: 0.0, g_ab: 0.0, prefactor_alpha: 0.0 };
    for (prob, sector) in ensemble.sectors() {
        if 2 * m > sector.n_total() {
            continue;
        }
        let states: Vec<(f64, SingleParticleState)> =
            sector.components().iter().map(|(w, s)| (*w, SingleParticleState::from_css(s))).collect();
        let c = integrated_gm_separable(p, &states, sector.n_total(), m, xa, xb)?;
        total.g_aa += prob * c.g_aa;
        total.g_bb += prob * c.g_bb;
        total.g_ab += prob * c.g_ab;
        total.prefactor_alpha += prob * c.prefactor_alpha;
    }
    Ok(total)
}

/// `G^2(xi, xi') = sum E_{mu nu}(xi) E_{mu' nu'}(xi') <a_mu^dag a_mu'^dag a_nu' a_nu>`
/// with mode `a` as basis index 0 and `b` as index 1.
pub fn second_quantized_g2(state: &impl TwoModeState, p: &PovmSet, xi: &str, xi_prime: &str) -> Result<f64> {
    let table = PairMoments::new(state, p)?;
    table.g2(&p.element(xi)?.matrix, &p.element(xi_prime)?.matrix)
}

/// Order-2 integrals assembled from [`second_quantized_g2`] over regions:
/// `G_ij = sum_{xi in X_i, xi' in X_j} G^2(xi, xi')`.
pub fn integrated_g2_second_quantized(
    state: &impl TwoModeState,
    p: &PovmSet,
    xa: &OutcomeRegion,
    xb: &OutcomeRegion,
) -> Result<CorrelationIntegrals> {
    warn_on_overlap(xa, xb);
    let table = PairMoments::new(state, p)?;
    let region_sum = |x: &OutcomeRegion, y: &OutcomeRegion| -> Result<f64> {
        let mut s = 0.0;
        for l in &x.labels {
            for r in &y.labels {
                s += table.g2(&p.element(l)?.matrix, &p.element(r)?.matrix)?;
            }
        }
        Ok(s)
    };
    let n = state.mean_number();
    Ok(CorrelationIntegrals {
        order_m: 1,
        g_aa: region_sum(xa, xa)?,
        g_bb: region_sum(xb, xb)?,
        g_ab: region_sum(xa, xb)?,
        prefactor_alpha: state.mean_number_sq() - n,
    })
}

/// `<a_mu^dag a_mu'^dag a_nu' a_nu>` depends only on how many of the
/// creators and annihilators act on mode `a`.
struct PairMoments {
    /// `[created a][annihilated a]`
    moments: [[Complex64; 3]; 3],
}

impl PairMoments {
    fn new(state: &impl TwoModeState, p: &PovmSet) -> Result<Self> {
        if p.dim != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: p.dim });
        }
        let mut moments = [[Complex64::new(0.0, 0.0); 3]; 3];
        for (ca, row) in moments.iter_mut().enumerate() {
            for (aa, cell) in row.iter_mut().enumerate() {
                *cell = state.normally_ordered_moment(ca, 2 - ca, 2 - aa, aa);
            }
        }
        Ok(Self { moments })
    }

    fn g2(&self, e: &CMatrix, f: &CMatrix) -> Result<f64> {
        let mut total = Complex64::new(0.0, 0.0);
        for mu in 0..2 {
            for nu in 0..2 {
                for mu2 in 0..2 {
                    for nu2 in 0..2 {
                        let created = usize::from(mu == 0) + usize::from(mu2 == 0);
                        let annihilated = usize::from(nu == 0) + usize::from(nu2 == 0);
                        total += e[(mu, nu)] * f[(mu2, nu2)] * self.moments[created][annihilated];
                    }
                }
            }
        }
        let scale = total.norm().max(1.0);
        if total.im.abs() > 1e-10 * scale {
            return Err(Error::InvalidState(format!("second-order correlation has imaginary part {}", total.im)));
        }
        Ok(total.re)
    }
}

fn warn_on_overlap(xa: &OutcomeRegion, xb: &OutcomeRegion) {
    if !xa.is_disjoint(xb) {
        log::warn!("outcome regions overlap: {:?}", xa.labels.intersection(&xb.labels).collect::<Vec<_>>());
    }
}
