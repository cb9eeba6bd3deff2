//! Particle-entanglement witnesses for two-mode bosonic states.
//!
//! Every separable state satisfies
//!
//! * `C_2m = G_ab / sqrt(G_aa G_bb) <= 1` for the order-`2m` correlation
//!   integrals over two regions (here: the two modes),
//! * `F_Q[rho, J_n] <= N` (or `<N>` when the number fluctuates),
//! * `xi^2 = <N> Var(J_z) / (<J_x>^2 + <J_y>^2) >= 1`.
//!
//! Number squeezing `eta^2 < 1` is reported alongside but is not by itself a
//! verdict: separable states can be number squeezed.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{apply_generator, check_weights, FockVector, GeneratorSpec, NumberSectorMixture, SectorView, TwoModeState};
use crate::linalg::{hermitian_eig, CMatrix};
use crate::separable::SpinMoments;
use crate::special::ln_falling_factorial;
use crate::{Error, Result};

/// Absolute tolerance for declaring a bound violated.
pub const VIOLATION_TOLERANCE: f64 = 1e-9;

/// Below this, `G_aa * G_bb` is treated as zero.
pub const DEGENERATE_PRODUCT: f64 = 1e-24;

/// Eigenvalue pairs with `lambda_i + lambda_j` below this are skipped in the
/// spectral QFI sum.
pub const QFI_EIGEN_CUTOFF: f64 = 1e-12;

/// Order-`2m` correlation integrals over regions `a` and `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationIntegrals {
    pub order_m: usize,
    pub g_aa: f64,
    pub g_bb: f64,
    pub g_ab: f64,
    /// `alpha_2m = N!/(N-2m)!`; `p_N`-averaged for number mixtures.
    pub prefactor_alpha: f64,
}

/// `G_aa = <a^dag^2m a^2m>`, `G_bb = <b^dag^2m b^2m>`, `G_ab = <a^dag^m b^dag^m b^m a^m>`.
///
/// All three vanish in sectors with `2m > N`.
pub fn integrated_g2m(state: &impl TwoModeState, m: usize) -> Result<CorrelationIntegrals> {
    if m == 0 {
        return Err(Error::InvalidParameter("correlation order m must be at least 1".into()));
    }
    let prefactor_alpha = state
        .sector_views()
        .iter()
        .map(|(p, v)| {
            let n = v.n_total();
            if 2 * m > n {
                0.0
            } else {
                p * ln_falling_factorial(n as u64, 2 * m as u64).exp()
            }
        })
        .sum();
    Ok(CorrelationIntegrals {
        order_m: m,
        g_aa: state.normally_ordered_moment(2 * m, 0, 0, 2 * m).re,
        g_bb: state.normally_ordered_moment(0, 2 * m, 2 * m, 0).re,
        g_ab: state.normally_ordered_moment(m, m, m, m).re,
        prefactor_alpha,
    })
}

/// `C_2m = G_ab / sqrt(G_aa G_bb)`
pub fn csi_ratio(c: &CorrelationIntegrals) -> Result<f64> {
    let product = c.g_aa * c.g_bb;
    if !(product > DEGENERATE_PRODUCT) {
        return Err(Error::DegenerateLocalCorrelation { product });
    }
    Ok(c.g_ab / product.sqrt())
}

/// Closed form of `C_2m` on the twin-Fock state `|N/2, N/2>`:
/// `(N/2)! (N/2-2m)! / ((N/2-m)!)^2`, evaluated as a ratio of log falling
/// factorials.
pub fn twin_fock_csi_exact(n_total: usize, m: usize) -> Result<f64> {
    if n_total % 2 != 0 {
        return Err(Error::InvalidParameter(format!("twin-Fock state needs even N, got {n_total}")));
    }
    let half = (n_total / 2) as u64;
    let m = m as u64;
    if 2 * m > half {
        return Err(Error::OrderTooHigh { order: 2 * m as usize, n_total });
    }
    // (h)!/(h-m)! divided by (h-m)!/(h-2m)!
    Ok((ln_falling_factorial(half, m) - ln_falling_factorial(half - m, m)).exp())
}

/// Small-`epsilon` approximation `exp(epsilon^2 N / 2)`, `epsilon = 2m/N`.
pub fn twin_fock_csi_approx(n_total: usize, m: usize) -> Result<f64> {
    if n_total < 2 {
        return Err(Error::InvalidParameter(format!("approximation needs N >= 2, got {n_total}")));
    }
    let n = n_total as f64;
    let eps = 2.0 * m as f64 / n;
    Ok((eps * eps * n / 2.0).exp())
}

/// `eta^2 = Var(n_a - n_b) / (<n_a> + <n_b>)`, from the spread of `J_z`.
pub fn number_squeezing_direct(state: &impl TwoModeState) -> Result<f64> {
    let n_tot = state.mean_number();
    if !(n_tot > 1e-12) {
        return Err(Error::EmptyState { n_tot });
    }
    // n_a - n_b = 2 J_z
    let (_, var_jz) = state.angular_moments(&GeneratorSpec::z());
    Ok(4.0 * var_jz / n_tot)
}

/// `eta^2 = 1 + (G_aa + G_bb - 2 G_ab - <n>^2) / n_tot` with `<n> = <n_a - n_b>`.
pub fn number_squeezing_from_g2(c: &CorrelationIntegrals, n_mean_diff: f64, n_tot: f64) -> Result<f64> {
    if !(n_tot > 1e-12) {
        return Err(Error::EmptyState { n_tot });
    }
    Ok(1.0 + (c.g_aa + c.g_bb - 2.0 * c.g_ab - n_mean_diff * n_mean_diff) / n_tot)
}

/// Symmetric regions (`<n> = 0`, `G_aa = G_bb`):
/// `eta^2 = 1 + 2 (1 - C_2) G_aa / n_tot`.
///
/// The frequently quoted form with a minus sign in front of the fraction
/// contradicts the general identity above and the equivalence
/// `eta^2 < 1 <=> C_2 > 1`; on the twin-Fock state it would give `eta^2 = 2`
/// instead of `0`.
pub fn number_squeezing_symmetric(c2: f64, g_aa: f64, n_tot: f64) -> Result<f64> {
    if !(n_tot > 1e-12) {
        return Err(Error::EmptyState { n_tot });
    }
    Ok(1.0 + 2.0 * (1.0 - c2) * g_aa / n_tot)
}

/// `eta^2` through the second-order correlation integrals of the state.
pub fn number_squeezing_via_correlations(state: &impl TwoModeState) -> Result<f64> {
    let c = integrated_g2m(state, 1)?;
    let n_a = state.normally_ordered_moment(1, 0, 0, 1).re;
    let n_b = state.normally_ordered_moment(0, 1, 1, 0).re;
    number_squeezing_from_g2(&c, n_a - n_b, n_a + n_b)
}

/// Quantum Fisher information of `state` for the phase generator `J_n`.
///
/// Pure sectors use `4 Var(J_n)`. Mixed sectors use the spectral form
/// `2 sum_ij (l_i - l_j)^2 / (l_i + l_j) |<i|J_n|j>|^2`. Generators conserve
/// `N`, so number mixtures contribute `sum_N p_N F_Q[rho_N]`.
pub fn qfi(state: &impl TwoModeState, g: &GeneratorSpec) -> Result<f64> {
    Ok(qfi_many(state, std::slice::from_ref(g))?[0])
}

/// [`qfi`] for several generators, sharing one eigendecomposition per sector.
pub fn qfi_many(state: &impl TwoModeState, generators: &[GeneratorSpec]) -> Result<Vec<f64>> {
    let mut totals = vec![0.0; generators.len()];
    for (p, view) in state.sector_views() {
        let values = match view {
            SectorView::Pure(psi) => generators
                .iter()
                .map(|g| 4.0 * psi.angular_moments(g).1)
                .collect(),
            SectorView::Mixed(rho) => spectral_qfi(rho.matrix(), generators)?,
        };
        for (t, v) in totals.iter_mut().zip(values) {
            *t += p * v;
        }
    }
    Ok(totals)
}

fn spectral_qfi(rho: &CMatrix, generators: &[GeneratorSpec]) -> Result<Vec<f64>> {
    let eig = hermitian_eig(rho)?;
    let dim = rho.dim();
    let v = &eig.vectors;
    let v_adj = v.adjoint();
    // <i|J_k|j> for the three Cartesian generators
    let project = |g: &GeneratorSpec| {
        let mut jv = CMatrix::zeros(dim);
        for col in 0..dim {
            for (row, x) in apply_generator(&v.column(col), g).into_iter().enumerate() {
                jv[(row, col)] = x;
            }
        }
        &v_adj * &jv
    };
    let cartesian = [project(&GeneratorSpec::x()), project(&GeneratorSpec::y()), project(&GeneratorSpec::z())];

    let lambda = &eig.values;
    let mut kernel = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let s = lambda[i] + lambda[j];
            let d = lambda[i] - lambda[j];
            kernel.push(if s < QFI_EIGEN_CUTOFF { 0.0 } else { d * d / s });
        }
    }
    Ok(generators
        .iter()
        .map(|g| {
            let [nx, ny, nz] = g.direction();
            let mut total = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    let k = kernel[i * dim + j];
                    if k == 0.0 {
                        continue;
                    }
                    let elem = cartesian[0][(i, j)] * nx + cartesian[1][(i, j)] * ny + cartesian[2][(i, j)] * nz;
                    total += k * elem.norm_sqr();
                }
            }
            2.0 * total
        })
        .collect())
}

/// [`qfi_many`] for `rho = sum_k w_k |psi_k><psi_k|` with all `psi_k` in one
/// sector, without a dense eigensolve.
///
/// The nonzero spectrum of `rho` is that of the `k x k` matrix
/// `M = W^{1/2} <psi|psi> W^{1/2}`. Pairs between the support and the kernel
/// contribute `4 sum_i l_i (<i|J^2|i> - sum_{j in supp} |<i|J|j>|^2)`.
pub fn qfi_low_rank(components: &[(f64, FockVector)], generators: &[GeneratorSpec]) -> Result<Vec<f64>> {
    let Some((_, first)) = components.first() else {
        return Err(Error::InvalidState("empty pure-state decomposition".into()));
    };
    let n = first.n_total();
    if let Some((_, bad)) = components.iter().find(|(_, psi)| psi.n_total() != n) {
        return Err(Error::DimensionMismatch { expected: n + 1, found: bad.n_total() + 1 });
    }
    check_weights(components.iter().map(|(w, _)| *w))?;
    let k = components.len();
    let sqrt_w: Vec<f64> = components.iter().map(|(w, _)| w.sqrt()).collect();
    let gram = CMatrix::from_fn(k, |i, j| sqrt_w[i] * sqrt_w[j] * components[i].1.inner(&components[j].1));
    let eig = hermitian_eig(&gram)?;

    let mut lambda = Vec::new();
    let mut basis = Vec::new();
    for (a, &l) in eig.values.iter().enumerate() {
        if l <= 0.5 * QFI_EIGEN_CUTOFF {
            continue;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, (_, psi)) in components.iter().enumerate() {
            let c = eig.vectors[(i, a)] * (sqrt_w[i] / l.sqrt());
            for (x, amp) in e.iter_mut().zip(psi.amplitudes()) {
                *x += c * amp;
            }
        }
        lambda.push(l);
        basis.push(e);
    }

    generators
        .iter()
        .map(|g| {
            let images: Vec<Vec<Complex64>> = basis.iter().map(|e| apply_generator(e, g)).collect();
            let mut total = 0.0;
            for a in 0..basis.len() {
                let mut captured = 0.0;
                for b in 0..basis.len() {
                    let jab: Complex64 = basis[a].iter().zip(&images[b]).map(|(x, y)| x.conj() * y).sum();
                    let w = jab.norm_sqr();
                    captured += w;
                    let (s, d) = (lambda[a] + lambda[b], lambda[a] - lambda[b]);
                    if s >= QFI_EIGEN_CUTOFF {
                        total += 2.0 * d * d / s * w;
                    }
                }
                let j2: f64 = images[a].iter().map(|c| c.norm_sqr()).sum();
                total += 4.0 * lambda[a] * (j2 - captured);
            }
            Ok(total)
        })
        .collect()
}

/// `xi^2 = <N> Var(J_z) / (<J_x>^2 + <J_y>^2)`.
///
/// For a fixed particle number `<N> = N`; for number mixtures the `<N>`
/// weighting is the one for which separable states still obey `xi^2 >= 1`.
pub fn spin_squeezing(state: &impl TwoModeState) -> Result<f64> {
    let (jx, _) = state.angular_moments(&GeneratorSpec::x());
    let (jy, _) = state.angular_moments(&GeneratorSpec::y());
    let (_, var_z) = state.angular_moments(&GeneratorSpec::z());
    squeezing_quotient(state.mean_number(), var_z, jx, jy)
}

/// [`spin_squeezing`] from closed-form ensemble moments.
pub fn spin_squeezing_from_moments(m: &SpinMoments) -> Result<f64> {
    squeezing_quotient(m.n_mean, m.jz_variance, m.jx_mean, m.jy_mean)
}

fn squeezing_quotient(n_reference: f64, var_z: f64, jx: f64, jy: f64) -> Result<f64> {
    let transverse = jx * jx + jy * jy;
    if !(transverse > 1e-18 * n_reference * n_reference) || transverse == 0.0 {
        return Err(Error::ZeroMeanSpinDirection { transverse });
    }
    Ok(n_reference * var_z / transverse)
}

/// Cauchy-Schwarz ratio of every number sector on its own.
pub fn per_sector_csi(mix: &NumberSectorMixture, m: usize) -> Vec<SectorCsi> {
    mix.sectors()
        .iter()
        .map(|(p, rho)| SectorCsi {
            n_total: rho.n_total(),
            probability: *p,
            ratio: integrated_g2m(rho, m).and_then(|c| csi_ratio(&c)).ok(),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorCsi {
    pub n_total: usize,
    pub probability: f64,
    /// `None` when the ratio is undefined in this sector.
    pub ratio: Option<f64>,
}

/// Witness values gathered for one state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WitnessValues {
    /// `2m -> C_2m`
    pub csi_by_order: BTreeMap<usize, f64>,
    pub eta2: Option<f64>,
    pub xi2: Option<f64>,
    pub qfi: Vec<(GeneratorSpec, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QfiEntry {
    pub direction: [f64; 3],
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessBounds {
    /// Separable states have `C_2m <= csi`.
    pub csi: f64,
    /// Separable states have `F_Q <= qfi` (`N` or `<N>`).
    pub qfi: f64,
    /// Separable states have `xi^2 >= xi2`.
    pub xi2: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub entangled_by_csi: bool,
    pub entangled_by_qfi: bool,
    pub entangled_by_spin_squeezing: bool,
}

impl Verdicts {
    pub fn any(&self) -> bool {
        self.entangled_by_csi || self.entangled_by_qfi || self.entangled_by_spin_squeezing
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    /// `2m -> C_2m`
    pub csi_by_order: BTreeMap<usize, f64>,
    pub eta2: Option<f64>,
    pub xi2: Option<f64>,
    pub qfi_by_generator: Vec<QfiEntry>,
    /// `N` for a fixed particle number, `<N>` otherwise.
    pub n_reference: f64,
    pub bounds: WitnessBounds,
    pub verdicts: Verdicts,
}

/// Compares each witness with its separable bound. A flag is raised only
/// when the bound is broken by more than [`VIOLATION_TOLERANCE`].
pub fn classify(values: &WitnessValues, n_reference: f64) -> WitnessReport {
    let bounds = WitnessBounds { csi: 1.0, qfi: n_reference, xi2: 1.0 };
    let verdicts = Verdicts {
        entangled_by_csi: values.csi_by_order.values().any(|&c| c > bounds.csi + VIOLATION_TOLERANCE),
        entangled_by_qfi: values.qfi.iter().any(|(_, f)| *f > bounds.qfi + VIOLATION_TOLERANCE),
        entangled_by_spin_squeezing: values.xi2.is_some_and(|x| x < bounds.xi2 - VIOLATION_TOLERANCE),
    };
    WitnessReport {
        csi_by_order: values.csi_by_order.clone(),
        eta2: values.eta2,
        xi2: values.xi2,
        qfi_by_generator: values.qfi.iter().map(|(g, v)| QfiEntry { direction: g.direction(), value: *v }).collect(),
        n_reference,
        bounds,
        verdicts,
    }
}
