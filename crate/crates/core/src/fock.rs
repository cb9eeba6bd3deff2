//! Two-mode Fock sectors.
//!
//! A sector of `N` bosons in modes `a` and `b` has the basis
//! `|k, N-k>`, `k = 0..=N`, where `k` counts particles in mode `a`.
//! Pure states are [`FockVector`]s, mixed states within one sector are
//! [`SectorDensity`]s, and states with a fluctuating particle number are
//! [`NumberSectorMixture`]s (block diagonal, no coherence between sectors).
//!
//! Ladder moments and angular-momentum moments act directly on amplitude
//! vectors; dense operator matrices are only built for rotations and
//! eigendecompositions.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eig, CMatrix};
use crate::special::sqrt_falling_factorial;
use crate::{Error, Result};

/// Largest sector for which dense density matrices are built by default.
pub const DEFAULT_N_MAX: usize = 256;

/// Accepted deviation of `sum |c_k|^2` from one.
pub const NORM_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Unit vector `n` selecting the generator `J_n = n . J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    direction: [f64; 3],
}

impl GeneratorSpec {
    /// Normalizes `direction`; fails on a zero or non-finite vector.
    pub fn new(direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "generator direction {direction:?} cannot be normalized"
            )));
        }
        Ok(Self { direction: direction.map(|x| x / norm) })
    }

    pub fn x() -> Self {
        Self { direction: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        Self { direction: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        Self { direction: [0.0, 0.0, 1.0] }
    }

    /// Direction from polar angle `theta` (from the z axis) and azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            direction: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()],
        }
    }

    /// Uniformly distributed direction on the sphere.
    pub fn random(rng: &mut impl Rng) -> Self {
        let cos_theta: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        Self::from_angles(cos_theta.acos(), phi)
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    /// Rotation vector `v` such that `e^{i v.J} J_z e^{-i v.J} = J_n`.
    ///
    /// Rotating a state by `v` (see [`FockVector::rotate`]) therefore turns
    /// statistics of `J_n` into statistics of `J_z`.
    pub fn rotation_to_z(&self) -> [f64; 3] {
        let [nx, ny, nz] = self.direction;
        // axis n x z, angle between n and z
        let axis = [ny, -nx, 0.0];
        let sin = (nx * nx + ny * ny).sqrt();
        let angle = sin.atan2(nz);
        if sin == 0.0 {
            return if nz > 0.0 { [0.0; 3] } else { [std::f64::consts::PI, 0.0, 0.0] };
        }
        axis.map(|x| x / sin * angle)
    }
}

/// Matrix element `<out| J_n |in>` in sector `n_total`; zero unless
/// `|out - in| <= 1`.
fn generator_element(n_total: usize, g: &GeneratorSpec, out: usize, input: usize) -> Complex64 {
    let [nx, ny, nz] = g.direction;
    let n = n_total as f64;
    if out == input {
        Complex64::new(nz * (input as f64 - 0.5 * n), 0.0)
    } else if out == input + 1 {
        let k = input as f64;
        Complex64::new(0.5 * nx, -0.5 * ny) * ((k + 1.0) * (n - k)).sqrt()
    } else if out + 1 == input {
        let k = input as f64;
        Complex64::new(0.5 * nx, 0.5 * ny) * (k * (n - k + 1.0)).sqrt()
    } else {
        ZERO
    }
}

/// `J_n |psi>` for amplitudes in sector `amplitudes.len() - 1`.
pub(crate) fn apply_generator(amplitudes: &[Complex64], g: &GeneratorSpec) -> Vec<Complex64> {
    let n_total = amplitudes.len() - 1;
    (0..=n_total)
        .map(|k| {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(n_total);
            (lo..=hi).map(|j| generator_element(n_total, g, k, j) * amplitudes[j]).sum()
        })
        .collect()
}

/// Dense matrix of `J_n` on sector `n_total`.
pub fn generator_matrix(n_total: usize, g: &GeneratorSpec) -> CMatrix {
    CMatrix::from_fn(n_total + 1, |i, j| {
        if i.abs_diff(j) <= 1 {
            generator_element(n_total, g, i, j)
        } else {
            ZERO
        }
    })
}

/// `e^{-i v.J}` on sector `n_total`.
pub fn rotation_operator(n_total: usize, axis: [f64; 3]) -> CMatrix {
    let angle = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if angle == 0.0 || !angle.is_finite() {
        return CMatrix::identity(n_total + 1);
    }
    let g = GeneratorSpec { direction: axis.map(|x| x / angle) };
    let eig = hermitian_eig(&generator_matrix(n_total, &g))
        .expect("angular momentum generators are hermitian");
    eig.map(|lambda| Complex64::from_polar(1.0, -angle * lambda))
}

/// Coefficient of `b^q a^p |k, N-k>`, which lands on `|k-p, N-k-q>`.
#[inline]
fn ladder_coefficient(n_total: usize, k: usize, p: usize, q: usize) -> f64 {
    if k < p || n_total - k < q {
        0.0
    } else {
        sqrt_falling_factorial(k as u64, p as u64) * sqrt_falling_factorial((n_total - k) as u64, q as u64)
    }
}

/// `b^q a^p |psi>`; `None` when more particles are removed than present.
pub(crate) fn annihilate(amplitudes: &[Complex64], p: usize, q: usize) -> Option<Vec<Complex64>> {
    let n_total = amplitudes.len() - 1;
    if p + q > n_total {
        return None;
    }
    let n_out = n_total - p - q;
    Some(
        (0..=n_out)
            .map(|k_out| {
                let k = k_out + p;
                amplitudes[k] * ladder_coefficient(n_total, k, p, q)
            })
            .collect(),
    )
}

/// A pure state of `N` bosons in two modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    n_total: usize,
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    /// Wraps normalized amplitudes; `amplitudes[k]` is the weight of `|k, N-k>`.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("a sector needs at least one amplitude".into()));
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::InvalidState(format!("amplitudes have squared norm {norm}")));
        }
        Ok(Self { n_total: amplitudes.len() - 1, amplitudes })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("a sector needs at least one amplitude".into()));
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState("amplitudes cannot be normalized".into()));
        }
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { n_total: amplitudes.len() - 1, amplitudes })
    }

    /// `|k, N-k>`
    pub fn number_state(n_total: usize, k: usize) -> Result<Self> {
        if k > n_total {
            return Err(Error::InvalidParameter(format!("occupation {k} exceeds N = {n_total}")));
        }
        let mut amplitudes = vec![ZERO; n_total + 1];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Ok(Self { n_total, amplitudes })
    }

    /// `|N/2, N/2>`; `N` must be even.
    pub fn twin_fock(n_total: usize) -> Result<Self> {
        if n_total % 2 != 0 {
            return Err(Error::InvalidParameter(format!("twin-Fock state needs even N, got {n_total}")));
        }
        Self::number_state(n_total, n_total / 2)
    }

    /// Haar-like random state: independent complex gaussian amplitudes.
    pub fn random(rng: &mut impl Rng, n_total: usize) -> Self {
        let amplitudes = (0..=n_total)
            .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
            .collect();
        Self::from_unnormalized(amplitudes).expect("gaussian amplitudes are nonzero")
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<self|other>`, zero across sectors.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        if self.n_total != other.n_total {
            return ZERO;
        }
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_density(&self) -> SectorDensity {
        SectorDensity {
            n_total: self.n_total,
            matrix: CMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// `e^{-i v.J} |psi>`
    pub fn rotate(&self, axis: [f64; 3]) -> FockVector {
        if axis.iter().all(|&x| x == 0.0) {
            return self.clone();
        }
        let u = rotation_operator(self.n_total, axis);
        FockVector { n_total: self.n_total, amplitudes: u.mul_vec(&self.amplitudes) }
    }
}

/// Mixed state of a single `N` sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorDensity {
    n_total: usize,
    matrix: CMatrix,
}

impl SectorDensity {
    /// Validates hermiticity (1e-12), unit trace (1e-10) and positivity (-1e-10).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim == 0 {
            return Err(Error::InvalidState("empty density matrix".into()));
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > 1e-12 {
            return Err(Error::NonHermitianInput { deviation });
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-10 {
            return Err(Error::InvalidState(format!("density matrix has trace {trace}")));
        }
        let eig = hermitian_eig(&matrix)?;
        if let Some(&lowest) = eig.values.first() {
            if lowest < -1e-10 {
                return Err(Error::InvalidState(format!("density matrix has eigenvalue {lowest:e}")));
            }
        }
        Ok(Self { n_total: dim - 1, matrix })
    }

    /// Caller guarantees a hermitian, positive, unit-trace matrix.
    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { n_total: matrix.dim() - 1, matrix }
    }

    /// `sum_i w_i |psi_i><psi_i|` for nonnegative weights summing to one.
    pub fn from_pure_mixture(components: &[(f64, FockVector)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidState("empty mixture".into()));
        };
        let n_total = first.n_total;
        check_weights(components.iter().map(|(w, _)| *w))?;
        let mut matrix = CMatrix::zeros(n_total + 1);
        for (w, psi) in components {
            if psi.n_total != n_total {
                return Err(Error::InvalidState(format!(
                    "mixture mixes sectors N = {n_total} and N = {}",
                    psi.n_total
                )));
            }
            let amps = psi.amplitudes();
            for i in 0..=n_total {
                let wi = amps[i] * *w;
                for j in 0..=n_total {
                    matrix[(i, j)] += wi * amps[j].conj();
                }
            }
        }
        Ok(Self { n_total, matrix })
    }

    /// `sum_i w_i rho_i` over densities of one sector.
    pub fn convex_combination(components: &[(f64, &SectorDensity)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return Err(Error::InvalidState("empty mixture".into()));
        };
        check_weights(components.iter().map(|(w, _)| *w))?;
        let mut matrix = CMatrix::zeros(first.n_total + 1);
        for (w, rho) in components {
            if rho.n_total != first.n_total {
                return Err(Error::InvalidState("convex combination across sectors".into()));
            }
            matrix = &matrix + &rho.matrix.scale(Complex64::new(*w, 0.0));
        }
        Ok(Self { n_total: first.n_total, matrix })
    }

    /// Random mixed state of the given rank with flat-simplex weights.
    pub fn random(rng: &mut impl Rng, n_total: usize, rank: usize) -> Self {
        let rank = rank.max(1);
        let raw: Vec<f64> = (0..rank).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = raw.iter().sum();
        let components: Vec<(f64, FockVector)> =
            raw.iter().map(|w| (w / total, FockVector::random(rng, n_total))).collect();
        Self::from_pure_mixture(&components).expect("weights are normalized")
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `U rho U^H` with `U = e^{-i v.J}`.
    pub fn rotate(&self, axis: [f64; 3]) -> SectorDensity {
        if axis.iter().all(|&x| x == 0.0) {
            return self.clone();
        }
        let u = rotation_operator(self.n_total, axis);
        let rotated = &(&u * &self.matrix) * &u.adjoint();
        SectorDensity { n_total: self.n_total, matrix: rotated }
    }

    /// `Tr(rho J_n)` and `Tr(rho J_n^2)`.
    fn generator_moments(&self, g: &GeneratorSpec) -> (f64, f64) {
        let n = self.n_total;
        // K = J rho, column by column
        let mut k_mat = CMatrix::zeros(n + 1);
        for col in 0..=n {
            let column = self.matrix.column(col);
            for (row, value) in apply_generator(&column, g).into_iter().enumerate() {
                k_mat[(row, col)] = value;
            }
        }
        let mean = k_mat.trace().re;
        // Tr(J rho J) = sum_ij K_ij J_ji
        let mut second = 0.0;
        for i in 0..=n {
            let lo = i.saturating_sub(1);
            let hi = (i + 1).min(n);
            for j in lo..=hi {
                second += (k_mat[(i, j)] * generator_element(n, g, j, i)).re;
            }
        }
        (mean, second)
    }
}

/// Weights must be nonnegative and sum to one within 1e-10.
pub(crate) fn check_weights(weights: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    for w in weights {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidState(format!("weight {w} is not a probability")));
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Block-diagonal state with a fluctuating particle number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberSectorMixture {
    sectors: Vec<(f64, SectorDensity)>,
}

impl NumberSectorMixture {
    /// Sectors must carry distinct `N` and probabilities summing to one.
    /// They are stored in ascending `N`.
    pub fn new(mut sectors: Vec<(f64, SectorDensity)>) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::InvalidState("mixture has no sectors".into()));
        }
        check_weights(sectors.iter().map(|(p, _)| *p))?;
        sectors.sort_by_key(|(_, rho)| rho.n_total);
        if sectors.windows(2).any(|w| w[0].1.n_total == w[1].1.n_total) {
            return Err(Error::InvalidState("number sectors must be distinct".into()));
        }
        Ok(Self { sectors })
    }

    pub fn single(sector: SectorDensity) -> Self {
        Self { sectors: vec![(1.0, sector)] }
    }

    pub fn sectors(&self) -> &[(f64, SectorDensity)] {
        &self.sectors
    }

    /// `sum_N p_N f(rho_N)`
    pub fn expectation(&self, functional: impl Fn(&SectorDensity) -> f64) -> f64 {
        self.sectors.iter().map(|(p, rho)| p * functional(rho)).sum()
    }
}

/// Borrowed view of one number sector of a state.
#[derive(Clone, Copy, Debug)]
pub enum SectorView<'a> {
    Pure(&'a FockVector),
    Mixed(&'a SectorDensity),
}

impl SectorView<'_> {
    pub fn n_total(&self) -> usize {
        match self {
            SectorView::Pure(psi) => psi.n_total,
            SectorView::Mixed(rho) => rho.n_total,
        }
    }

    pub fn to_density(&self) -> SectorDensity {
        match self {
            SectorView::Pure(psi) => psi.to_density(),
            SectorView::Mixed(rho) => (*rho).clone(),
        }
    }
}

/// Observables shared by pure states, sector densities and number mixtures.
pub trait TwoModeState {
    /// Sectors with their probabilities, ascending in `N`.
    fn sector_views(&self) -> Vec<(f64, SectorView<'_>)>;

    /// `<a^dag^p b^dag^q b^r a^s>`
    fn normally_ordered_moment(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        self.sector_views()
            .into_iter()
            .map(|(prob, view)| prob * sector_moment(view, p, q, r, s))
            .sum()
    }

    /// `<J_n>` and `<J_n^2>`.
    fn generator_moments(&self, g: &GeneratorSpec) -> (f64, f64) {
        self.sector_views().into_iter().fold((0.0, 0.0), |(m, s), (prob, view)| {
            let (vm, vs) = match view {
                SectorView::Pure(psi) => {
                    let j_psi = apply_generator(&psi.amplitudes, g);
                    let mean = psi.amplitudes.iter().zip(&j_psi).map(|(a, b)| a.conj() * b).sum::<Complex64>();
                    (mean.re, j_psi.iter().map(|c| c.norm_sqr()).sum())
                }
                SectorView::Mixed(rho) => rho.generator_moments(g),
            };
            (m + prob * vm, s + prob * vs)
        })
    }

    /// Mean and variance of `J_n`.
    fn angular_moments(&self, g: &GeneratorSpec) -> (f64, f64) {
        let (mean, second) = self.generator_moments(g);
        (mean, second - mean * mean)
    }

    /// `<N>`
    fn mean_number(&self) -> f64 {
        self.sector_views().iter().map(|(p, v)| p * v.n_total() as f64).sum()
    }

    /// `<N^2>`
    fn mean_number_sq(&self) -> f64 {
        self.sector_views().iter().map(|(p, v)| p * (v.n_total() as f64).powi(2)).sum()
    }
}

fn sector_moment(view: SectorView<'_>, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
    if p + q != r + s {
        // the bra and ket land in different sectors
        return ZERO;
    }
    match view {
        SectorView::Pure(psi) => {
            let (Some(left), Some(right)) = (annihilate(&psi.amplitudes, p, q), annihilate(&psi.amplitudes, s, r))
            else {
                return ZERO;
            };
            left.iter().zip(&right).map(|(a, b)| a.conj() * b).sum()
        }
        SectorView::Mixed(rho) => {
            // Tr(rho A^H B), A = b^q a^p, B = b^r a^s; A|j> ~ |j-p>, B|i> ~ |i-s>
            let n = rho.n_total;
            if r + s > n {
                return ZERO;
            }
            let mut total = ZERO;
            for i in s..=n {
                let j = i + p - s;
                if j > n {
                    continue;
                }
                let beta = ladder_coefficient(n, i, s, r);
                let alpha = ladder_coefficient(n, j, p, q);
                if beta != 0.0 && alpha != 0.0 {
                    total += rho.matrix[(i, j)] * (alpha * beta);
                }
            }
            total
        }
    }
}

impl TwoModeState for FockVector {
    fn sector_views(&self) -> Vec<(f64, SectorView<'_>)> {
        vec![(1.0, SectorView::Pure(self))]
    }
}

impl TwoModeState for SectorDensity {
    fn sector_views(&self) -> Vec<(f64, SectorView<'_>)> {
        vec![(1.0, SectorView::Mixed(self))]
    }
}

impl TwoModeState for NumberSectorMixture {
    fn sector_views(&self) -> Vec<(f64, SectorView<'_>)> {
        self.sectors.iter().map(|(p, rho)| (*p, SectorView::Mixed(rho))).collect()
    }
}
