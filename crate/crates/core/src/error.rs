use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not hermitian (max |A - A^H| = {deviation:e})")]
    NonHermitianInput { deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("sector with N = {n_total} exceeds the dense-matrix cap N_max = {n_max}")]
    SectorTooLarge { n_total: usize, n_max: usize },

    #[error("local correlations vanish (G_aa * G_bb = {product:e}), ratio undefined")]
    DegenerateLocalCorrelation { product: f64 },

    #[error("correlation order 2m = {order} is too high for N = {n_total}")]
    OrderTooHigh { order: usize, n_total: usize },

    #[error("state carries no particles in the observed regions (n_tot = {n_tot:e})")]
    EmptyState { n_tot: f64 },

    #[error("mean spin has no component transverse to J_z (<J_x>^2 + <J_y>^2 = {transverse:e}), spin squeezing undefined")]
    ZeroMeanSpinDirection { transverse: f64 },

    #[error("POVM is incomplete: max |sum E - 1| = {deviation:e}")]
    IncompletePovm { deviation: f64 },

    #[error("POVM element '{label}' has negative eigenvalue {eigenvalue:e}")]
    NegativeElement { label: String, eigenvalue: f64 },

    #[error("unknown POVM outcome label '{0}'")]
    UnknownLabel(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
