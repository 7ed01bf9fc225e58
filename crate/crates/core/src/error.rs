use std::path::PathBuf;

use thiserror::Error;

/// Every failure mode of the library.
///
/// Numerical variants carry enough context for a caller to decide on a
/// fallback (for example, switching Mittag-Leffler evaluation method).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series did not converge after {terms} terms (last term magnitude {last_term:e})")]
    NonConvergent { terms: usize, last_term: f64 },

    #[error("overflow: Re(z^2) = {re_z2} exceeds the representable exponent range")]
    Overflow { re_z2: f64 },

    #[error("contour failure: {0}")]
    ContourFailure(String),

    #[error("symmetric eigensolver did not converge for a {0}x{0} matrix")]
    EigenSolveFailure(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("quadrature failed: estimated error {achieved:e} > requested {requested:e} after {evals} evaluations")]
    QuadratureFailure { achieved: f64, requested: f64, evals: usize },

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("stability guard tripped: dt^alpha * |H| / hbar^alpha = {measure:.3} > {limit}")]
    StabilityGuardTripped { measure: f64, limit: f64 },

    #[error("need at least {needed} step sizes, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("u-integral diverges for lambda = {lam} < 0 (exp(-u lambda / hbar) grows)")]
    DivergentTail { lam: f64 },

    #[error("point s = {re} + {im}i lies on the branch cut")]
    OnBranchCut { re: f64, im: f64 },

    #[error("root finding failed: {0}")]
    RootFindFailure(String),

    #[error("profile evaluated at {x} outside its support [{lo}, {hi}]")]
    ExtrapolationBeyondProfile { x: f64, lo: f64, hi: f64 },

    #[error("profile cannot be evaluated at complex arguments")]
    NotAnalytic,

    #[error("integral diverges at t = {t}: Gaussian decay rate {rate:e} <= floor {floor:e}")]
    IntegralDivergent { t: f64, rate: f64, floor: f64 },

    #[error("parse error at line {line}, key `{key}`: {reason}")]
    Parse { line: usize, key: String, reason: String },

    #[error("invalid value for `{key}`{}: {reason}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Validation { key: String, line: Option<usize>, reason: String },

    #[error("refusing to write {path} outside output directory {root}")]
    OutsideOutputDir { path: PathBuf, root: PathBuf },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NonConvergent { .. } => "non_convergent",
            Error::Overflow { .. } => "overflow",
            Error::ContourFailure(_) => "contour_failure",
            Error::EigenSolveFailure(_) => "eigen_solve_failure",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::QuadratureFailure { .. } => "quadrature_failure",
            Error::LinearSolveFailure(_) => "linear_solve_failure",
            Error::StabilityGuardTripped { .. } => "stability_guard_tripped",
            Error::InsufficientPoints { .. } => "insufficient_points",
            Error::DivergentTail { .. } => "divergent_tail",
            Error::OnBranchCut { .. } => "on_branch_cut",
            Error::RootFindFailure(_) => "root_find_failure",
            Error::ExtrapolationBeyondProfile { .. } => "extrapolation_beyond_profile",
            Error::NotAnalytic => "not_analytic",
            Error::IntegralDivergent { .. } => "integral_divergent",
            Error::Parse { .. } => "parse_error",
            Error::Validation { .. } => "validation_error",
            Error::OutsideOutputDir { .. } => "outside_output_dir",
            Error::Io(_) => "io_error",
        }
    }

    /// True for configuration problems (as opposed to numerical or I/O failures).
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Validation { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
