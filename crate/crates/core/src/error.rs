use std::fmt;

use thiserror::Error;

/// Which energy-positivity condition an input violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Positivity {
    PWaveModulus,
    BiotModulus,
    SolidSecondGradient,
    FluidSecondGradient,
    Depth,
    Darcy,
    SecondGradientDarcy,
    ReferenceDensity,
    BiotCoefficient,
    NonFinite,
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Positivity::PWaveModulus => "lambda_lame + 2 mu_lame must be > 0",
            Positivity::BiotModulus => "biot_m must be > 0",
            Positivity::SolidSecondGradient => "k_ss (or k1) must be > 0",
            Positivity::FluidSecondGradient => "m_sg (or k3) must be > 0",
            Positivity::Depth => "depth_l must be > 0",
            Positivity::Darcy => "darcy_d must be > 0",
            Positivity::SecondGradientDarcy => "darcy_alpha (or k4) must be >= 0",
            Positivity::ReferenceDensity => "mf0 must be > 0",
            Positivity::BiotCoefficient => "biot_b must be nonzero when dp_ext is nonzero",
            Positivity::NonFinite => "all parameters must be finite",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("positivity violation: {0}")]
    PositivityViolation(Positivity),

    #[error(
        "degenerate exponential basis at lambda = {lambda:e} (clustered characteristic roots)"
    )]
    DegenerateBasis { lambda: f64 },

    #[error("found {found} eigenvalues but {requested} were requested; widen lambda_min (currently {lambda_min:e})")]
    InsufficientBracket {
        found: usize,
        requested: usize,
        lambda_min: f64,
    },

    #[error("lambda = {lambda:e} is not an eigenvalue (singular value ratio {ratio:e})")]
    NotAnEigenvalue { lambda: f64, ratio: f64 },

    #[error("no bilinear weights make the eigenfunctions orthogonal (max off-diagonal ratio {max_offdiag_ratio:e})")]
    WeightsUnresolvable { max_offdiag_ratio: f64 },

    #[error("spectrum exhausted after {available} modes before reaching relative error {target:e} (reached {reached:e})")]
    SpectrumExhausted {
        available: usize,
        target: f64,
        reached: f64,
    },

    #[error("critical prestress (B4 = 0) under nonzero load: no solution exists")]
    CriticalPrestress,

    #[error("critical prestress without load: solution is an undetermined constant")]
    UndeterminedConstant,

    #[error("unstable regime (B4 = {b4:e} < 0): solution grows in time")]
    StabilityError { b4: f64 },

    #[error("mismatched parameters: {0}")]
    MismatchedParams(String),

    #[error("no sign change of the first eigenvalue over the bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short machine-greppable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PositivityViolation(_) => "PositivityViolation",
            Error::DegenerateBasis { .. } => "DegenerateBasis",
            Error::InsufficientBracket { .. } => "InsufficientBracket",
            Error::NotAnEigenvalue { .. } => "NotAnEigenvalue",
            Error::WeightsUnresolvable { .. } => "WeightsUnresolvable",
            Error::SpectrumExhausted { .. } => "SpectrumExhausted",
            Error::CriticalPrestress => "CriticalPrestress",
            Error::UndeterminedConstant => "UndeterminedConstant",
            Error::StabilityError { .. } => "StabilityError",
            Error::MismatchedParams(_) => "MismatchedParams",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
