//! Shared error type for grid, profile, operator and measure computations.

use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid construction parameters (window sizes, family parameters, ...).
    #[error("bad parameters: {0}")]
    BadParams(String),

    /// The lattice series behind a Gram function / tail computation cannot be
    /// certified to converge for the requested profile and exponent.
    #[error("lattice tail not summable for {profile} with exponent s = {exponent}")]
    NonSummableTail { profile: String, exponent: f64 },

    /// The computational window cannot represent the requested operation to
    /// the demanded accuracy (spectral or spatial truncation too large).
    #[error("window too small: {0}")]
    WindowTooSmall(String),

    /// Discrete pairings require the step/scale ratio to stay bounded.
    #[error("scale ratio h/eps = {ratio:.6} exceeds the bound {limit}")]
    RatioTooLarge { ratio: f64, limit: f64 },

    /// A measure charges the closure of the discontinuity set of a profile's
    /// Fourier transform, so the pointwise limit formula does not apply.
    #[error("measure charges a discontinuity of the profile transform at xi = {xi:?}")]
    DiscontinuityMass { xi: Vec<f64> },

    /// Two 2π-shifted weighted copies of a measure overlap, so the folding
    /// formula for sampled sequences does not apply.
    #[error("2π-shifted copies of the measure overlap at xi = {xi:?}")]
    TranslateOverlap { xi: Vec<f64> },

    /// A random-trial operator bound was violated; carries the witness.
    #[error("operator norm certificate violated: {0}")]
    CertificateViolated(String),

    /// Pairing a lattice-comb factor against a test factor without a certified
    /// localization radius is not defined.
    #[error("unsupported pairing: {0}")]
    UnsupportedPairing(String),

    /// Input to a band-limited identity has spectral mass outside the band.
    #[error("field is not band-limited to [-π/h, π/h): outside mass fraction {mass_fraction:.3e}")]
    NotBandLimited { mass_fraction: f64 },

    /// Parsing a profile/test-function/measure spec string failed.
    #[error("spec parse error: {0}")]
    SpecParse(String),

    /// I/O wrapper for CSV/JSON reading and writing.
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
