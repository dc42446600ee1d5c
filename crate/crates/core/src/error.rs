use thiserror::Error;

/// Errors raised anywhere in the crate.
///
/// The CLI maps validation-type variants to exit code 2 and numerical
/// failures to exit code 3, see [`Error::is_numerical`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("N = {0} is odd; the exact generating function is only available for even N")]
    OddN(u32),

    #[error("N = {0} is too small (need N >= {1})")]
    TooSmall(u32, u32),

    #[error("M = {m} does not have the parity of N = {n} (or lies outside 0..=N)")]
    Parity { n: u32, m: u32 },

    #[error("{name} = {value} is outside the allowed range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e}) within {evals} evaluations")]
    NonConvergence {
        tol: f64,
        estimate: f64,
        evals: usize,
    },

    #[error("bracket [{lo}, {hi}] does not enclose an interior minimum")]
    BadBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no sign change of x + chi'(mu) found for x = {x} within |mu| <= {limit}")]
    BracketExpansionFailed { x: f64, limit: f64 },

    #[error("generalized Schur reduction failed: {0}")]
    DecompositionFailure(String),

    #[error("cannot convert to a polynomial in pi: {0}")]
    NotConvertible(String),
}

impl Error {
    /// True for failures of a numerical method, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::BadBracket { .. }
                | Error::NoSignChange { .. }
                | Error::BracketExpansionFailed { .. }
                | Error::DecompositionFailure(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
