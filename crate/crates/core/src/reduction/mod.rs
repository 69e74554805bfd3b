//! Search-to-decision reduction: secret randomization, hybrids, guess and
//! search with majority voting, and Galois recombination.

mod distinguisher;
mod oracle;
mod search;

use thiserror::Error;

use crate::noise::NoiseError;
use crate::residue::ResidueError;

pub use distinguisher::{
    estimate_advantage, AdvantageEstimate, Distinguisher, MlDistinguisher, PlantedDistinguisher, StreamContext,
    DEFAULT_ML_BOUND,
};
pub use oracle::{hybrid_mask, hybridize, randomize_secret, HybridSource, SampleOracle, SampleSource, UniformSource};
pub use search::{
    full_reduction, galois_recover, guess_and_search, module_reduction, CandidateSummary, ComponentSolution,
    ModuleReductionReport, PrimeRecovery, ReductionConfig, ReductionReport, ValidationSummary,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no guess accepted for component {component}")]
    NoGuessAccepted { component: usize },
    #[error("{accepted} guesses accepted for component {component}")]
    MultipleGuessesAccepted { component: usize, accepted: usize },
    #[error("secret not found: {0}")]
    SecretNotFound(String),
    #[error("sample budget of {0} exhausted")]
    BudgetExhausted(u64),
    #[error("exhaustive search over {size} secrets exceeds the bound {bound}")]
    RingTooLarge { size: u128, bound: u128 },
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// Smallest odd m ≥ ln(1/μ)/(2δ²).
pub fn repetitions(delta: f64, mu: f64) -> Result<usize, ReductionError> {
    if !(delta > 0.0 && delta <= 0.5) || !(mu > 0.0 && mu < 1.0) {
        return Err(ReductionError::InvalidParameters(format!("delta = {delta}, mu = {mu}")));
    }
    let m = ((1.0 / mu).ln() / (2.0 * delta * delta)).ceil().max(1.0) as usize;
    Ok(if m.is_multiple_of(2) { m + 1 } else { m })
}

/// Strict majority of `true` votes.
pub fn majority(votes: &[bool]) -> bool {
    2 * votes.iter().filter(|&&v| v).count() > votes.len()
}
