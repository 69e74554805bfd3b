//! The Carlitz module over F_q[T] and the residue rings O_M/QO_M it produces.

mod cyclotomic;
mod galois;
mod qpoly;
mod ring;
mod subgroup;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::residue::ResidueError;

pub use cyclotomic::{carlitz_cyclotomic, specialized_cyclotomic, BivariatePoly};
pub use galois::GaloisAction;
pub use qpoly::{carlitz_compose, carlitz_poly, QPoly};
pub use ring::{predict_splitting, CarlitzDescriptor, CarlitzOptions, CarlitzRing, SplitPrediction};
pub use subgroup::SubgroupRing;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CarlitzError {
    #[error("conductor must be nonzero")]
    ZeroConductor,
    #[error("conductor must be monic")]
    NonMonicConductor,
    #[error("inexact division while building the cyclotomic polynomial")]
    InexactDivision,
    #[error("Q divides M, so Q ramifies")]
    RamifiedModulus,
    #[error("modulus of degree {0} is not supported without the experimental flag (prime q only)")]
    UnsupportedModulusDegree(usize),
    #[error("modulus Q is not irreducible")]
    ReducibleModulus,
    #[error("element is not a unit modulo M")]
    NotAUnit,
    #[error("not a subgroup of the multiplicative group")]
    NotASubgroup,
    #[error("factorization does not match prediction {predicted:?}: observed degrees {observed:?}")]
    SplittingMismatch { predicted: SplitPrediction, observed: Vec<usize> },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
}
