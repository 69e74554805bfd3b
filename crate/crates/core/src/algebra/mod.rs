//! Exact arithmetic in F_q and F_q[T], F_q[X].

pub mod dense;
pub mod factor;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod text;
pub mod units;

pub use factor::{factor, factor_by_trial_division, is_irreducible, Factorization};
pub use field::{FieldCtx, FieldElem};
pub use poly::{Poly, Var};
pub use text::parse_poly;
pub use units::{euler_phi, mult_order, unit_group};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("invalid degree {0}")]
    InvalidDegree(usize),
    #[error("field of order {0} is too large")]
    FieldTooLarge(u128),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    MixedFieldContexts,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("division leaves a remainder")]
    InexactDivision,
    #[error("constant polynomial")]
    ConstantPolynomial,
    #[error("arguments are not coprime")]
    NotCoprime,
    #[error("enumerating {size} residues exceeds the bound {bound}")]
    EnumerationBoundExceeded { size: u128, bound: u128 },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}
