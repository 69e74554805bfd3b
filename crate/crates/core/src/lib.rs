//! Function-field decoding problems over Carlitz cyclotomic extensions.
//!
//! The crate builds the finite rings O_M/QO_M attached to the Carlitz module
//! over F_q(T), together with their Galois action by (F_q[T]/(M))^×, samples
//! Galois-invariant noise, and runs the search-to-decision reduction that
//! turns a hybrid distinguisher into a secret-recovery algorithm.

pub mod algebra;
pub mod carlitz;
pub mod noise;
pub mod reduction;
pub mod residue;
pub mod rng;
pub mod stats;

pub use algebra::{AlgebraError, Factorization, FieldCtx, FieldElem, Poly, Var};
