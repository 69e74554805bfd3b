//! Noise distributions, normal bases, and FF-DP / MFF-DP sample generation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::linalg::{self, Matrix};
use crate::algebra::{factor, AlgebraError, FieldCtx, FieldElem, Poly, Var};
use crate::carlitz::GaloisAction;
use crate::residue::{ResidueRing, RingElem};

pub const DEFAULT_MAX_TRIES: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("noise rate {0} outside [0, 1/2)")]
    InvalidNoiseRate(f64),
    #[error("weight {t} outside 0..={n}")]
    WeightOutOfRange { t: usize, n: usize },
    #[error("no normal basis generator found in {0} tries")]
    MaxTriesExceeded(usize),
    #[error("element does not generate a normal basis")]
    NotNormal,
    #[error("group order {group} differs from ring dimension {n}")]
    GroupOrderMismatch { group: usize, n: usize },
    #[error("group order {n} is not coprime to q = {q}")]
    NonCoprimeOrder { n: u64, q: u64 },
    #[error("normal noise needs a normal basis")]
    MissingBasis,
    #[error("module samples need at least one secret")]
    EmptySecret,
    #[error("cannot parse noise spec {0:?}; expected bernoulli:p, weight:t or normal:p")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "param", rename_all = "snake_case")]
pub enum NoiseKind {
    Bernoulli(f64),
    FixedWeight(usize),
    Normal(f64),
}

impl NoiseKind {
    pub fn validate(&self) -> Result<(), NoiseError> {
        match *self {
            NoiseKind::Bernoulli(p) | NoiseKind::Normal(p) => check_rate(p),
            NoiseKind::FixedWeight(_) => Ok(()),
        }
    }
}

fn check_rate(p: f64) -> Result<(), NoiseError> {
    if (0.0..0.5).contains(&p) {
        Ok(())
    } else {
        Err(NoiseError::InvalidNoiseRate(p))
    }
}

impl FromStr for NoiseKind {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NoiseError::Parse(s.to_string());
        let (name, value) = s.trim().split_once(':').ok_or_else(err)?;
        let kind = match name.trim().to_ascii_lowercase().as_str() {
            "bernoulli" => NoiseKind::Bernoulli(value.trim().parse().map_err(|_| err())?),
            "weight" => NoiseKind::FixedWeight(value.trim().parse().map_err(|_| err())?),
            "normal" => NoiseKind::Normal(value.trim().parse().map_err(|_| err())?),
            _ => return Err(err()),
        };
        kind.validate()?;
        Ok(kind)
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseKind::Bernoulli(p) => write!(f, "bernoulli:{p}"),
            NoiseKind::FixedWeight(t) => write!(f, "weight:{t}"),
            NoiseKind::Normal(p) => write!(f, "normal:{p}"),
        }
    }
}

/// A basis {σ_g(x) : g ∈ G} of the ring over F_q.
#[derive(Clone, Debug)]
pub struct NormalBasis {
    generator: RingElem,
    labels: Vec<String>,
    /// Row g holds the monomial coordinates of σ_g(x).
    images: Matrix,
    inverse: Matrix,
    tries: usize,
}

impl NormalBasis {
    pub fn from_generator(action: &dyn GaloisAction, x: &RingElem) -> Result<NormalBasis, NoiseError> {
        let ring = action.ring();
        let n = ring.degree();
        if action.group_order() != n {
            return Err(NoiseError::GroupOrderMismatch { group: action.group_order(), n });
        }
        let images: Matrix = (0..n).map(|g| action.apply(g, x).coeffs().to_vec()).collect();
        let inverse = linalg::invert(ring.field(), &images).ok_or(NoiseError::NotNormal)?;
        Ok(NormalBasis {
            generator: x.clone(),
            labels: (0..n).map(|g| action.label(g)).collect(),
            images,
            inverse,
            tries: 1,
        })
    }

    pub fn generator(&self) -> &RingElem {
        &self.generator
    }

    /// Labels of the group elements, in basis order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tries(&self) -> usize {
        self.tries
    }

    /// Monomial coordinates of the basis vectors, one row per group element.
    pub fn matrix(&self) -> &Matrix {
        &self.images
    }

    pub fn coords(&self, field: &FieldCtx, x: &RingElem) -> Vec<FieldElem> {
        linalg::vec_mul(field, x.coeffs(), &self.inverse)
    }

    pub fn from_coords(&self, ring: &ResidueRing, c: &[FieldElem]) -> RingElem {
        ring.from_coeffs(linalg::vec_mul(ring.field(), c, &self.images))
    }
}

pub fn is_normal_element(action: &dyn GaloisAction, x: &RingElem) -> bool {
    let ring = action.ring();
    let rows: Matrix = (0..action.group_order()).map(|g| action.apply(g, x).coeffs().to_vec()).collect();
    linalg::rank(ring.field(), &rows) == ring.degree()
}

/// Rejection sampling for a normal element.
pub fn find_normal_basis<R: Rng + ?Sized>(
    action: &dyn GaloisAction,
    rng: &mut R,
    max_tries: usize,
) -> Result<NormalBasis, NoiseError> {
    let ring = action.ring();
    if action.group_order() != ring.degree() {
        return Err(NoiseError::GroupOrderMismatch { group: action.group_order(), n: ring.degree() });
    }
    for tries in 1..=max_tries {
        let x = ring.random(rng);
        if x.is_zero() {
            continue;
        }
        match NormalBasis::from_generator(action, &x) {
            Ok(mut basis) => {
                basis.tries = tries;
                return Ok(basis);
            }
            Err(NoiseError::NotNormal) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(NoiseError::MaxTriesExceeded(max_tries))
}

/// Matrix of σ_g in normal coordinates; a permutation matrix for every g.
pub fn action_in_normal_coords(action: &dyn GaloisAction, basis: &NormalBasis, g: usize) -> Matrix {
    let ring = action.ring();
    basis
        .images
        .iter()
        .map(|row| basis.coords(ring.field(), &action.apply(g, &ring.from_coeffs(row.clone()))))
        .collect()
}

/// ∏ (q^{deg u_i} − 1) / q^N over the distinct irreducible factors u_i of X^N − 1.
pub fn normal_basis_probability(order: u64, q: u64) -> Result<BigRational, NoiseError> {
    let field = Arc::new(FieldCtx::with_order(q)?);
    if order == 0 || order.is_multiple_of(field.characteristic() as u64) {
        return Err(NoiseError::NonCoprimeOrder { n: order, q });
    }
    let x_n_minus_1 = &Poly::monomial(&field, field.one(), order as usize, Var::X) - &Poly::one(&field, Var::X);
    let numerator = factor(&x_n_minus_1)?
        .factors
        .iter()
        .map(|(u, _)| BigInt::from(q).pow(u.degree().unwrap_or(0) as u32) - 1)
        .product::<BigInt>();
    Ok(BigRational::new(numerator, BigInt::from(q).pow(order as u32)))
}

fn random_nonzero<R: Rng + ?Sized>(field: &FieldCtx, rng: &mut R) -> FieldElem {
    field.elem(rng.gen_range(1..field.order()))
}

fn bernoulli_coords<R: Rng + ?Sized>(field: &FieldCtx, n: usize, p: f64, rng: &mut R) -> Vec<FieldElem> {
    (0..n).map(|_| if rng.gen::<f64>() < p { random_nonzero(field, rng) } else { field.zero() }).collect()
}

pub fn sample_bernoulli<R: Rng + ?Sized>(ring: &ResidueRing, p: f64, rng: &mut R) -> Result<RingElem, NoiseError> {
    check_rate(p)?;
    Ok(ring.from_coeffs(bernoulli_coords(ring.field(), ring.degree(), p, rng)))
}

pub fn sample_fixed_weight<R: Rng + ?Sized>(ring: &ResidueRing, t: usize, rng: &mut R) -> Result<RingElem, NoiseError> {
    let n = ring.degree();
    if t > n {
        return Err(NoiseError::WeightOutOfRange { t, n });
    }
    let mut coeffs = vec![ring.field().zero(); n];
    for i in index::sample(rng, n, t).into_vec() {
        coeffs[i] = random_nonzero(ring.field(), rng);
    }
    Ok(ring.from_coeffs(coeffs))
}

pub fn sample_normal_noise<R: Rng + ?Sized>(
    ring: &ResidueRing,
    basis: &NormalBasis,
    p: f64,
    rng: &mut R,
) -> Result<RingElem, NoiseError> {
    check_rate(p)?;
    Ok(basis.from_coords(ring, &bernoulli_coords(ring.field(), ring.degree(), p, rng)))
}

/// The noise law ψ, together with its basis when it is normal noise.
#[derive(Clone, Debug)]
pub struct NoiseSpec {
    kind: NoiseKind,
    basis: Option<Arc<NormalBasis>>,
}

impl NoiseSpec {
    pub fn bernoulli(p: f64) -> Result<NoiseSpec, NoiseError> {
        check_rate(p)?;
        Ok(NoiseSpec { kind: NoiseKind::Bernoulli(p), basis: None })
    }

    pub fn fixed_weight(t: usize) -> NoiseSpec {
        NoiseSpec { kind: NoiseKind::FixedWeight(t), basis: None }
    }

    pub fn normal(p: f64, basis: Arc<NormalBasis>) -> Result<NoiseSpec, NoiseError> {
        check_rate(p)?;
        Ok(NoiseSpec { kind: NoiseKind::Normal(p), basis: Some(basis) })
    }

    /// Builds from a parsed kind; normal noise requires `basis`.
    pub fn from_kind(kind: NoiseKind, basis: Option<Arc<NormalBasis>>) -> Result<NoiseSpec, NoiseError> {
        kind.validate()?;
        match kind {
            NoiseKind::Normal(_) if basis.is_none() => Err(NoiseError::MissingBasis),
            NoiseKind::Normal(_) => Ok(NoiseSpec { kind, basis }),
            _ => Ok(NoiseSpec { kind, basis: None }),
        }
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn basis(&self) -> Option<&Arc<NormalBasis>> {
        self.basis.as_ref()
    }

    pub fn sample<R: Rng + ?Sized>(&self, ring: &ResidueRing, rng: &mut R) -> Result<RingElem, NoiseError> {
        match self.kind {
            NoiseKind::Bernoulli(p) => sample_bernoulli(ring, p, rng),
            NoiseKind::FixedWeight(t) => sample_fixed_weight(ring, t, rng),
            NoiseKind::Normal(p) => {
                sample_normal_noise(ring, self.basis.as_ref().ok_or(NoiseError::MissingBasis)?, p, rng)
            }
        }
    }

    /// Coordinates in which the noise is coordinate-wise (normal coordinates for
    /// normal noise, monomial coordinates otherwise).
    pub fn natural_coords(&self, ring: &ResidueRing, x: &RingElem) -> Vec<FieldElem> {
        match &self.basis {
            Some(b) => b.coords(ring.field(), x),
            None => x.coeffs().to_vec(),
        }
    }

    pub fn natural_weight(&self, ring: &ResidueRing, x: &RingElem) -> usize {
        self.natural_coords(ring, x).iter().filter(|c| !c.is_zero()).count()
    }

    pub fn expected_weight(&self, n: usize) -> f64 {
        match self.kind {
            NoiseKind::Bernoulli(p) | NoiseKind::Normal(p) => n as f64 * p,
            NoiseKind::FixedWeight(t) => t as f64,
        }
    }

    /// log ψ(e) as a function of the natural weight of e, for weights 0..=n.
    pub fn log_pmf_by_weight(&self, n: usize, q: u32) -> Vec<f64> {
        let q1 = (q - 1) as f64;
        match self.kind {
            NoiseKind::Bernoulli(p) | NoiseKind::Normal(p) => (0..=n)
                .map(|w| {
                    let zeros = (n - w) as f64 * (1.0 - p).ln();
                    if w == 0 {
                        zeros
                    } else {
                        zeros + w as f64 * (p / q1).ln()
                    }
                })
                .collect(),
            NoiseKind::FixedWeight(t) => {
                let log_binom: f64 = (0..t).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum();
                (0..=n).map(|w| if w == t { -log_binom - t as f64 * q1.ln() } else { f64::NEG_INFINITY }).collect()
            }
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub a: RingElem,
    pub b: RingElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModuleSample {
    pub a: Vec<RingElem>,
    pub b: RingElem,
}

impl From<Sample> for ModuleSample {
    fn from(s: Sample) -> Self {
        ModuleSample { a: vec![s.a], b: s.b }
    }
}

/// (a, a·s + e) with a uniform and e ← ψ.
pub fn ffdp_sample<R: Rng + ?Sized>(
    ring: &ResidueRing,
    s: &RingElem,
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<Sample, NoiseError> {
    let a = ring.random(rng);
    let e = noise.sample(ring, rng)?;
    let b = ring.add(&ring.mul(&a, s), &e);
    Ok(Sample { a, b })
}

/// (a_1..a_d, Σ a_i·s_i + e).
pub fn mffdp_sample<R: Rng + ?Sized>(
    ring: &ResidueRing,
    s: &[RingElem],
    noise: &NoiseSpec,
    rng: &mut R,
) -> Result<ModuleSample, NoiseError> {
    if s.is_empty() {
        return Err(NoiseError::EmptySecret);
    }
    let a: Vec<RingElem> = s.iter().map(|_| ring.random(rng)).collect();
    let e = noise.sample(ring, rng)?;
    let b = a.iter().zip(s).fold(e, |acc, (ai, si)| ring.add(&acc, &ring.mul(ai, si)));
    Ok(ModuleSample { a, b })
}
