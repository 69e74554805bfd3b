//! Quotient rings F_q[X]/(f) and their Chinese Remainder decomposition.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::dense;
use crate::algebra::{factor, AlgebraError, Factorization, FieldCtx, FieldElem, Poly, Var};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResidueError {
    #[error("ring modulus must be monic of degree at least 1")]
    InvalidModulus,
    #[error("ring is ramified (repeated factor); CRT split is undefined")]
    RamifiedRing,
    #[error("component {index} residue has {len} coefficients, expected at most {degree}")]
    ComponentDegreeOverflow { index: usize, len: usize, degree: usize },
    #[error("expected {expected} components, got {got}")]
    ComponentCountMismatch { expected: usize, got: usize },
    #[error("zero has no inverse in component {0}")]
    ZeroInField(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Element of a residue ring: coefficient vector of length n = deg f,
/// lowest degree first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingElem(Vec<FieldElem>);

impl RingElem {
    pub fn coeffs(&self) -> &[FieldElem] {
        &self.0
    }

    pub fn values(&self) -> Vec<u32> {
        self.0.iter().map(|c| c.value()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// Indices of the nonzero coefficients.
    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect()
    }

    pub fn hamming_weight(&self) -> usize {
        self.0.iter().filter(|c| !c.is_zero()).count()
    }
}

impl Serialize for RingElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.values().serialize(s)
    }
}

/// One factor f_i^{k_i} of the modulus.
#[derive(Clone, Debug)]
pub struct Component {
    pub poly: Poly,
    pub degree: usize,
    pub multiplicity: u32,
}

/// Residue of an element in one CRT component: `degree` coefficients.
pub type ComponentElem = Vec<FieldElem>;

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct ComponentDescriptor {
    pub poly: String,
    pub degree: usize,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct RingDescriptor {
    pub q: u32,
    pub modulus_poly: String,
    pub components: Vec<ComponentDescriptor>,
}

pub struct ResidueRing {
    field: Arc<FieldCtx>,
    modulus: Poly,
    n: usize,
    factorization: Factorization,
    components: Vec<Component>,
    /// lifts[i][j] = X^j · e_i mod f with e_i the i-th CRT idempotent.
    lifts: Vec<Vec<Vec<FieldElem>>>,
}

impl std::fmt::Debug for ResidueRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}[X]/({})", self.field, self.modulus)
    }
}

impl ResidueRing {
    pub fn new(f: &Poly) -> Result<ResidueRing, ResidueError> {
        if !f.is_monic() || f.degree().unwrap_or(0) == 0 {
            return Err(ResidueError::InvalidModulus);
        }
        let factorization = factor(f)?;
        Ok(Self::with_factorization(f, factorization))
    }

    /// Builds the ring from a factorization the caller already has.
    pub fn with_factorization(f: &Poly, factorization: Factorization) -> ResidueRing {
        let field = f.field().clone();
        let modulus = f.clone().with_var(Var::X);
        let n = modulus.degree().expect("nonconstant");
        let components: Vec<Component> = factorization
            .factors
            .iter()
            .map(|(g, k)| Component {
                poly: g.pow(*k).with_var(Var::X),
                degree: g.degree().unwrap_or(0) * *k as usize,
                multiplicity: *k,
            })
            .collect();
        let mut ring = ResidueRing { field, modulus, n, factorization, components, lifts: Vec::new() };
        if ring.is_squarefree() {
            ring.lifts = ring.compute_lifts();
        }
        ring
    }

    fn compute_lifts(&self) -> Vec<Vec<Vec<FieldElem>>> {
        let fld = &self.field;
        let m = self.modulus.coeffs();
        self.components
            .iter()
            .map(|c| {
                let cofactor = self.modulus.exact_div(&c.poly).expect("factor divides modulus");
                let inv = cofactor.rem(&c.poly).and_then(|r| r.inv_mod(&c.poly)).expect("coprime");
                let idem = dense::mul_mod(fld, cofactor.coeffs(), inv.coeffs(), m);
                let mut cur = self.pad(idem);
                (0..c.degree)
                    .map(|_| {
                        let out = cur.clone();
                        let mut shifted = Vec::with_capacity(self.n + 1);
                        shifted.push(FieldElem::ZERO);
                        shifted.extend_from_slice(&cur);
                        dense::rem_monic_into(fld, &mut shifted, m);
                        cur = shifted;
                        out
                    })
                    .collect()
            })
            .collect()
    }

    fn pad(&self, mut v: Vec<FieldElem>) -> Vec<FieldElem> {
        v.resize(self.n, FieldElem::ZERO);
        v
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    /// n = deg f, the F_q-dimension of the ring.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn factorization(&self) -> &Factorization {
        &self.factorization
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factorization.is_squarefree()
    }

    /// Number of elements q^n, saturating.
    pub fn size(&self) -> u128 {
        (self.field.order() as u128).saturating_pow(self.n as u32)
    }

    pub fn component_size(&self, i: usize) -> u128 {
        (self.field.order() as u128).saturating_pow(self.components[i].degree as u32)
    }

    pub fn zero(&self) -> RingElem {
        RingElem(vec![FieldElem::ZERO; self.n])
    }

    pub fn one(&self) -> RingElem {
        self.from_coeffs(vec![self.field.one()])
    }

    /// Image of X.
    pub fn x(&self) -> RingElem {
        self.from_coeffs(vec![FieldElem::ZERO, self.field.one()])
    }

    /// Reduces an arbitrary coefficient vector modulo f.
    pub fn from_coeffs(&self, mut coeffs: Vec<FieldElem>) -> RingElem {
        dense::rem_monic_into(&self.field, &mut coeffs, self.modulus.coeffs());
        RingElem(coeffs)
    }

    pub fn from_poly(&self, p: &Poly) -> RingElem {
        self.from_coeffs(p.coeffs().to_vec())
    }

    pub fn to_poly(&self, x: &RingElem) -> Poly {
        Poly::new(self.field.clone(), x.0.clone(), Var::X)
    }

    /// Element whose coefficients are the base-q digits of `index`.
    pub fn from_index(&self, mut index: u64) -> RingElem {
        let q = self.field.order() as u64;
        RingElem(
            (0..self.n)
                .map(|_| {
                    let d = index % q;
                    index /= q;
                    self.field.elem(d as u32)
                })
                .collect(),
        )
    }

    pub fn index(&self, x: &RingElem) -> u64 {
        let q = self.field.order() as u64;
        x.0.iter().rev().fold(0, |acc, c| acc * q + c.value() as u64)
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        let size = u64::try_from(self.size()).expect("ring too large to enumerate");
        (0..size).map(|i| self.from_index(i))
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> RingElem {
        let q = self.field.order();
        RingElem((0..self.n).map(|_| self.field.elem(rng.gen_range(0..q))).collect())
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.field.add(x, y)).collect())
    }

    pub fn sub(&self, a: &RingElem, b: &RingElem) -> RingElem {
        RingElem(a.0.iter().zip(&b.0).map(|(&x, &y)| self.field.sub(x, y)).collect())
    }

    pub fn neg(&self, a: &RingElem) -> RingElem {
        RingElem(a.0.iter().map(|&x| self.field.neg(x)).collect())
    }

    pub fn scale(&self, a: &RingElem, c: FieldElem) -> RingElem {
        RingElem(a.0.iter().map(|&x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> RingElem {
        let f = &self.field;
        let mut prod = vec![FieldElem::ZERO; 2 * self.n];
        for (i, &x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] = f.add(prod[i + j], f.mul(x, y));
                }
            }
        }
        dense::rem_monic_into(f, &mut prod, self.modulus.coeffs());
        RingElem(prod)
    }

    pub fn pow(&self, a: &RingElem, mut k: u64) -> RingElem {
        let mut acc = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Columns of the F_q-linear map y ↦ a·y in the monomial basis.
    pub fn mul_matrix(&self, a: &RingElem) -> Vec<RingElem> {
        let x = self.x();
        let mut col = a.clone();
        (0..self.n)
            .map(|_| {
                let out = col.clone();
                col = self.mul(&col, &x);
                out
            })
            .collect()
    }

    /// Evaluates a polynomial (over the same field) at a ring element.
    pub fn eval_poly(&self, p: &Poly, x: &RingElem) -> RingElem {
        let mut acc = self.zero();
        for &c in p.coeffs().iter().rev() {
            acc = self.mul(&acc, x);
            acc.0[0] = self.field.add(acc.0[0], c);
        }
        acc
    }

    /// Residue of x modulo the i-th component polynomial (works for ramified rings too).
    pub fn component(&self, x: &RingElem, i: usize) -> ComponentElem {
        let c = &self.components[i];
        let mut r = dense::rem(&self.field, &x.0, c.poly.coeffs());
        r.resize(c.degree, FieldElem::ZERO);
        r
    }

    pub fn crt_split(&self, x: &RingElem) -> Result<Vec<ComponentElem>, ResidueError> {
        if !self.is_squarefree() {
            return Err(ResidueError::RamifiedRing);
        }
        Ok((0..self.components.len()).map(|i| self.component(x, i)).collect())
    }

    pub fn crt_combine(&self, parts: &[ComponentElem]) -> Result<RingElem, ResidueError> {
        if !self.is_squarefree() {
            return Err(ResidueError::RamifiedRing);
        }
        if parts.len() != self.components.len() {
            return Err(ResidueError::ComponentCountMismatch { expected: self.components.len(), got: parts.len() });
        }
        let mut out = vec![FieldElem::ZERO; self.n];
        for (i, part) in parts.iter().enumerate() {
            self.accumulate_lift(&mut out, part, i)?;
        }
        Ok(RingElem(out))
    }

    /// Element congruent to `c` in component i and to 0 in every other component.
    pub fn embed_component(&self, c: &[FieldElem], i: usize) -> Result<RingElem, ResidueError> {
        if !self.is_squarefree() {
            return Err(ResidueError::RamifiedRing);
        }
        let mut out = vec![FieldElem::ZERO; self.n];
        self.accumulate_lift(&mut out, c, i)?;
        Ok(RingElem(out))
    }

    fn accumulate_lift(&self, out: &mut [FieldElem], part: &[FieldElem], i: usize) -> Result<(), ResidueError> {
        let degree = self.components[i].degree;
        let mut trimmed = part.to_vec();
        dense::trim(&mut trimmed);
        if trimmed.len() > degree {
            return Err(ResidueError::ComponentDegreeOverflow { index: i, len: trimmed.len(), degree });
        }
        let f = &self.field;
        for (j, &c) in trimmed.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &l) in out.iter_mut().zip(&self.lifts[i][j]) {
                *o = f.add(*o, f.mul(c, l));
            }
        }
        Ok(())
    }

    /// The CRT idempotent e_i.
    pub fn idempotent(&self, i: usize) -> Result<RingElem, ResidueError> {
        self.embed_component(&[self.field.one()], i)
    }

    pub fn component_random<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> ComponentElem {
        let q = self.field.order();
        (0..self.components[i].degree).map(|_| self.field.elem(rng.gen_range(0..q))).collect()
    }

    pub fn component_mul(&self, a: &[FieldElem], b: &[FieldElem], i: usize) -> ComponentElem {
        let c = &self.components[i];
        let mut r = dense::mul_mod(&self.field, a, b, c.poly.coeffs());
        r.resize(c.degree, FieldElem::ZERO);
        r
    }

    /// Inverse in the residue field F_q[X]/(f_i), by extended gcd.
    pub fn component_inverse(&self, c: &[FieldElem], i: usize) -> Result<ComponentElem, ResidueError> {
        let comp = &self.components[i];
        let mut a = c.to_vec();
        dense::trim(&mut a);
        if a.is_empty() {
            return Err(ResidueError::ZeroInField(i));
        }
        let (g, s, _) = dense::ext_gcd(&self.field, &a, comp.poly.coeffs());
        if g.len() != 1 {
            return Err(ResidueError::ZeroInField(i));
        }
        let mut r = dense::rem(&self.field, &s, comp.poly.coeffs());
        r.resize(comp.degree, FieldElem::ZERO);
        Ok(r)
    }

    /// All elements of component i, by base-q index.
    pub fn component_elements(&self, i: usize) -> Vec<ComponentElem> {
        let q = self.field.order() as u64;
        let d = self.components[i].degree;
        let size = q.pow(d as u32);
        (0..size)
            .map(|mut k| {
                (0..d)
                    .map(|_| {
                        let v = k % q;
                        k /= q;
                        self.field.elem(v as u32)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn descriptor(&self) -> RingDescriptor {
        RingDescriptor {
            q: self.field.order(),
            modulus_poly: self.modulus.to_string(),
            components: self
                .components
                .iter()
                .map(|c| ComponentDescriptor { poly: c.poly.to_string(), degree: c.degree })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;
    use crate::algebra::parse_poly;

    fn ring(q: u64, f: &str) -> ResidueRing {
        let field = Arc::new(FieldCtx::with_order(q).unwrap());
        ResidueRing::new(&parse_poly(&field, f, Var::X).unwrap()).unwrap()
    }

    fn comp_of_root(r: &ResidueRing, root: u32) -> usize {
        let f = r.field();
        r.components().iter().position(|c| f.neg(c.poly.coeff(0)).value() == root).unwrap()
    }

    #[test]
    fn totally_split_f3_ring() {
        let r = ring(3, "x^2-1");
        assert_eq!(r.size(), 9);
        assert_eq!(r.num_components(), 2);
        assert!(r
            .components()
            .iter()
            .all(|c| r.component_size(r.components().iter().position(|d| d.poly == c.poly).unwrap()) == 3));
        let parts = r.crt_split(&r.x()).unwrap();
        // X evaluates to the root in each component
        assert_eq!(parts[comp_of_root(&r, 1)], vec![r.field().elem(1)]);
        assert_eq!(parts[comp_of_root(&r, 2)], vec![r.field().elem(2)]);
        assert!(r.crt_split(&r.zero()).unwrap().iter().all(|c| c.iter().all(|v| v.is_zero())));
    }

    #[test]
    fn ramified_ring_refuses_split() {
        let r = ring(2, "x^2");
        assert!(!r.is_squarefree());
        assert_eq!(r.components()[0].multiplicity, 2);
        assert_eq!(r.crt_split(&r.x()), Err(ResidueError::RamifiedRing));
    }

    #[test]
    fn lapin_ring_components() {
        let r = ring(2, "x^63+x^7+1");
        assert_eq!(r.num_components(), 7);
        assert!(r.components().iter().all(|c| c.degree == 9));
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = r.random(&mut rng);
            assert_eq!(r.crt_combine(&r.crt_split(&x).unwrap()).unwrap(), x);
        }
        // component inverse in F_{2^9}
        for i in 0..7 {
            let c = loop {
                let c = r.component_random(i, &mut rng);
                if c.iter().any(|v| !v.is_zero()) {
                    break c;
                }
            };
            let inv = r.component_inverse(&c, i).unwrap();
            let mut one = vec![r.field().zero(); 9];
            one[0] = r.field().one();
            assert_eq!(r.component_mul(&c, &inv, i), one);
        }
    }

    #[test]
    fn combine_of_units_and_zeros() {
        let r = ring(5, "x^4-1");
        let f = r.field().clone();
        let ones = vec![vec![f.one()]; 4];
        assert_eq!(r.crt_combine(&ones).unwrap(), r.one());
        let zeros = vec![vec![f.zero()]; 4];
        assert_eq!(r.crt_combine(&zeros).unwrap(), r.zero());
        assert!(matches!(
            r.crt_combine(&[vec![f.one(), f.one()], vec![f.zero()], vec![f.zero()], vec![f.zero()]]),
            Err(ResidueError::ComponentDegreeOverflow { index: 0, .. })
        ));
    }

    /// Lagrange idempotent for root 1 of X^4 - 1 over F_5, obtained by solving
    /// the Vandermonde system V·c = (1, 0, 0, 0) over the roots (1, 2, 3, 4).
    #[test]
    fn idempotent_matches_vandermonde_solution() {
        let r = ring(5, "x^4-1");
        let f = r.field().clone();
        let roots = [1u32, 2, 3, 4];
        // Gaussian elimination on the augmented Vandermonde matrix.
        let mut m: Vec<Vec<FieldElem>> = roots
            .iter()
            .enumerate()
            .map(|(row, &a)| {
                let mut v: Vec<FieldElem> = (0..4).map(|k| f.pow(f.elem(a), k)).collect();
                v.push(if row == 0 { f.one() } else { f.zero() });
                v
            })
            .collect();
        for col in 0..4 {
            let piv = (col..4).find(|&i| !m[i][col].is_zero()).unwrap();
            m.swap(col, piv);
            let inv = f.inv(m[col][col]).unwrap();
            for v in m[col].iter_mut() {
                *v = f.mul(*v, inv);
            }
            for i in 0..4 {
                if i != col {
                    let factor = m[i][col];
                    for k in 0..5 {
                        m[i][k] = f.sub(m[i][k], f.mul(factor, m[col][k]));
                    }
                }
            }
        }
        let expected: Vec<u32> = m.iter().map(|row| row[4].value()).collect();
        let mut parts = vec![vec![f.zero()]; 4];
        parts[comp_of_root(&r, 1)] = vec![f.one()];
        assert_eq!(r.crt_combine(&parts).unwrap().values(), expected);
        assert_eq!(expected, vec![4, 4, 4, 4]);
    }

    #[test]
    fn component_inverse_small() {
        let r = ring(3, "x^2-1");
        let f = r.field().clone();
        let i = comp_of_root(&r, 2); // X + 1
        assert_eq!(r.component_inverse(&[f.elem(2)], i).unwrap(), vec![f.elem(2)]);
        assert_eq!(r.component_inverse(&[f.one()], 0).unwrap(), vec![f.one()]);
        assert_eq!(r.component_inverse(&[f.zero()], 0), Err(ResidueError::ZeroInField(0)));
    }

    #[test]
    fn exhaustive_crt_round_trip_on_small_rings() {
        for (q, f) in [(3, "x^2-1"), (3, "x^4-1"), (2, "x^3+1"), (3, "x^3+2x+1"), (5, "x^2+2")] {
            let r = ring(q, f);
            for x in r.elements() {
                let parts = r.crt_split(&x).unwrap();
                assert_eq!(r.crt_combine(&parts).unwrap(), x);
            }
        }
    }
}
