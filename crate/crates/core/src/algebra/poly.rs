use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::dense;
use super::field::{FieldCtx, FieldElem};
use super::AlgebraError;

/// Which indeterminate a polynomial is written in. Only affects printing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    X,
}

impl Var {
    pub fn symbol(self) -> char {
        match self {
            Var::T => 't',
            Var::X => 'x',
        }
    }
}

/// Dense univariate polynomial over F_q in normalized form.
#[derive(Clone)]
pub struct Poly {
    field: Arc<FieldCtx>,
    coeffs: Vec<FieldElem>,
    var: Var,
}

impl Poly {
    pub fn new(field: Arc<FieldCtx>, mut coeffs: Vec<FieldElem>, var: Var) -> Poly {
        dense::trim(&mut coeffs);
        Poly { field, coeffs, var }
    }

    /// Coefficients given as integers mapped into the prime subfield.
    pub fn from_ints(field: &Arc<FieldCtx>, coeffs: &[i64], var: Var) -> Poly {
        let c = coeffs.iter().map(|&v| field.from_int(v)).collect();
        Poly::new(field.clone(), c, var)
    }

    pub fn zero(field: &Arc<FieldCtx>, var: Var) -> Poly {
        Poly::new(field.clone(), Vec::new(), var)
    }

    pub fn one(field: &Arc<FieldCtx>, var: Var) -> Poly {
        Poly::constant(field, field.one(), var)
    }

    pub fn constant(field: &Arc<FieldCtx>, c: FieldElem, var: Var) -> Poly {
        Poly::new(field.clone(), vec![c], var)
    }

    /// The indeterminate itself.
    pub fn var(field: &Arc<FieldCtx>, var: Var) -> Poly {
        Poly::monomial(field, field.one(), 1, var)
    }

    pub fn monomial(field: &Arc<FieldCtx>, c: FieldElem, k: usize, var: Var) -> Poly {
        let mut v = vec![field.zero(); k + 1];
        v[k] = c;
        Poly::new(field.clone(), v, var)
    }

    /// Polynomial whose coefficient vector is the base-q expansion of `index`.
    pub fn from_index(field: &Arc<FieldCtx>, mut index: u64, var: Var) -> Poly {
        let q = field.order() as u64;
        let mut c = Vec::new();
        while index > 0 {
            c.push(field.elem((index % q) as u32));
            index /= q;
        }
        Poly::new(field.clone(), c, var)
    }

    /// Inverse of [`Poly::from_index`].
    pub fn index(&self) -> u64 {
        let q = self.field.order() as u64;
        self.coeffs.iter().rev().fold(0u64, |acc, c| acc * q + c.value() as u64)
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn variable(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Poly {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == self.field.one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> FieldElem {
        self.coeffs.last().copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == self.field.one()
    }

    pub fn monic(&self) -> Poly {
        self.wrap(dense::make_monic(&self.field, &self.coeffs))
    }

    pub fn scale(&self, c: FieldElem) -> Poly {
        self.wrap(dense::scale(&self.field, &self.coeffs, c))
    }

    pub fn eval(&self, x: FieldElem) -> FieldElem {
        dense::eval(&self.field, &self.coeffs, x)
    }

    pub fn derivative(&self) -> Poly {
        self.wrap(dense::derivative(&self.field, &self.coeffs))
    }

    pub fn same_field(&self, other: &Poly) -> bool {
        Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field
    }

    fn check(&self, other: &Poly) -> Result<(), AlgebraError> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(AlgebraError::MixedFieldContexts)
        }
    }

    pub(crate) fn wrap(&self, coeffs: Vec<FieldElem>) -> Poly {
        Poly::new(self.field.clone(), coeffs, self.var)
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check(other)?;
        Ok(self.wrap(dense::add(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check(other)?;
        Ok(self.wrap(dense::sub(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check(other)?;
        Ok(self.wrap(dense::mul(&self.field, &self.coeffs, &other.coeffs)))
    }

    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly), AlgebraError> {
        self.check(divisor)?;
        if divisor.is_zero() {
            return Err(AlgebraError::DivisionByZeroPoly);
        }
        let (q, r) = dense::divmod(&self.field, &self.coeffs, &divisor.coeffs);
        Ok((self.wrap(q), self.wrap(r)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly, AlgebraError> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &Poly) -> Result<Poly, AlgebraError> {
        let (q, r) = self.divmod(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(AlgebraError::InexactDivision)
        }
    }

    pub fn divides(&self, other: &Poly) -> Result<bool, AlgebraError> {
        Ok(other.rem(self)?.is_zero())
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.check(other)?;
        Ok(self.wrap(dense::gcd(&self.field, &self.coeffs, &other.coeffs)))
    }

    /// (g, s, t) with s·self + t·other = g, g the monic gcd.
    pub fn ext_gcd(&self, other: &Poly) -> Result<(Poly, Poly, Poly), AlgebraError> {
        self.check(other)?;
        let (g, s, t) = dense::ext_gcd(&self.field, &self.coeffs, &other.coeffs);
        Ok((self.wrap(g), self.wrap(s), self.wrap(t)))
    }

    /// Inverse modulo `m`.
    pub fn inv_mod(&self, m: &Poly) -> Result<Poly, AlgebraError> {
        let (g, s, _) = self.ext_gcd(m)?;
        if !g.is_one() {
            return Err(AlgebraError::NotCoprime);
        }
        s.rem(m)
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.field, self.var);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// self^k mod m.
    pub fn pow_mod(&self, k: u64, m: &Poly) -> Result<Poly, AlgebraError> {
        self.check(m)?;
        if m.is_zero() {
            return Err(AlgebraError::DivisionByZeroPoly);
        }
        Ok(self.wrap(dense::pow_mod(&self.field, &self.coeffs, k, &m.coeffs)))
    }

    /// self(g), both in the same ring.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field, g.var);
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(&self.field, c, g.var);
        }
        acc
    }

    /// Ordering used for factor lists: by degree, then coefficients compared
    /// from the constant term upwards.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl Hash for Poly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::text::format_poly(self))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomials over different fields")
            }
        }
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.wrap(self.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}
