//! Finite fields F_q with q = p^e.
//!
//! Elements are stored as a single `u32` index. For prime fields the index is
//! the residue in `0..p`; for extension fields it packs the coefficient vector
//! over F_p (low degree first) as base-p digits, so equal elements always have
//! equal indices.

use std::fmt;

use super::AlgebraError;

/// Largest extension field we build log/exp tables for.
const MAX_EXTENSION_ORDER: u64 = 1 << 20;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    /// Raw canonical index in `0..q`.
    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The field F_q together with everything needed to do arithmetic in it.
pub struct FieldCtx {
    p: u32,
    e: u32,
    q: u32,
    /// Defining polynomial over F_p, low degree first, monic, length e + 1.
    modulus: Vec<u32>,
    /// exp[i] = g^i for a fixed primitive element g (extension fields only).
    exp: Vec<u32>,
    /// log[x] for x != 0 (extension fields only).
    log: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.p, self.e, self.modulus)
        }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Prime field F_p.
    pub fn prime(p: u32) -> Result<FieldCtx, AlgebraError> {
        if !is_prime(p as u64) || p >= 1 << 31 {
            return Err(AlgebraError::NonPrimeCharacteristic(p as u64));
        }
        Ok(FieldCtx { p, e: 1, q: p, modulus: vec![0, 1], exp: Vec::new(), log: Vec::new() })
    }

    /// F_{p^e}. When `modulus` is `None` and `e > 1`, the lexicographically least
    /// monic irreducible of degree `e` (coefficients compared from the constant
    /// term upwards) is used.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<FieldCtx, AlgebraError> {
        if e == 0 {
            return Err(AlgebraError::InvalidDegree(0));
        }
        let base = FieldCtx::prime(p)?;
        if e == 1 {
            return Ok(base);
        }
        let order = (p as u64).checked_pow(e).filter(|&q| q <= MAX_EXTENSION_ORDER);
        let Some(q) = order else {
            return Err(AlgebraError::FieldTooLarge((p as u128).pow(e)));
        };
        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u32> = m.iter().map(|&c| c % p).collect();
                if m.len() != e as usize + 1 || m[e as usize] != 1 {
                    return Err(AlgebraError::InvalidDegree(m.len().saturating_sub(1)));
                }
                if !prime_poly_irreducible(&base, &m) {
                    return Err(AlgebraError::ReducibleModulus { p });
                }
                m
            }
            None => default_modulus(&base, e),
        };
        let mut ctx = FieldCtx { p, e, q: q as u32, modulus, exp: Vec::new(), log: Vec::new() };
        ctx.build_log_tables();
        Ok(ctx)
    }

    /// Builds F_q from the cardinality alone, using the default modulus.
    pub fn with_order(q: u64) -> Result<FieldCtx, AlgebraError> {
        let (p, e) = prime_power(q).ok_or(AlgebraError::NonPrimeCharacteristic(q))?;
        FieldCtx::new(p as u32, e, None)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Defining polynomial over F_p (low degree first).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// Element with canonical index `v`; panics when `v >= q`.
    #[inline]
    pub fn elem(&self, v: u32) -> FieldElem {
        assert!(v < self.q, "index {v} outside F_{}", self.q);
        FieldElem(v)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u32)
    }

    /// Element from its coordinate vector over F_p (low degree first).
    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElem, AlgebraError> {
        if coords.len() > self.e as usize {
            return Err(AlgebraError::InvalidDegree(coords.len()));
        }
        let mut v = 0u32;
        for &c in coords.iter().rev() {
            v = v * self.p + c % self.p;
        }
        Ok(FieldElem(v))
    }

    /// Coordinate vector over F_p, length e.
    pub fn coords(&self, x: FieldElem) -> Vec<u32> {
        let mut v = x.0;
        (0..self.e)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.e == 1 {
            let s = a.0 + b.0;
            FieldElem(if s >= self.p { s - self.p } else { s })
        } else if self.p == 2 {
            FieldElem(a.0 ^ b.0)
        } else {
            let (mut x, mut y, mut out, mut scale) = (a.0, b.0, 0u32, 1u32);
            for _ in 0..self.e {
                let d = (x % self.p + y % self.p) % self.p;
                out += d * scale;
                scale *= self.p;
                x /= self.p;
                y /= self.p;
            }
            FieldElem(out)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.e == 1 {
            FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 })
        } else if self.p == 2 {
            a
        } else {
            let (mut x, mut out, mut scale) = (a.0, 0u32, 1u32);
            for _ in 0..self.e {
                let d = x % self.p;
                out += ((self.p - d) % self.p) * scale;
                scale *= self.p;
                x /= self.p;
            }
            FieldElem(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        if self.e == 1 {
            FieldElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
        } else {
            let n = self.q - 1;
            let s = self.log[a.0 as usize] + self.log[b.0 as usize];
            FieldElem(self.exp[(if s >= n { s - n } else { s }) as usize])
        }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::ZeroInverse);
        }
        if self.e == 1 {
            Ok(self.pow(a, (self.p - 2) as u64))
        } else {
            let n = self.q - 1;
            let l = self.log[a.0 as usize];
            Ok(FieldElem(self.exp[((n - l) % n) as usize]))
        }
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, AlgebraError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, mut k: u64) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn elem_order(&self, a: FieldElem) -> Result<u64, AlgebraError> {
        if a.is_zero() {
            return Err(AlgebraError::ZeroInverse);
        }
        let mut order = (self.q - 1) as u64;
        for (l, _) in factor_u64(order) {
            while order.is_multiple_of(l) && self.pow(a, order / l) == self.one() {
                order /= l;
            }
        }
        Ok(order)
    }

    fn build_log_tables(&mut self) {
        let q = self.q as usize;
        let mut exp = vec![0u32; q - 1];
        let mut log = vec![0u32; q];
        for g in 2..self.q {
            let mut x = 1u32;
            let mut ok = true;
            for (i, slot) in exp.iter_mut().enumerate() {
                if i > 0 && x == 1 {
                    ok = false;
                    break;
                }
                *slot = x;
                x = self.mul_coords(x, g);
            }
            if ok && x == 1 {
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("every finite field has a primitive element");
    }

    /// Schoolbook product of packed coordinate vectors reduced by the modulus.
    fn mul_coords(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let e = self.e as usize;
        let ca = self.coords(FieldElem(a));
        let cb = self.coords(FieldElem(b));
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for k in (e..prod.len()).rev() {
            let c = prod[k];
            if c != 0 {
                for (j, &m) in self.modulus[..e].iter().enumerate() {
                    let t = (c * m as u64) % p;
                    prod[k - e + j] = (prod[k - e + j] + p - t) % p;
                }
                prod[k] = 0;
            }
        }
        let mut out = 0u64;
        for &c in prod[..e].iter().rev() {
            out = out * p + c;
        }
        out as u32
    }
}

/// Writes `n` as p^e when it is a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    let f = factor_u64(n);
    if f.len() == 1 {
        Some(f[0])
    } else {
        None
    }
}

/// Prime factorization of a machine integer by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn prime_poly_irreducible(base: &FieldCtx, m: &[u32]) -> bool {
    use super::poly::{Poly, Var};
    use std::sync::Arc;
    let field = Arc::new(FieldCtx::prime(base.p).expect("prime checked"));
    let coeffs = m.iter().map(|&c| FieldElem(c)).collect();
    let poly = Poly::new(field, coeffs, Var::X);
    super::factor::is_irreducible(&poly).unwrap_or(false)
}

fn default_modulus(base: &FieldCtx, e: u32) -> Vec<u32> {
    let p = base.p as u64;
    let count = p.pow(e);
    for k in 0..count {
        // c_0 is the most significant digit so the scan is lexicographic from
        // the constant term upwards.
        let mut m = vec![0u32; e as usize + 1];
        let mut v = k;
        for i in (0..e as usize).rev() {
            m[i] = (v % p) as u32;
            v /= p;
        }
        m[e as usize] = 1;
        if m[0] != 0 && prime_poly_irreducible(base, &m) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
