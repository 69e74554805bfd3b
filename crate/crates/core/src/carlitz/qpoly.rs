//! Additive q-polynomials c_0·X + c_1·X^q + … + c_r·X^{q^r} with coefficients
//! in F_q[T], and the Carlitz polynomials [M](X).

use std::fmt;
use std::sync::Arc;

use crate::algebra::text::format_coeffs;
use crate::algebra::{FieldCtx, FieldElem, Poly, Var};
use crate::residue::{ResidueRing, RingElem};

use super::CarlitzError;

#[derive(Clone, PartialEq, Eq)]
pub struct QPoly {
    field: Arc<FieldCtx>,
    /// coeffs[i] multiplies X^{q^i}; trailing zero coefficients trimmed.
    coeffs: Vec<Poly>,
}

/// c(T)^q = c(T^q) because every coefficient of c lies in F_q.
pub(crate) fn frobenius_t(c: &Poly, times: u32) -> Poly {
    let q = c.field().order() as usize;
    let stride = q.pow(times);
    let mut out = vec![c.field().zero(); c.coeffs().len().saturating_sub(1) * stride + 1];
    for (k, &a) in c.coeffs().iter().enumerate() {
        out[k * stride] = a;
    }
    Poly::new(c.field().clone(), out, Var::T)
}

impl QPoly {
    pub fn new(field: &Arc<FieldCtx>, mut coeffs: Vec<Poly>) -> QPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { field: field.clone(), coeffs: coeffs.into_iter().map(|c| c.with_var(Var::T)).collect() }
    }

    /// The identity q-polynomial X = [1](X).
    pub fn identity(field: &Arc<FieldCtx>) -> QPoly {
        QPoly::new(field, vec![Poly::one(field, Var::T)])
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    /// Coefficient of X^{q^i}.
    pub fn coeff(&self, i: usize) -> Poly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Poly::zero(&self.field, Var::T))
    }

    /// Largest i with a nonzero coefficient of X^{q^i}.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree as an ordinary polynomial in X.
    pub fn x_degree(&self) -> Option<u64> {
        self.q_degree().map(|r| (self.field.order() as u64).pow(r as u32))
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        QPoly::new(&self.field, (0..len).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &Poly) -> QPoly {
        QPoly::new(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// self ∘ other: Σ_{i,j} a_i · b_j^{q^i} · X^{q^{i+j}}.
    pub fn compose(&self, other: &QPoly) -> QPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return QPoly::new(&self.field, Vec::new());
        }
        let mut out = vec![Poly::zero(&self.field, Var::T); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * &frobenius_t(b, i as u32));
            }
        }
        QPoly::new(&self.field, out)
    }

    /// Expands into an ordinary polynomial in X over F_q[T]: entry k of the
    /// result is the coefficient of X^k.
    pub fn to_x_coeffs(&self) -> Vec<Poly> {
        let q = self.field.order() as usize;
        let Some(deg) = self.x_degree() else { return Vec::new() };
        let mut out = vec![Poly::zero(&self.field, Var::T); deg as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[q.pow(i as u32)] = c.clone();
        }
        out
    }

    /// Evaluates at `x` in a ring that is an F_q[T]-algebra via T ↦ `t_image`.
    /// The ring's field must either equal the coefficient field or be an
    /// extension of a prime coefficient field.
    pub fn eval_in(&self, ring: &ResidueRing, t_image: FieldElem, x: &RingElem) -> RingElem {
        let q = self.field.order() as u64;
        let mut acc = ring.zero();
        let mut power = x.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = ring.pow(&power, q);
            }
            let ci = specialize(c, ring.field(), t_image);
            acc = ring.add(&acc, &ring.scale(&power, ci));
        }
        acc
    }
}

/// Image of c(T) under T ↦ t_image in `target` (same field, or an extension of
/// a prime field whose elements embed as integers).
pub(crate) fn specialize(c: &Poly, target: &FieldCtx, t_image: FieldElem) -> FieldElem {
    let src = c.field();
    c.coeffs().iter().rev().fold(target.zero(), |acc, &a| {
        let a = if **src == *target { a } else { target.from_int(a.value() as i64) };
        target.add(target.mul(acc, t_image), a)
    })
}

/// [M](X), built from [T](X) = X^q + T·X, [T^k] = [T]∘[T^{k−1}] and
/// F_q-linearity in M.
pub fn carlitz_poly(m: &Poly) -> Result<QPoly, CarlitzError> {
    if m.is_zero() {
        return Err(CarlitzError::ZeroConductor);
    }
    let field = m.field().clone();
    let t = Poly::var(&field, Var::T);
    let mut power = QPoly::identity(&field);
    let mut acc = QPoly::new(&field, Vec::new());
    for (k, &a) in m.coeffs().iter().enumerate() {
        if k > 0 {
            // [T]([T^{k-1}]): new_i = old_{i-1}^q + T·old_i
            let old = power.coeffs.clone();
            let mut next = Vec::with_capacity(old.len() + 1);
            for i in 0..=old.len() {
                let mut c = Poly::zero(&field, Var::T);
                if i > 0 {
                    c = &c + &frobenius_t(&old[i - 1], 1);
                }
                if i < old.len() {
                    c = &c + &(&t * &old[i]);
                }
                next.push(c);
            }
            power = QPoly::new(&field, next);
        }
        if !a.is_zero() {
            acc = acc.add(&power.scale(&Poly::constant(&field, a, Var::T)));
        }
    }
    Ok(acc)
}

/// [M] ∘ [N]; equals [MN].
pub fn carlitz_compose(m: &Poly, n: &Poly) -> Result<QPoly, CarlitzError> {
    Ok(carlitz_poly(m)?.compose(&carlitz_poly(n)?))
}

pub(crate) fn format_t_coeff(c: &Poly, wrap: bool) -> String {
    let s = format_coeffs(c.field(), c.coeffs(), 't');
    let terms = c.coeffs().iter().filter(|a| !a.is_zero()).count();
    if wrap && terms > 1 {
        format!("({s})")
    } else {
        s
    }
}

/// Prints Σ c_k X^k for coefficients in F_q[T], highest degree first.
pub(crate) fn format_x_over_t(coeffs: &[Poly]) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{k}"),
        };
        terms.push(if k == 0 {
            format_t_coeff(c, false)
        } else if c.is_one() {
            mono
        } else {
            format!("{}*{mono}", format_t_coeff(c, true))
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_x_over_t(&self.to_x_coeffs()))
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn tpoly(f: &Arc<FieldCtx>, s: &str) -> Poly {
        parse_poly(f, s, Var::T).unwrap()
    }

    #[test]
    fn carlitz_t_and_t_squared() {
        for q in [2u64, 3, 4, 5] {
            let f = Arc::new(FieldCtx::with_order(q).unwrap());
            let ct = carlitz_poly(&tpoly(&f, "t")).unwrap();
            assert_eq!(ct.coeffs(), &[tpoly(&f, "t"), tpoly(&f, "1")]);
            let ct2 = carlitz_poly(&tpoly(&f, "t^2")).unwrap();
            let tq_plus_t = &Poly::monomial(&f, f.one(), q as usize, Var::T) + &tpoly(&f, "t");
            assert_eq!(ct2.coeffs(), &[tpoly(&f, "t^2"), tq_plus_t, tpoly(&f, "1")]);
            assert_eq!(ct2.x_degree(), Some(q * q));
        }
    }

    #[test]
    fn carlitz_t2_t_1() {
        let f = Arc::new(FieldCtx::with_order(3).unwrap());
        let c = carlitz_poly(&tpoly(&f, "t^2+t+1")).unwrap();
        assert_eq!(c.coeffs(), &[tpoly(&f, "t^2+t+1"), tpoly(&f, "t^3+t+1"), tpoly(&f, "1")]);
        assert_eq!(carlitz_poly(&tpoly(&f, "1")).unwrap(), QPoly::identity(&f));
        assert_eq!(carlitz_poly(&Poly::zero(&f, Var::T)), Err(CarlitzError::ZeroConductor));
    }

    #[test]
    fn printing() {
        let f2 = Arc::new(FieldCtx::prime(2).unwrap());
        assert_eq!(carlitz_poly(&tpoly(&f2, "t")).unwrap().to_string(), "x^2 + t*x");
        assert_eq!(carlitz_poly(&tpoly(&f2, "t^2")).unwrap().to_string(), "x^4 + (t^2 + t)*x^2 + t^2*x");
    }

    #[test]
    fn composition_with_identity_and_square() {
        let f = Arc::new(FieldCtx::with_order(5).unwrap());
        let t = tpoly(&f, "t");
        assert_eq!(carlitz_compose(&t, &t).unwrap(), carlitz_poly(&tpoly(&f, "t^2")).unwrap());
        let m = tpoly(&f, "2t^2+3t+1");
        assert_eq!(carlitz_compose(&tpoly(&f, "1"), &m).unwrap(), carlitz_poly(&m).unwrap());
    }
}
