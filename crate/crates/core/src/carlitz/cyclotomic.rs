//! Carlitz cyclotomic polynomials Φ_M(T, X) = ∏_{D | M monic} [D](X)^{μ(M/D)}.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{factor, FieldCtx, FieldElem, Poly, Var};

use super::qpoly::{carlitz_poly, format_x_over_t, specialize};
use super::CarlitzError;

/// Polynomial in X with coefficients in F_q[T]; entry k is the coefficient of X^k.
#[derive(Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    field: Arc<FieldCtx>,
    coeffs: Vec<Poly>,
}

impl BivariatePoly {
    pub fn new(field: &Arc<FieldCtx>, mut coeffs: Vec<Poly>) -> BivariatePoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        BivariatePoly { field: field.clone(), coeffs }
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn mul(&self, other: &BivariatePoly) -> BivariatePoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return BivariatePoly::new(&self.field, Vec::new());
        }
        let mut out = vec![Poly::zero(&self.field, Var::T); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        BivariatePoly::new(&self.field, out)
    }

    /// Exact division by a divisor whose leading X-coefficient is 1.
    pub fn div_exact(&self, divisor: &BivariatePoly) -> Result<BivariatePoly, CarlitzError> {
        let d = divisor.x_degree().ok_or(CarlitzError::InexactDivision)?;
        if !divisor.coeffs[d].is_one() {
            return Err(CarlitzError::InexactDivision);
        }
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return if rem.iter().all(|c| c.is_zero()) {
                Ok(BivariatePoly::new(&self.field, Vec::new()))
            } else {
                Err(CarlitzError::InexactDivision)
            };
        }
        let mut quot = vec![Poly::zero(&self.field, Var::T); rem.len() - d];
        for k in (d..rem.len()).rev() {
            let c = rem[k].clone();
            if c.is_zero() {
                continue;
            }
            for (j, b) in divisor.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    rem[k - d + j] = &rem[k - d + j] - &(&c * b);
                }
            }
            quot[k - d] = c;
        }
        if rem[..d].iter().any(|c| !c.is_zero()) {
            return Err(CarlitzError::InexactDivision);
        }
        Ok(BivariatePoly::new(&self.field, quot))
    }

    /// Specializes T ↦ `t_image` in `target`, giving a polynomial in X.
    pub fn specialize(&self, target: &Arc<FieldCtx>, t_image: FieldElem) -> Poly {
        Poly::new(target.clone(), self.coeffs.iter().map(|c| specialize(c, target, t_image)).collect(), Var::X)
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_x_over_t(&self.coeffs))
    }
}

impl fmt::Debug for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Monic divisors D of M with μ(M/D) ≠ 0, paired with whether μ(M/D) = +1.
fn mobius_divisors(m: &Poly) -> Result<Vec<(Poly, bool)>, CarlitzError> {
    if m.is_constant() {
        return Ok(vec![(m.clone(), true)]);
    }
    let primes: Vec<Poly> = factor(m)?.factors.into_iter().map(|(p, _)| p).collect();
    let mut out = Vec::with_capacity(1 << primes.len());
    for mask in 0u32..(1 << primes.len()) {
        let mut d = m.clone();
        for (i, p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d = d.exact_div(p)?;
            }
        }
        out.push((d, mask.count_ones() % 2 == 0));
    }
    Ok(out)
}

fn check_monic(m: &Poly) -> Result<(), CarlitzError> {
    if m.is_zero() {
        Err(CarlitzError::ZeroConductor)
    } else if !m.is_monic() {
        Err(CarlitzError::NonMonicConductor)
    } else {
        Ok(())
    }
}

/// Φ_M(T, X) over F_q[T].
pub fn carlitz_cyclotomic(m: &Poly) -> Result<BivariatePoly, CarlitzError> {
    check_monic(m)?;
    let field = m.field().clone();
    let divisors = mobius_divisors(m)?;
    let as_bivariate = |d: &Poly| -> Result<BivariatePoly, CarlitzError> {
        Ok(BivariatePoly::new(&field, carlitz_poly(d)?.to_x_coeffs()))
    };
    let mut acc = BivariatePoly::new(&field, vec![Poly::one(&field, Var::T)]);
    for (d, positive) in &divisors {
        if *positive {
            acc = acc.mul(&as_bivariate(d)?);
        }
    }
    for (d, positive) in &divisors {
        if !*positive {
            acc = acc.div_exact(&as_bivariate(d)?)?;
        }
    }
    Ok(acc)
}

/// Φ_M(c, X) computed directly over `target` (specializing every [D] first).
pub fn specialized_cyclotomic(m: &Poly, target: &Arc<FieldCtx>, t_image: FieldElem) -> Result<Poly, CarlitzError> {
    check_monic(m)?;
    let divisors = mobius_divisors(m)?;
    let specialized = |d: &Poly| -> Result<Poly, CarlitzError> {
        let coeffs = carlitz_poly(d)?.to_x_coeffs();
        Ok(Poly::new(target.clone(), coeffs.iter().map(|c| specialize(c, target, t_image)).collect(), Var::X))
    };
    let mut acc = Poly::one(target, Var::X);
    for (d, positive) in &divisors {
        if *positive {
            acc = &acc * &specialized(d)?;
        }
    }
    for (d, positive) in &divisors {
        if !*positive {
            acc = acc.exact_div(&specialized(d)?).map_err(|_| CarlitzError::InexactDivision)?;
        }
    }
    Ok(acc)
}
