//! The unit group (F_q[T]/(M))^× and multiplicative orders in it.

use super::factor::factor;
use super::field::factor_u64;
use super::poly::Poly;
use super::AlgebraError;

/// Default cap on the number of residues `unit_group` will enumerate.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 20;

/// |(F_q[T]/(M))^×| = ∏ (q^{d·k} − q^{d·(k−1)}) over the factors P^k of M, d = deg P.
pub fn euler_phi(m: &Poly) -> Result<u64, AlgebraError> {
    match m.degree() {
        None => return Err(AlgebraError::DivisionByZeroPoly),
        Some(0) => return Ok(1),
        Some(_) => {}
    }
    let q = m.field().order() as u64;
    let mut phi = 1u64;
    for (p, k) in factor(m)?.factors {
        let d = p.degree().unwrap_or(0) as u32;
        let norm = q.pow(d);
        phi *= norm.pow(k - 1) * (norm - 1);
    }
    Ok(phi)
}

/// Smallest f ≥ 1 with a^f ≡ 1 (mod m).
pub fn mult_order(a: &Poly, m: &Poly) -> Result<u64, AlgebraError> {
    if m.is_zero() {
        return Err(AlgebraError::DivisionByZeroPoly);
    }
    if !a.gcd(m)?.is_one() {
        return Err(AlgebraError::NotCoprime);
    }
    if m.is_constant() {
        return Ok(1);
    }
    let one = Poly::one(m.field(), m.variable());
    let mut order = euler_phi(m)?;
    for (l, _) in factor_u64(order) {
        while order % l == 0 && a.pow_mod(order / l, m)?.with_var(m.variable()) == one {
            order /= l;
        }
    }
    Ok(order)
}

/// All residues of degree < deg m coprime to m, ordered by their base-q index.
pub fn unit_group(m: &Poly) -> Result<Vec<Poly>, AlgebraError> {
    unit_group_bounded(m, DEFAULT_ENUMERATION_BOUND)
}

pub fn unit_group_bounded(m: &Poly, bound: u64) -> Result<Vec<Poly>, AlgebraError> {
    let d = m.degree().ok_or(AlgebraError::DivisionByZeroPoly)?;
    let q = m.field().order() as u128;
    let size = q.pow(d as u32);
    if size > bound as u128 {
        return Err(AlgebraError::EnumerationBoundExceeded { size, bound: bound as u128 });
    }
    if d == 0 {
        return Ok(vec![Poly::one(m.field(), m.variable())]);
    }
    Ok((0..size as u64)
        .map(|k| Poly::from_index(m.field(), k, m.variable()))
        .filter(|a| !a.is_zero() && a.gcd(m).map(|g| g.is_one()).unwrap_or(false))
        .collect())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::algebra::field::FieldCtx;
    use crate::algebra::poly::Var;
    use crate::algebra::text::parse_poly;

    fn t(q: u64, s: &str) -> Poly {
        let f = Arc::new(FieldCtx::with_order(q).unwrap());
        parse_poly(&f, s, Var::T).unwrap()
    }

    #[test]
    fn lapin_conductor_order_and_group() {
        let m = t(2, "t^6+t^3+1");
        let tt = Poly::var(m.field(), Var::T);
        assert_eq!(mult_order(&tt, &m).unwrap(), 9);
        assert_eq!(unit_group(&m).unwrap().len(), 63);
        assert_eq!(euler_phi(&m).unwrap(), 63);
    }

    #[test]
    fn orders_from_examples() {
        for q in [2u64, 3, 4, 5, 7] {
            let m = t(q, "t");
            let a = t(q, "t+1");
            assert_eq!(mult_order(&a, &m).unwrap(), 1);
            let units = unit_group(&m).unwrap();
            assert_eq!(units.len() as u64, q - 1);
        }
        assert_eq!(mult_order(&t(3, "t"), &t(3, "t^2+1")).unwrap(), 4);
        assert_eq!(mult_order(&t(3, "t"), &t(3, "t^2")), Err(AlgebraError::NotCoprime));
    }

    #[test]
    fn units_mod_t_squared_over_f2() {
        let m = t(2, "t^2");
        let units = unit_group(&m).unwrap();
        assert_eq!(units, vec![t(2, "1"), t(2, "t+1")]);
    }

    #[test]
    fn enumeration_bound() {
        let m = t(2, "t^6+t^3+1");
        assert!(matches!(unit_group_bounded(&m, 32), Err(AlgebraError::EnumerationBoundExceeded { .. })));
    }
}
