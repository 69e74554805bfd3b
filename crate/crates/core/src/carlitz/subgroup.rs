use std::sync::Arc;

use crate::algebra::{FieldCtx, FieldElem, Poly, Var};
use crate::residue::{ResidueRing, RingElem};

use super::galois::{permutation_of_components, GaloisAction};
use super::CarlitzError;

/// F_q[X]/(∏_{a ∈ bH}(X − a)) = F_q[X]/(X^k − b^k) with h ∈ H acting by
/// m(X) ↦ m(hX).
#[derive(Debug)]
pub struct SubgroupRing {
    subgroup: Vec<FieldElem>,
    shift: FieldElem,
    ring: ResidueRing,
    perms: Vec<Vec<usize>>,
}

impl SubgroupRing {
    pub fn new(
        field: &Arc<FieldCtx>,
        subgroup: &[FieldElem],
        shift: Option<FieldElem>,
    ) -> Result<SubgroupRing, CarlitzError> {
        let mut h: Vec<FieldElem> = subgroup.to_vec();
        h.sort_unstable_by_key(|x| x.value());
        h.dedup();
        let closed = !h.is_empty()
            && h.iter().all(|x| !x.is_zero() && x.value() < field.order())
            && h.iter()
                .all(|&a| h.iter().all(|&b| h.binary_search_by_key(&field.mul(a, b).value(), |x| x.value()).is_ok()));
        if !closed {
            return Err(CarlitzError::NotASubgroup);
        }
        let shift = shift.unwrap_or(field.one());
        if shift.is_zero() {
            return Err(CarlitzError::NotASubgroup);
        }
        let k = h.len();
        let modulus =
            &Poly::monomial(field, field.one(), k, Var::X) - &Poly::constant(field, field.pow(shift, k as u64), Var::X);
        let ring = ResidueRing::new(&modulus)?;
        let mut out = SubgroupRing { subgroup: h, shift, ring, perms: Vec::new() };
        out.perms = (0..k).map(|g| permutation_of_components(&out.ring, |x| out.apply(g, x))).collect();
        Ok(out)
    }

    /// All of F_q^×.
    pub fn full(field: &Arc<FieldCtx>) -> Result<SubgroupRing, CarlitzError> {
        let all: Vec<FieldElem> = field.elements().filter(|x| !x.is_zero()).collect();
        Self::new(field, &all, None)
    }

    pub fn subgroup(&self) -> &[FieldElem] {
        &self.subgroup
    }

    pub fn shift(&self) -> FieldElem {
        self.shift
    }

    /// Root a with component i equal to X − a.
    pub fn component_root(&self, i: usize) -> FieldElem {
        let f = self.ring.field();
        f.neg(self.ring.components()[i].poly.coeff(0))
    }
}

impl GaloisAction for SubgroupRing {
    fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    fn group_order(&self) -> usize {
        self.subgroup.len()
    }

    fn identity(&self) -> usize {
        0
    }

    fn apply(&self, g: usize, x: &RingElem) -> RingElem {
        let f = self.ring.field();
        let h = self.subgroup[g];
        let mut power = f.one();
        let coeffs = x
            .coeffs()
            .iter()
            .map(|&c| {
                let out = f.mul(c, power);
                power = f.mul(power, h);
                out
            })
            .collect();
        self.ring.from_coeffs(coeffs)
    }

    fn compose(&self, g: usize, h: usize) -> usize {
        let f = self.ring.field();
        let prod = f.mul(self.subgroup[g], self.subgroup[h]);
        self.subgroup.iter().position(|&x| x == prod).expect("closed under products")
    }

    fn inverse(&self, g: usize) -> usize {
        let f = self.ring.field();
        let inv = f.inv(self.subgroup[g]).expect("nonzero");
        self.subgroup.iter().position(|&x| x == inv).expect("closed under inverses")
    }

    fn permutation(&self, g: usize) -> Vec<usize> {
        self.perms[g].clone()
    }

    fn label(&self, g: usize) -> String {
        crate::algebra::text::format_elem(self.ring.field(), self.subgroup[g])
    }
}
