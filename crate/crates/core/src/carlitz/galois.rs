//! Galois actions on residue rings by F_q-linear ring automorphisms.
//!
//! Group elements are addressed by their position in a fixed enumeration of
//! the group; position `identity()` is the neutral element.

use crate::residue::{ResidueRing, RingElem};

pub trait GaloisAction: Sync {
    fn ring(&self) -> &ResidueRing;

    fn group_order(&self) -> usize;

    fn identity(&self) -> usize;

    /// σ_g(x).
    fn apply(&self, g: usize, x: &RingElem) -> RingElem;

    /// Index of σ_g ∘ σ_h.
    fn compose(&self, g: usize, h: usize) -> usize;

    fn inverse(&self, g: usize) -> usize;

    /// π with σ_g(𝔓_i) = 𝔓_{π(i)} on CRT component indices.
    fn permutation(&self, g: usize) -> Vec<usize>;

    /// Human-readable name of the group element.
    fn label(&self, g: usize) -> String;

    /// Stabilizer of component i.
    fn decomposition_group(&self, i: usize) -> Vec<usize> {
        (0..self.group_order()).filter(|&g| self.permutation(g)[i] == i).collect()
    }

    /// Smallest g with σ_g(𝔓_from) = 𝔓_to.
    fn transporter(&self, from: usize, to: usize) -> Option<usize> {
        (0..self.group_order()).find(|&g| self.permutation(g)[from] == to)
    }

    /// Sorted orbit of component i.
    fn orbit(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.group_order()).map(|g| self.permutation(g)[i]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Applies the linear map with the given columns (images of 1, X, X^2, …).
pub(crate) fn apply_columns(ring: &ResidueRing, columns: &[RingElem], x: &RingElem) -> RingElem {
    let f = ring.field();
    let mut out = ring.zero().coeffs().to_vec();
    for (&c, col) in x.coeffs().iter().zip(columns) {
        if c.is_zero() {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(col.coeffs()) {
            *o = f.add(*o, f.mul(c, v));
        }
    }
    ring.from_coeffs(out)
}

/// Columns σ(X^j) = y^j of the automorphism sending X to y.
pub(crate) fn columns_from_image(ring: &ResidueRing, image_of_x: &RingElem) -> Vec<RingElem> {
    let mut cur = ring.one();
    (0..ring.degree())
        .map(|_| {
            let out = cur.clone();
            cur = ring.mul(&cur, image_of_x);
            out
        })
        .collect()
}

/// Tracks where each CRT idempotent is sent by `sigma`.
pub(crate) fn permutation_of_components(ring: &ResidueRing, sigma: impl Fn(&RingElem) -> RingElem) -> Vec<usize> {
    (0..ring.num_components())
        .map(|i| {
            let image = sigma(&ring.idempotent(i).expect("unramified ring"));
            (0..ring.num_components())
                .find(|&j| ring.component(&image, j).iter().any(|c| !c.is_zero()))
                .expect("automorphisms send idempotents to idempotents")
        })
        .collect()
}
