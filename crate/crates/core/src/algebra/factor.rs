//! Irreducibility testing and complete factorization over F_q.
//!
//! Small inputs are factored by trial division against all monic irreducibles
//! of degree at most half the input degree; everything else goes through
//! squarefree decomposition, distinct-degree factorization and
//! Cantor–Zassenhaus equal-degree splitting.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{factor_u64, FieldCtx, FieldElem};
use super::poly::{Poly, Var};
use super::AlgebraError;

/// Largest degree handed to trial division.
const TRIAL_DIVISION_MAX_DEGREE: usize = 16;
/// Cap on the number of candidate divisors trial division may enumerate.
const TRIAL_DIVISION_MAX_CANDIDATES: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FieldElem,
    /// Distinct monic irreducibles with multiplicities, in canonical order.
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// unit × ∏ factor^multiplicity.
    pub fn expand(&self, field: &Arc<FieldCtx>, var: Var) -> Poly {
        let mut acc = Poly::constant(field, self.unit, var);
        for (f, k) in &self.factors {
            acc = &acc * &f.pow(*k);
        }
        acc.with_var(var)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, k)| *k == 1)
    }

    /// Degrees of the distinct factors, in factor order.
    pub fn degrees(&self) -> Vec<usize> {
        self.factors.iter().map(|(f, _)| f.degree().unwrap_or(0)).collect()
    }

    /// Number of irreducible factors counted with multiplicity.
    pub fn count_with_multiplicity(&self) -> u32 {
        self.factors.iter().map(|(_, k)| k).sum()
    }
}

/// x^(q^k) mod f, by k successive q-th powers.
pub(crate) fn frobenius_power(x: &Poly, k: u64, f: &Poly) -> Poly {
    let q = f.field().order() as u64;
    let mut h = x.rem(f).expect("nonzero modulus");
    for _ in 0..k {
        h = h.pow_mod(q, f).expect("nonzero modulus");
    }
    h
}

/// Rabin's test: f irreducible of degree n iff x^(q^n) ≡ x (mod f) and
/// gcd(x^(q^(n/l)) - x, f) = 1 for every prime l dividing n.
pub fn is_irreducible(f: &Poly) -> Result<bool, AlgebraError> {
    let n = match f.degree() {
        None | Some(0) => return Err(AlgebraError::ConstantPolynomial),
        Some(n) => n,
    };
    if n == 1 {
        return Ok(true);
    }
    let f = f.monic();
    let x = Poly::var(f.field(), f.variable());
    if f.coeff(0).is_zero() {
        return Ok(false);
    }
    if frobenius_power(&x, n as u64, &f) != x.rem(&f)? {
        return Ok(false);
    }
    for (l, _) in factor_u64(n as u64) {
        let h = frobenius_power(&x, n as u64 / l, &f);
        if !(&h - &x).gcd(&f)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Complete factorization into monic irreducibles.
pub fn factor(f: &Poly) -> Result<Factorization, AlgebraError> {
    let unit = match f.degree() {
        None | Some(0) => return Err(AlgebraError::ConstantPolynomial),
        Some(_) => f.leading(),
    };
    let monic = f.monic();
    let mut out = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for g in factor_squarefree(&part) {
            out.push((g, mult));
        }
    }
    Ok(Factorization { unit, factors: normalize(out) })
}

/// Trial division against every monic irreducible of degree ≤ deg f / 2.
/// Exponential in the degree; used for small inputs and as a test oracle.
pub fn factor_by_trial_division(f: &Poly) -> Result<Factorization, AlgebraError> {
    let n = match f.degree() {
        None | Some(0) => return Err(AlgebraError::ConstantPolynomial),
        Some(n) => n,
    };
    let unit = f.leading();
    let mut rest = f.monic();
    let mut out = Vec::new();
    let mut d = 1;
    while d <= n / 2 && rest.degree().unwrap_or(0) >= 2 * d {
        for g in monic_irreducibles(f.field(), d, f.variable()) {
            let mut k = 0;
            while let Ok(qt) = rest.exact_div(&g) {
                rest = qt;
                k += 1;
            }
            if k > 0 {
                out.push((g, k));
            }
            if rest.degree().unwrap_or(0) < 2 * d {
                break;
            }
        }
        d += 1;
    }
    if rest.degree().unwrap_or(0) > 0 {
        out.push((rest, 1));
    }
    Ok(Factorization { unit, factors: normalize(out) })
}

/// All monic irreducibles of degree d, in canonical order.
pub fn monic_irreducibles(field: &Arc<FieldCtx>, d: usize, var: Var) -> Vec<Poly> {
    let q = field.order() as u64;
    let count = q.pow(d as u32);
    let mut out: Vec<Poly> = (0..count)
        .map(|k| {
            let mut p = Poly::from_index(field, k, var).coeffs().to_vec();
            p.resize(d, field.zero());
            p.push(field.one());
            Poly::new(field.clone(), p, var)
        })
        .filter(|p| is_irreducible(p).unwrap_or(false))
        .collect();
    out.sort_by(|a, b| a.canonical_cmp(b));
    out
}

fn normalize(mut factors: Vec<(Poly, u32)>) -> Vec<(Poly, u32)> {
    factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    let mut merged: Vec<(Poly, u32)> = Vec::with_capacity(factors.len());
    for (g, k) in factors {
        match merged.last_mut() {
            Some((h, m)) if *h == g => *m += k,
            _ => merged.push((g, k)),
        }
    }
    merged
}

/// Splits a monic f into pairwise coprime squarefree parts with multiplicities.
pub fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let field = f.field().clone();
    let p = field.characteristic();
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let df = f.derivative();
    if df.is_zero() {
        for (g, k) in squarefree_decomposition(&pth_root(f)) {
            out.push((g, k * p));
        }
        return out;
    }
    let mut c = f.gcd(&df).expect("same field");
    let mut w = f.exact_div(&c).expect("gcd divides");
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c).expect("same field");
        let z = w.exact_div(&y).expect("gcd divides");
        if !z.is_one() {
            out.push((z, i));
        }
        i += 1;
        c = c.exact_div(&y).expect("gcd divides");
        w = y;
    }
    if !c.is_one() {
        for (g, k) in squarefree_decomposition(&pth_root(&c)) {
            out.push((g, k * p));
        }
    }
    out
}

/// g with g^p = f, for f a polynomial in x^p.
fn pth_root(f: &Poly) -> Poly {
    let field = f.field();
    let p = field.characteristic() as usize;
    // a^(1/p) = a^(p^(e-1)) in F_{p^e}.
    let root_exp = (field.characteristic() as u64).pow(field.degree() - 1);
    let coeffs = f.coeffs().iter().step_by(p).map(|&c| field.pow(c, root_exp)).collect();
    Poly::new(field.clone(), coeffs, f.variable())
}

fn factor_squarefree(f: &Poly) -> Vec<Poly> {
    let n = f.degree().unwrap_or(0);
    if n <= 1 {
        return if n == 1 { vec![f.clone()] } else { Vec::new() };
    }
    let q = f.field().order() as u64;
    let candidates: u64 = (1..=n as u32 / 2).map(|d| q.saturating_pow(d)).fold(0, u64::saturating_add);
    if n <= TRIAL_DIVISION_MAX_DEGREE && candidates <= TRIAL_DIVISION_MAX_CANDIDATES {
        return factor_by_trial_division(f).expect("nonconstant").factors.into_iter().map(|(g, _)| g).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_fac7);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f) {
        out.extend(equal_degree(&g, d, &mut rng));
    }
    out
}

/// Groups the irreducible factors of a squarefree monic f by degree.
pub fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let x = Poly::var(f.field(), f.variable());
    let q = f.field().order() as u64;
    let mut rest = f.clone();
    let mut h = x.rem(f).expect("nonzero");
    let mut out = Vec::new();
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.pow_mod(q, &rest).expect("nonzero");
        let g = (&h - &x).gcd(&rest).expect("same field");
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest).expect("nonzero");
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(k) = rest.degree().filter(|&k| k > 0) {
        out.push((rest, k));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of distinct degree-d irreducibles.
pub fn equal_degree<R: Rng>(g: &Poly, d: usize, rng: &mut R) -> Vec<Poly> {
    let n = g.degree().unwrap_or(0);
    if n == d {
        return vec![g.clone()];
    }
    let field = g.field().clone();
    let q = field.order() as u64;
    loop {
        let a = Poly::new(
            field.clone(),
            (0..n).map(|_| field.elem(rng.gen_range(0..field.order()))).collect(),
            g.variable(),
        );
        if a.is_constant() {
            continue;
        }
        let b = if q.is_multiple_of(2) {
            // absolute trace to F_2: sum of a^(2^i), i < e·d
            let k = field.degree() as usize * d;
            let mut t = a.rem(g).expect("nonzero");
            let mut acc = t.clone();
            for _ in 1..k {
                t = t.pow_mod(2, g).expect("nonzero");
                acc = &acc + &t;
            }
            acc
        } else {
            // a^((q^d - 1)/2) = (a^(1 + q + ... + q^(d-1)))^((q-1)/2)
            let mut t = a.rem(g).expect("nonzero");
            let mut norm = t.clone();
            for _ in 1..d {
                t = t.pow_mod(q, g).expect("nonzero");
                norm = (&norm * &t).rem(g).expect("nonzero");
            }
            &norm.pow_mod((q - 1) / 2, g).expect("nonzero") - &Poly::one(&field, g.variable())
        };
        let u = b.gcd(g).expect("same field");
        let du = u.degree().unwrap_or(0);
        if du > 0 && du < n {
            let v = g.exact_div(&u).expect("gcd divides");
            let mut out = equal_degree(&u, d, rng);
            out.extend(equal_degree(&v, d, rng));
            return out;
        }
    }
}
