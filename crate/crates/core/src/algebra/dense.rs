//! Coefficient-vector kernels shared by [`Poly`](super::Poly) and the residue
//! rings. Vectors are low degree first; outputs are trimmed unless noted.

use super::field::{FieldCtx, FieldElem};

#[inline]
pub fn trim(v: &mut Vec<FieldElem>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub fn add(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, &s) in out.iter_mut().zip(short) {
        *o = f.add(*o, s);
    }
    trim(&mut out);
    out
}

pub fn sub(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), FieldElem::ZERO);
    }
    for (o, &s) in out.iter_mut().zip(b) {
        *o = f.sub(*o, s);
    }
    trim(&mut out);
    out
}

pub fn scale(f: &FieldCtx, a: &[FieldElem], c: FieldElem) -> Vec<FieldElem> {
    let mut out: Vec<FieldElem> = a.iter().map(|&x| f.mul(x, c)).collect();
    trim(&mut out);
    out
}

pub fn mul(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FieldElem::ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero and trimmed.
pub fn divmod(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> (Vec<FieldElem>, Vec<FieldElem>) {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = f.inv(b[db]).expect("trimmed divisor has a nonzero leading coefficient");
    let mut q = vec![FieldElem::ZERO; r.len() - db];
    for k in (db..r.len()).rev() {
        let c = r[k];
        if c.is_zero() {
            continue;
        }
        let t = f.mul(c, lead_inv);
        q[k - db] = t;
        for (j, &bj) in b.iter().enumerate() {
            r[k - db + j] = f.sub(r[k - db + j], f.mul(t, bj));
        }
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

/// Remainder modulo a monic `m`, written into a fixed-length buffer of
/// `deg m` coefficients (not trimmed).
pub fn rem_monic_into(f: &FieldCtx, a: &mut Vec<FieldElem>, m: &[FieldElem]) {
    let d = m.len() - 1;
    for k in (d..a.len()).rev() {
        let c = a[k];
        if c.is_zero() {
            continue;
        }
        for (j, &mj) in m[..d].iter().enumerate() {
            if !mj.is_zero() {
                a[k - d + j] = f.sub(a[k - d + j], f.mul(c, mj));
            }
        }
        a[k] = FieldElem::ZERO;
    }
    a.resize(d, FieldElem::ZERO);
}

pub fn rem(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    divmod(f, a, b).1
}

pub fn mul_mod(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem], m: &[FieldElem]) -> Vec<FieldElem> {
    rem(f, &mul(f, a, b), m)
}

pub fn pow_mod(f: &FieldCtx, a: &[FieldElem], mut k: u64, m: &[FieldElem]) -> Vec<FieldElem> {
    let mut acc = rem(f, &[f.one()], m);
    let mut base = rem(f, a, m);
    while k > 0 {
        if k & 1 == 1 {
            acc = mul_mod(f, &acc, &base, m);
        }
        k >>= 1;
        if k > 0 {
            base = mul_mod(f, &base, &base, m);
        }
    }
    acc
}

pub fn make_monic(f: &FieldCtx, a: &[FieldElem]) -> Vec<FieldElem> {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => scale(f, a, f.inv(lc).expect("trimmed")),
    }
}

/// Monic gcd (empty for gcd(0, 0)).
pub fn gcd(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(f, &x, &y);
        x = y;
        y = r;
    }
    make_monic(f, &x)
}

/// Returns (g, s, t) with s·a + t·b = g and g monic.
pub fn ext_gcd(f: &FieldCtx, a: &[FieldElem], b: &[FieldElem]) -> (Vec<FieldElem>, Vec<FieldElem>, Vec<FieldElem>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    trim(&mut r0);
    trim(&mut r1);
    let (mut s0, mut s1) = (vec![f.one()], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![f.one()]);
    while !r1.is_empty() {
        let (q, r) = divmod(f, &r0, &r1);
        let s = sub(f, &s0, &mul(f, &q, &s1));
        let t = sub(f, &t0, &mul(f, &q, &t1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    match r0.last() {
        None => (r0, s0, t0),
        Some(&lc) => {
            let inv = f.inv(lc).expect("nonzero");
            (scale(f, &r0, inv), scale(f, &s0, inv), scale(f, &t0, inv))
        }
    }
}

pub fn eval(f: &FieldCtx, a: &[FieldElem], x: FieldElem) -> FieldElem {
    a.iter().rev().fold(f.zero(), |acc, &c| f.add(f.mul(acc, x), c))
}

pub fn derivative(f: &FieldCtx, a: &[FieldElem]) -> Vec<FieldElem> {
    let mut out: Vec<FieldElem> = a.iter().enumerate().skip(1).map(|(i, &c)| f.mul(f.from_int(i as i64), c)).collect();
    trim(&mut out);
    out
}
