//! Dense matrices over F_q, stored as rows.

use super::{FieldCtx, FieldElem};

pub type Matrix = Vec<Vec<FieldElem>>;

/// Row-reduces in place and returns the pivot columns.
fn row_reduce(f: &FieldCtx, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = f.inv(m[r][c]).expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x = f.sub(*x, f.mul(factor, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &FieldCtx, m: &[Vec<FieldElem>]) -> usize {
    row_reduce(f, &mut m.to_vec()).len()
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn invert(f: &FieldCtx, m: &[Vec<FieldElem>]) -> Option<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { f.one() } else { f.zero() }));
            r
        })
        .collect();
    let pivots = row_reduce(f, &mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(f: &FieldCtx, m: &[Vec<FieldElem>]) -> FieldElem {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = f.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return f.zero() };
        if p != c {
            a.swap(p, c);
            det = f.neg(det);
        }
        det = f.mul(det, a[c][c]);
        let inv = f.inv(a[c][c]).expect("nonzero pivot");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = f.mul(a[i][c], inv);
            for j in c..n {
                let v = f.mul(factor, a[c][j]);
                a[i][j] = f.sub(a[i][j], v);
            }
        }
    }
    det
}

/// Row vector times matrix.
pub fn vec_mul(f: &FieldCtx, v: &[FieldElem], m: &[Vec<FieldElem>]) -> Vec<FieldElem> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![f.zero(); cols];
    for (&c, row) in v.iter().zip(m) {
        if c.is_zero() {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(row) {
            *o = f.add(*o, f.mul(c, x));
        }
    }
    out
}
