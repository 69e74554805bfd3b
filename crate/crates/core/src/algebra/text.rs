//! Text format for polynomials: `x^63 + x^7 + 1`, `2*t^2 + t`, `[1,0,1]*x + 1`.
//!
//! Prime-field coefficients are decimal integers (reduced mod p, a leading
//! `-` is accepted); extension-field coefficients are bracketed coordinate
//! vectors over F_p, lowest degree first. The variable letter (`t` or `x`,
//! either case) fixes the role tag. The printer emits terms in descending
//! degree joined by ` + ` and never uses subtraction.

use std::sync::Arc;

use super::field::{FieldCtx, FieldElem};
use super::poly::{Poly, Var};
use super::AlgebraError;

pub fn format_elem(field: &FieldCtx, c: FieldElem) -> String {
    if field.is_prime_field() {
        c.value().to_string()
    } else {
        let coords: Vec<String> = field.coords(c).iter().map(|d| d.to_string()).collect();
        format!("[{}]", coords.join(","))
    }
}

pub fn format_poly(p: &Poly) -> String {
    format_coeffs(p.field(), p.coeffs(), p.variable().symbol())
}

pub(crate) fn format_coeffs(field: &FieldCtx, coeffs: &[FieldElem], var: char) -> String {
    let mut terms = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        let term = if k == 0 {
            format_elem(field, c)
        } else if c == field.one() {
            mono
        } else {
            format!("{}*{mono}", format_elem(field, c))
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<u64, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        text.parse().or_else(|_| {
            self.pos = start;
            self.err("integer out of range")
        })
    }

    fn var(&mut self) -> Option<Var> {
        self.skip_ws();
        let v = match self.peek()? {
            b't' | b'T' => Var::T,
            b'x' | b'X' => Var::X,
            _ => return None,
        };
        self.pos += 1;
        Some(v)
    }
}

fn parse_coeff(cur: &mut Cursor<'_>, field: &FieldCtx) -> Result<FieldElem, AlgebraError> {
    cur.skip_ws();
    if cur.eat(b'[') {
        let mut coords = Vec::new();
        loop {
            let v = cur.int()?;
            coords.push((v % field.characteristic() as u64) as u32);
            if cur.eat(b']') {
                break;
            }
            if !cur.eat(b',') {
                return cur.err("expected ',' or ']'");
            }
        }
        if coords.len() > field.degree() as usize {
            return cur.err(format!("coordinate vector longer than extension degree {}", field.degree()));
        }
        field.from_coords(&coords)
    } else {
        let v = cur.int()?;
        Ok(field.from_int((v % field.characteristic() as u64) as i64))
    }
}

/// Parses a polynomial; constant-only strings get `default_var`.
pub fn parse_poly(field: &Arc<FieldCtx>, text: &str, default_var: Var) -> Result<Poly, AlgebraError> {
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    let mut coeffs: Vec<FieldElem> = Vec::new();
    let mut var: Option<Var> = None;
    let mut first = true;
    loop {
        let negative = if first {
            first = false;
            let neg = cur.eat(b'-');
            if !neg {
                cur.eat(b'+');
            }
            neg
        } else if cur.eat(b'+') {
            false
        } else if cur.eat(b'-') {
            true
        } else {
            return cur.err("expected '+' or '-'");
        };
        cur.skip_ws();
        let coeff = match cur.peek() {
            Some(b'0'..=b'9') | Some(b'[') => {
                let c = parse_coeff(&mut cur, field)?;
                cur.eat(b'*');
                Some(c)
            }
            Some(_) => None,
            None => return cur.err("expected a term"),
        };
        let before = cur.pos;
        let exp = match cur.var() {
            Some(v) => {
                if var.is_some_and(|w| w != v) {
                    cur.pos = before;
                    return cur.err("mixed variables in one polynomial");
                }
                var = Some(v);
                if cur.eat(b'^') {
                    cur.int()? as usize
                } else {
                    1
                }
            }
            None if coeff.is_some() => 0,
            None => return cur.err("expected a coefficient or a variable"),
        };
        let mut c = coeff.unwrap_or_else(|| field.one());
        if negative {
            c = field.neg(c);
        }
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, field.zero());
        }
        coeffs[exp] = field.add(coeffs[exp], c);
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
    }
    Ok(Poly::new(field.clone(), coeffs, var.unwrap_or(default_var)))
}
