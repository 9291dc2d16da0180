//! Multivariate gcd over ℚ by recursive primitive pseudo-remainder
//! sequences, with monomial shortcuts.
//!
//! Results are normalized with [`MultiPoly::primitive`]: integer
//! coefficients, content 1, positive leading coefficient. The gcd of two
//! zero polynomials is zero.

use num_rational::BigRational;
use num_traits::One;

use super::{Monomial, MultiPoly};

pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    assert_eq!(a.nvars(), b.nvars());
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    let n = a.nvars();
    let ma = a.monomial_content().expect("nonzero");
    let mb = b.monomial_content().expect("nonzero");
    let mono = MultiPoly::term(n, ma.meet(&mb), BigRational::one());
    let a = strip_monomial(a, &ma);
    let b = strip_monomial(b, &mb);
    let g = gcd_rec(&a, &b);
    (&g * &mono).primitive()
}

/// gcd of a list; stops early once it reaches a constant.
pub fn gcd_many<'a, I>(polys: I) -> Option<MultiPoly>
where
    I: IntoIterator<Item = &'a MultiPoly>,
{
    let mut list: Vec<&MultiPoly> = polys.into_iter().collect();
    // monomials first: they collapse the running gcd to a monomial at once
    list.sort_by_key(|p| p.num_terms());
    let mut it = list.into_iter();
    let mut g = it.next()?.primitive();
    for p in it {
        if !g.is_zero() && g.is_constant() {
            break;
        }
        g = gcd(&g, p);
    }
    Some(g)
}

fn strip_monomial(p: &MultiPoly, m: &Monomial) -> MultiPoly {
    let mut out = MultiPoly::zero(p.nvars());
    for (k, c) in p.terms() {
        out.add_term(k.div(m).expect("monomial content divides"), c.clone());
    }
    out
}

fn monomial_gcd(mono: &MultiPoly, other: &MultiPoly) -> MultiPoly {
    let m = mono.leading_term().expect("nonzero").0;
    let c = other.terms().keys().fold(m.clone(), |acc, k| acc.meet(k));
    MultiPoly::term(mono.nvars(), c, BigRational::one())
}

fn gcd_rec(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let n = a.nvars();
    if a.is_zero() {
        return b.primitive();
    }
    if b.is_zero() {
        return a.primitive();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one(n);
    }
    if a.is_monomial() {
        return monomial_gcd(a, b);
    }
    if b.is_monomial() {
        return monomial_gcd(b, a);
    }
    let v = match (0..n).rev().find(|&i| a.involves(i) || b.involves(i)) {
        Some(v) => v,
        None => return MultiPoly::one(n),
    };
    if !a.involves(v) {
        return gcd_rec(a, &content_in(b, v));
    }
    if !b.involves(v) {
        return gcd_rec(&content_in(a, v), b);
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let c = gcd_rec(&ca, &cb);
    let g = prs(pa, pb, v);
    (&c * &g).primitive()
}

/// gcd of the coefficients of `p` viewed as a polynomial in `v`.
fn content_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let coeffs = p.coeffs_in(v);
    let mut it = coeffs.values();
    let mut g = it
        .next()
        .map(MultiPoly::primitive)
        .unwrap_or_else(|| MultiPoly::zero(p.nvars()));
    for c in it {
        if g.is_constant() {
            break;
        }
        g = gcd_rec(&g, c);
    }
    g
}

fn primitive_in(p: &MultiPoly, v: usize) -> MultiPoly {
    let c = content_in(p, v);
    p.div_exact(&c).expect("content divides").primitive()
}

fn lead_in(p: &MultiPoly, v: usize) -> (u64, MultiPoly) {
    let coeffs = p.coeffs_in(v);
    let (d, c) = coeffs.into_iter().next_back().expect("nonzero");
    (d, c)
}

fn prem(a: &MultiPoly, b: &MultiPoly, v: usize) -> MultiPoly {
    let n = a.nvars();
    let (db, lb) = lead_in(b, v);
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let (dr, lr) = lead_in(&r, v);
        if dr < db {
            return r;
        }
        let mut shift = Monomial::one(n);
        shift.0[v] = dr - db;
        let t = (&lr * b)
            .mul_monomial(&shift, &BigRational::one())
            .expect("exponent overflow in pseudo-remainder");
        r = (&(&lb * &r) - &t).primitive();
    }
}

fn prs(a: MultiPoly, b: MultiPoly, v: usize) -> MultiPoly {
    let n = a.nvars();
    let (mut a, mut b) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        let r = prem(&a, &b, v);
        if r.is_zero() {
            return primitive_in(&b, v);
        }
        if !r.involves(v) {
            return MultiPoly::one(n);
        }
        a = b;
        b = primitive_in(&r, v);
    }
}
