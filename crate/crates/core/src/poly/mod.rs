//! Sparse multivariate polynomials over ℚ.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic (total degree first, then lexicographic with the
//! first variable most significant). Zero coefficients are never stored.

mod gcd;
mod parse;
mod ratfun;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use gcd::{gcd, gcd_many};
pub use parse::{parse_expression, ParseError, ParsedExpr};
pub use ratfun::RationalFunction;

/// Upper bound on the number of terms any intermediate product may carry.
pub const DEFAULT_MAX_TERMS: usize = 400_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("term limit exceeded ({0} terms)")]
    TooManyTerms(usize),
    #[error("division is not exact")]
    InexactDivision,
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
}

/// Exponent vector of a monomial. Ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u64>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> u128 {
        self.0.iter().map(|&e| e as u128).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial, PolyError> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(PolyError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()
            .map(Monomial)
    }

    pub fn checked_pow(&self, k: u64) -> Result<Monomial, PolyError> {
        self.0
            .iter()
            .map(|a| a.checked_mul(k).ok_or(PolyError::ExponentOverflow))
            .collect::<Result<Vec<_>, _>>()
            .map(Monomial)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn meet(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        Self::term(nvars, Monomial::one(nvars), c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range");
        Self::term(nvars, Monomial::var(nvars, i), BigRational::one())
    }

    pub fn term(nvars: usize, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.0.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { nvars, terms }
    }

    /// Builds a polynomial from (exponents, coefficient) pairs, merging
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(nvars: usize, items: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u64>, BigRational)>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (e, c) in items {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Constant term value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.is_zero() {
            Some(BigRational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u128> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u64> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::total_degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &BigRational) -> Result<MultiPoly, PolyError> {
        let mut out = BTreeMap::new();
        if c.is_zero() {
            return Ok(MultiPoly::zero(self.nvars));
        }
        for (k, a) in &self.terms {
            out.insert(k.checked_mul(m)?, a * c);
        }
        Ok(MultiPoly {
            nvars: self.nvars,
            terms: out,
        })
    }

    pub fn checked_mul(&self, other: &MultiPoly, max_terms: usize) -> Result<MultiPoly, PolyError> {
        self.check_vars(other)?;
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.terms.len() == 1 {
            let (m, c) = small.terms.iter().next().unwrap();
            return big.mul_monomial(m, c);
        }
        let mut acc: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                let m = ma.checked_mul(mb)?;
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                        if acc.len() > max_terms {
                            return Err(PolyError::TooManyTerms(acc.len()));
                        }
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(MultiPoly {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn checked_pow(&self, k: u64, max_terms: usize) -> Result<MultiPoly, PolyError> {
        if k == 0 {
            return Ok(MultiPoly::one(self.nvars));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let c = if k <= i32::MAX as u64 {
                c.pow(k as i32)
            } else if c.abs().is_one() {
                if c.is_negative() && k % 2 == 1 {
                    -BigRational::one()
                } else {
                    BigRational::one()
                }
            } else {
                return Err(PolyError::ExponentOverflow);
            };
            return Ok(MultiPoly::term(self.nvars, m.checked_pow(k)?, c));
        }
        let mut result = MultiPoly::one(self.nvars);
        let mut base = self.clone();
        let mut e = k;
        loop {
            if e & 1 == 1 {
                result = result.checked_mul(&base, max_terms)?;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.checked_mul(&base, max_terms)?;
        }
        Ok(result)
    }

    pub fn pow(&self, k: u64) -> MultiPoly {
        self.checked_pow(k, DEFAULT_MAX_TERMS)
            .expect("polynomial power overflow")
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        // Everything is brought over the common denominator
        // lcm(coefficient denominators) · ∏ q_j^{deg_j} and reduced once.
        let mut deg = vec![0u64; self.nvars];
        for m in self.terms.keys() {
            for (d, &e) in deg.iter_mut().zip(&m.0) {
                *d = (*d).max(e);
            }
        }
        let lc = crate::arith::lcm_all(self.terms.values().map(|c| c.denom()));
        let mut num_pow: Vec<BTreeMap<u64, BigInt>> = vec![BTreeMap::new(); self.nvars];
        let mut den_pow: Vec<BTreeMap<u64, BigInt>> = vec![BTreeMap::new(); self.nvars];
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.numer() * (&lc / c.denom());
            for (j, &e) in m.0.iter().enumerate() {
                let (p, q) = (point[j].numer(), point[j].denom());
                if e > 0 {
                    t *= &*num_pow[j]
                        .entry(e)
                        .or_insert_with(|| num_traits::pow(p.clone(), e as usize));
                }
                let f = deg[j] - e;
                if f > 0 {
                    t *= &*den_pow[j]
                        .entry(f)
                        .or_insert_with(|| num_traits::pow(q.clone(), f as usize));
                }
            }
            total += t;
        }
        let den = (0..self.nvars).fold(lc, |acc, j| {
            if deg[j] == 0 {
                return acc;
            }
            let q = point[j].denom();
            let qd = den_pow[j]
                .remove(&deg[j])
                .unwrap_or_else(|| num_traits::pow(q.clone(), deg[j] as usize));
            acc * qd
        });
        crate::arith::ratio(total, den)
    }

    /// Substitutes `subs[j]` for variable `j`. All substituted polynomials
    /// must share one variable count, which becomes the result's.
    pub fn substitute(&self, subs: &[MultiPoly], max_terms: usize) -> Result<MultiPoly, PolyError> {
        assert_eq!(subs.len(), self.nvars, "substitution arity mismatch");
        let out_vars = subs.first().map(|s| s.nvars).unwrap_or(0);
        let mut cache: Vec<BTreeMap<u64, MultiPoly>> = vec![BTreeMap::new(); self.nvars];
        let mut total = MultiPoly::zero(out_vars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(out_vars, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !cache[j].contains_key(&e) {
                    let p = subs[j].checked_pow(e, max_terms)?;
                    cache[j].insert(e, p);
                }
                t = t.checked_mul(&cache[j][&e], max_terms)?;
            }
            total = &total + &t;
            if total.terms.len() > max_terms {
                return Err(PolyError::TooManyTerms(total.terms.len()));
            }
        }
        Ok(total)
    }

    /// Re-embeds into `nvars` variables via an index map; `map[i]` is the new
    /// position of old variable `i`.
    pub fn remap_vars(&self, nvars: usize, map: &[usize]) -> MultiPoly {
        let mut out = MultiPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] += x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Coefficients with respect to one variable: `deg -> coefficient`, each
    /// coefficient free of that variable.
    pub fn coeffs_in(&self, var: usize) -> BTreeMap<u64, MultiPoly> {
        let mut out: BTreeMap<u64, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = m.0[var];
            let mut e = m.clone();
            e.0[var] = 0;
            out.entry(d)
                .or_insert_with(|| MultiPoly::zero(self.nvars))
                .add_term(e, c.clone());
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Option<Monomial> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| acc.meet(m)))
    }

    /// Multiplier turning this polynomial into a primitive integer polynomial
    /// whose leading coefficient (grlex) is positive.
    pub fn primitive_scale(&self) -> BigRational {
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        if num_gcd.is_zero() {
            return BigRational::one();
        }
        let mut s = BigRational::new(den_lcm, num_gcd);
        if self
            .leading_term()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false)
        {
            s = -s;
        }
        s
    }

    pub fn primitive(&self) -> MultiPoly {
        self.scale(&self.primitive_scale())
    }

    /// Integer coefficients if all coefficients are integral.
    pub fn integer_coeffs(&self) -> Option<Vec<(Monomial, BigInt)>> {
        self.terms
            .iter()
            .map(|(m, c)| c.is_integer().then(|| (m.clone(), c.to_integer())))
            .collect()
    }

    /// Exact division; fails when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_vars(d)?;
        let (lm, lc) = d.leading_term().ok_or(PolyError::DivisionByZero)?;
        if d.is_monomial() {
            let mut out = MultiPoly::zero(self.nvars);
            for (m, c) in &self.terms {
                let q = m.div(lm).ok_or(PolyError::InexactDivision)?;
                out.terms.insert(q, c / lc);
            }
            return Ok(out);
        }
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars);
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(lm).ok_or(PolyError::InexactDivision)?;
            let qc = rc / lc;
            let sub = d.mul_monomial(&qm, &qc)?;
            quot.add_term(qm, qc);
            rem = &rem - &sub;
        }
        Ok(quot)
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::VarCountMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    /// Canonical text in the expression grammar, terms in descending grlex.
    pub fn to_expr_string(&self, names: &[String]) -> String {
        parse::format_poly(self, names)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let (mut out, other) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.checked_mul(rhs, DEFAULT_MAX_TERMS)
            .expect("polynomial product overflow")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names("x", self.nvars, 1);
        f.write_str(&self.to_expr_string(&names))
    }
}

/// `prefix{start}, prefix{start+1}, ...`
pub fn default_var_names(prefix: &str, n: usize, start: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{}", i + start)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = Monomial(vec![0, 2]);
        let b = Monomial(vec![1, 0]);
        let c = Monomial(vec![1, 1]);
        assert!(b < a);
        assert!(a < c);
        assert!(Monomial(vec![0, 1]) < Monomial(vec![1, 0]));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let x = MultiPoly::var(2, 0);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.num_terms(), 0);
    }

    #[test]
    fn product_and_power() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let s = &x + &y;
        let sq = s.pow(2);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coeff(&Monomial(vec![1, 1])), q(2));
        assert_eq!(sq.eval(&[q(2), q(3)]), q(25));
    }

    #[test]
    fn exact_division_roundtrip() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let a = &(&x + &y) * &(&x - &MultiPoly::one(2));
        let b = &x + &y;
        assert_eq!(a.div_exact(&b).unwrap(), &x - &MultiPoly::one(2));
        assert_eq!(
            (&x + &MultiPoly::one(2)).div_exact(&y),
            Err(PolyError::InexactDivision)
        );
    }

    #[test]
    fn substitution_composes() {
        // p(x, y) = x*y + 1 at (x^2, y + 1)
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let p = &(&x * &y) + &MultiPoly::one(2);
        let r = p
            .substitute(&[x.pow(2), &y + &MultiPoly::one(2)], DEFAULT_MAX_TERMS)
            .unwrap();
        assert_eq!(r.eval(&[q(2), q(3)]), q(17));
    }

    #[test]
    fn primitive_normalizes_sign_and_content() {
        let x = MultiPoly::var(1, 0);
        let p = &x.scale(&BigRational::new((-4).into(), 3.into())) + &MultiPoly::constant(1, q(2));
        let pp = p.primitive();
        assert_eq!(pp.coeff(&Monomial(vec![1])), q(2));
        assert_eq!(pp.coeff(&Monomial(vec![0])), q(-3));
    }

    #[test]
    fn monomial_power_of_huge_exponent_is_cheap() {
        let x = MultiPoly::var(3, 0);
        let p = x.checked_pow(1 << 40, 10).unwrap();
        assert_eq!(p.total_degree(), Some(1u128 << 40));
    }
}
