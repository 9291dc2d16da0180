//! Multiplicative structure of rationals: a coprime base for a finite set of
//! integers and exponent vectors over it.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dynmaps::rat_pow;

/// Pairwise coprime integers `> 1` such that every input is a product of
/// their powers.
pub fn coprime_base(nums: &[BigInt]) -> Vec<BigInt> {
    let mut base: Vec<BigInt> = Vec::new();
    for x in nums {
        let x = x.abs();
        if x > BigInt::one() {
            base.push(x);
        }
    }
    loop {
        base.sort();
        base.dedup();
        let mut split = None;
        'outer: for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if !g.is_one() {
                    split = Some((i, j, g));
                    break 'outer;
                }
            }
        }
        let Some((i, j, g)) = split else { break };
        let (a, b) = (&base[i] / &g, &base[j] / &g);
        base.remove(j);
        base.remove(i);
        for y in [a, b, g] {
            if y > BigInt::one() {
                base.push(y);
            }
        }
    }
    base.into_iter().map(|b| primitive_root(&b)).collect()
}

/// Smallest `r` with `r^k = b`. Replacing base elements by these keeps the
/// base coprime and makes rational roots of products of base powers visible
/// as integer exponent vectors.
fn primitive_root(b: &BigInt) -> BigInt {
    for k in (2..=b.bits() as u32).rev() {
        let r = b.nth_root(k);
        if &r.pow(k) == b {
            return primitive_root(&r);
        }
    }
    b.clone()
}

pub fn int_log(mut x: BigInt, base: &[BigInt]) -> Vec<BigInt> {
    let mut e = vec![BigInt::zero(); base.len()];
    for (k, b) in base.iter().enumerate() {
        while !x.is_zero() && x.is_multiple_of(b) {
            x /= b;
            e[k] += 1;
        }
    }
    debug_assert!(x.abs().is_one());
    e
}

/// Sign bit and exponent vector of a nonzero rational over `base`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogVec {
    pub neg: bool,
    pub exps: Vec<BigInt>,
}

pub fn rat_log(q: &BigRational, base: &[BigInt]) -> LogVec {
    let num = int_log(q.numer().clone(), base);
    let den = int_log(q.denom().clone(), base);
    LogVec {
        neg: q.is_negative(),
        exps: num.iter().zip(&den).map(|(a, b)| a - b).collect(),
    }
}

pub fn base_for(qs: &[BigRational]) -> Vec<BigInt> {
    let nums: Vec<BigInt> = qs
        .iter()
        .flat_map(|q| [q.numer().clone(), q.denom().clone()])
        .collect();
    coprime_base(&nums)
}

pub fn rat_from_log(l: &LogVec, base: &[BigInt]) -> BigRational {
    let mut q = BigRational::one();
    for (b, e) in base.iter().zip(&l.exps) {
        let e = e.to_i64().expect("exponent fits i64");
        q *= rat_pow(&BigRational::from_integer(b.clone()), e);
    }
    if l.neg {
        -q
    } else {
        q
    }
}
