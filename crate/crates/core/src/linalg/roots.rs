//! Roots of integer polynomials: exact integer roots, numeric complex roots
//! (Aberth iteration on the squarefree part) and spectral radii.
//!
//! Coefficient vectors are stored from the constant term upward.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::poly::{gcd, MultiPoly};

pub fn eval_int_poly(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

fn to_univariate(coeffs: &[BigInt]) -> MultiPoly {
    MultiPoly::from_terms(
        1,
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (vec![i as u64], BigRational::from_integer(c.clone()))),
    )
}

fn from_univariate(p: &MultiPoly) -> Vec<BigInt> {
    let d = p.degree_in(0).unwrap_or(0) as usize;
    let mut out = vec![BigInt::zero(); d + 1];
    for (m, c) in p.terms() {
        debug_assert!(c.is_integer());
        out[m.0[0] as usize] = c.to_integer();
    }
    out
}

fn trim(coeffs: &[BigInt]) -> Vec<BigInt> {
    let mut v = coeffs.to_vec();
    while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

/// Squarefree part `p / gcd(p, p')`, primitive with positive leading term.
pub fn squarefree_part(coeffs: &[BigInt]) -> Vec<BigInt> {
    let c = trim(coeffs);
    if c.len() <= 2 {
        return c;
    }
    let p = to_univariate(&c);
    let dp: Vec<BigInt> = c
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, a)| a * BigInt::from(i))
        .collect();
    let g = gcd(&p, &to_univariate(&dp));
    from_univariate(&p.div_exact(&g).expect("gcd divides").primitive())
}

/// `p / (x − r)` for an exact root `r`.
fn deflate(coeffs: &[BigInt], r: &BigInt) -> Vec<BigInt> {
    let n = coeffs.len() - 1;
    let mut q = vec![BigInt::zero(); n];
    let mut carry = BigInt::zero();
    for i in (0..n).rev() {
        carry = &carry * r + &coeffs[i + 1];
        q[i] = carry.clone();
    }
    q
}

/// Integer roots with multiplicity, ascending. Candidates come from the
/// numeric roots and are each confirmed by exact evaluation.
pub fn integer_roots(coeffs: &[BigInt]) -> Vec<BigInt> {
    let mut p = trim(coeffs);
    let mut out = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        p.remove(0);
        out.push(BigInt::zero());
    }
    if p.len() <= 1 {
        return out;
    }
    let mut candidates: Vec<BigInt> = complex_roots(&p)
        .iter()
        .filter(|z| z.im.abs() < 1e-6 * (1.0 + z.re.abs()))
        .filter_map(|z| BigInt::from_f64(z.re.round()))
        .filter(|r| !r.is_zero())
        .collect();
    candidates.sort();
    candidates.dedup();
    for r in candidates {
        while p.len() > 1 && p[0].is_multiple_of(&r) && eval_int_poly(&p, &r).is_zero() {
            p = deflate(&p, &r);
            out.push(r.clone());
        }
    }
    out.sort();
    out
}

trait FromF64 {
    fn from_f64(x: f64) -> Option<BigInt>;
}

impl FromF64 for BigInt {
    fn from_f64(x: f64) -> Option<BigInt> {
        num_traits::FromPrimitive::from_f64(x)
    }
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Numeric roots of the squarefree part, without multiplicity.
pub fn complex_roots(coeffs: &[BigInt]) -> Vec<Complex64> {
    let sf = squarefree_part(coeffs);
    let n = sf.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    // scale to avoid overflow on huge coefficients
    let lead = sf[n].to_f64().unwrap_or(f64::MAX);
    let c: Vec<f64> = sf
        .iter()
        .map(|a| a.to_f64().unwrap_or(f64::MAX) / lead)
        .collect();
    if n == 1 {
        return vec![Complex64::new(-c[0], 0.0)];
    }
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(bound * 0.5, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    // Newton polish against the squarefree polynomial
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let (p, dp) = horner(&c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.is_finite() {
                break;
            }
            *zi -= step;
        }
        if zi.im.abs() < 1e-13 * (1.0 + zi.re.abs()) {
            zi.im = 0.0;
        }
    }
    z
}

/// Largest modulus among the roots. Exact when that modulus is attained at
/// an integer root.
pub fn spectral_radius(coeffs: &[BigInt]) -> f64 {
    let roots = complex_roots(coeffs);
    let rho = roots.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let r = rho.round();
    if (rho - r).abs() < 1e-6 {
        if let Some(ri) = BigInt::from_f64(r) {
            let sf = squarefree_part(coeffs);
            if eval_int_poly(&sf, &ri).is_zero() || eval_int_poly(&sf, &-&ri).is_zero() {
                return r;
            }
        }
    }
    rho
}

/// Splits an integer polynomial into its integer roots and the remaining
/// cofactor, which then has no rational root.
pub fn split_integer_roots(coeffs: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let roots = integer_roots(coeffs);
    let mut p = trim(coeffs);
    for r in &roots {
        if r.is_zero() {
            p.remove(0);
        } else {
            p = deflate(&p, r);
        }
    }
    if p.last().is_some_and(|c| c.is_negative()) {
        p.iter_mut().for_each(|c| *c = -&*c);
    }
    (roots, p)
}
