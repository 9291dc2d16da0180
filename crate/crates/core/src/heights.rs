//! Naive Weil height on ℙ^m over ℚ: log of the largest coordinate of the
//! coprime integer representative.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::dynmaps::{AffinePoint, Point, ProjectivePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeightValue {
    /// Natural logarithm scale.
    pub value: f64,
    /// Bit length of the largest absolute coordinate.
    pub exact_bitlen: u64,
}

/// `ln |x|` for nonzero `x`, accurate to a few ulps at any size.
pub fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().expect("finite below 2^1000").ln();
    }
    // keep the top 64 bits
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().expect("64-bit value").ln() + shift as f64 * std::f64::consts::LN_2
}

fn height_of_max(m: &BigInt) -> HeightValue {
    if m.is_zero() {
        // only reachable for the zero vector, which is not a point
        return HeightValue {
            value: 0.0,
            exact_bitlen: 0,
        };
    }
    HeightValue {
        value: ln_abs(m),
        exact_bitlen: m.bits(),
    }
}

pub fn height_projective(p: &ProjectivePoint) -> HeightValue {
    let m = p.coords().iter().map(|c| c.abs()).max().expect("nonempty");
    height_of_max(&m)
}

/// Height of `[a_1 : … : a_m : 1]`. With `L` the lcm of the denominators the
/// representative `(a_i L, L)` is already coprime, so no gcd is needed.
pub fn height_affine(p: &AffinePoint) -> HeightValue {
    let l = p
        .coords()
        .iter()
        .fold(BigInt::from(1), |l, c| crate::arith::lcm(&l, c.denom()));
    let m = p
        .coords()
        .iter()
        .map(|c| c.numer().abs() * (&l / c.denom()))
        .fold(l.clone(), |a, b| a.max(b));
    height_of_max(&m)
}

pub fn height_of_point(p: &Point) -> HeightValue {
    match p {
        Point::Affine(a) => height_affine(a),
        Point::Projective(q) => height_projective(q),
    }
}

/// `max(h, 1)`.
pub fn height_plus(h: &HeightValue) -> f64 {
    h.value.max(1.0)
}
