//! gcd and reduction of big integers. Large operands go through malachite,
//! whose gcd is subquadratic; num-bigint's binary gcd becomes the bottleneck
//! once orbit points reach tens of thousands of bits.

use malachite_base::num::arithmetic::traits::Gcd;
use malachite_nz::natural::Natural;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Below this size the smaller operand is handled by num-bigint directly.
const SMALL_BITS: u64 = 4096;

fn gcd_nat(x: &BigUint, y: &BigUint) -> BigUint {
    let (big, small) = if x.bits() >= y.bits() { (x, y) } else { (y, x) };
    if small.is_zero() {
        return big.clone();
    }
    if small.bits() <= SMALL_BITS {
        return (big % small).gcd(small);
    }
    let a = Natural::from_owned_limbs_asc(big.to_u64_digits());
    let b = Natural::from_owned_limbs_asc(small.to_u64_digits());
    let g = a.gcd(b);
    BigUint::new(
        g.limbs()
            .flat_map(|w| [w as u32, (w >> 32) as u32])
            .collect(),
    )
}

/// Nonnegative gcd.
pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    BigInt::from(gcd_nat(a.magnitude(), b.magnitude()))
}

/// Nonnegative lcm; zero if either argument is zero.
pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let g = gcd(a, b);
    (a.abs() / g) * b.abs()
}

/// gcd of all entries, smallest first so the running value stays small.
pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    let mut v: Vec<&BigInt> = xs.into_iter().filter(|x| !x.is_zero()).collect();
    v.sort_by_key(|x| x.bits());
    let mut g = BigInt::zero();
    for x in v {
        g = gcd(&g, x);
        if g.is_one() {
            break;
        }
    }
    g
}

pub fn lcm_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |l, x| lcm(&l, x))
}

/// `num / den` in lowest terms. Panics if `den` is zero.
pub fn ratio(num: BigInt, den: BigInt) -> BigRational {
    assert!(!den.is_zero(), "zero denominator");
    let g = gcd(&num, &den);
    let (mut n, mut d) = if g.is_one() {
        (num, den)
    } else {
        (num / &g, den / &g)
    };
    if d.is_negative() {
        n = -n;
        d = -d;
    }
    BigRational::new_raw(n, d)
}
