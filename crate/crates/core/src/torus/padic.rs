//! Fixed-precision p-adic integers and the attraction probe `x ↦ x^p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("the probe needs an odd prime, got {0}")]
    EvenPrime(u64),
    #[error("x is not congruent to 1 mod p")]
    NotOneModP,
    #[error("precision {precision} exhausted: need more than {needed}")]
    PrecisionExhausted { precision: u32, needed: u32 },
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of ℤ_p known modulo `p^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PAdicInt {
    p: u64,
    k: u32,
    #[serde(serialize_with = "ser_bigint")]
    residue: BigInt,
}

fn ser_bigint<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Valuation read at finite precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Valuation {
    Exact(u32),
    /// The element vanishes modulo `p^k`.
    AtLeast(u32),
}

impl Valuation {
    pub fn lower_bound(&self) -> u32 {
        match *self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl PAdicInt {
    pub fn new(p: u64, k: u32, x: &BigInt) -> Result<Self, PadicError> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        let m = Self::modulus_of(p, k);
        Ok(PAdicInt {
            p,
            k,
            residue: x.mod_floor(&m),
        })
    }

    pub fn from_i64(p: u64, k: u32, x: i64) -> Result<Self, PadicError> {
        Self::new(p, k, &BigInt::from(x))
    }

    fn modulus_of(p: u64, k: u32) -> BigInt {
        num_traits::pow(BigInt::from(p), k as usize)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn modulus(&self) -> BigInt {
        Self::modulus_of(self.p, self.k)
    }

    pub fn valuation(&self) -> Valuation {
        valuation_mod(&self.residue, self.p, self.k)
    }

    pub fn sub_one(&self) -> PAdicInt {
        let m = self.modulus();
        PAdicInt {
            residue: (&self.residue - BigInt::from(1)).mod_floor(&m),
            ..self.clone()
        }
    }

    pub fn pow(&self, e: &BigInt) -> PAdicInt {
        assert!(!e.is_negative(), "negative exponent");
        PAdicInt {
            residue: self.residue.modpow(e, &self.modulus()),
            ..self.clone()
        }
    }
}

fn valuation_mod(r: &BigInt, p: u64, k: u32) -> Valuation {
    if r.is_zero() {
        return Valuation::AtLeast(k);
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut x = r.clone();
    while x.is_multiple_of(&p) {
        x /= &p;
        v += 1;
    }
    Valuation::Exact(v)
}

/// Valuations of `x^{p^j} − 1` for `j = 0..=n`.
pub fn padic_attraction_probe(x: &PAdicInt, n: u32) -> Result<Vec<Valuation>, PadicError> {
    let p = x.prime();
    if p == 2 {
        return Err(PadicError::EvenPrime(p));
    }
    let v0 = x.sub_one().valuation();
    match v0 {
        Valuation::Exact(0) => return Err(PadicError::NotOneModP),
        Valuation::AtLeast(k) => return Ok(vec![Valuation::AtLeast(k); n as usize + 1]),
        Valuation::Exact(v) if x.precision() <= n + v => {
            return Err(PadicError::PrecisionExhausted {
                precision: x.precision(),
                needed: n + v,
            });
        }
        Valuation::Exact(_) => {}
    }
    let pe = BigInt::from(p);
    let mut y = x.clone();
    let mut out = Vec::with_capacity(n as usize + 1);
    for j in 0..=n {
        if j > 0 {
            y = y.pow(&pe);
        }
        out.push(y.sub_one().valuation());
    }
    Ok(out)
}
