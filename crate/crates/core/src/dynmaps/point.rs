use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::MapError;
use crate::arith;

pub fn rat_to_string(x: &BigRational) -> String {
    x.to_string()
}

/// Reads `"p"` or `"p/q"` with an optional sign.
pub fn parse_rational(s: &str) -> Result<BigRational, MapError> {
    let s = s.trim();
    let bad = || MapError::Invalid(format!("malformed rational {s:?}"));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(
            s.parse::<BigInt>().map_err(|_| bad())?,
        )),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(MapError::Invalid(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
    }
}

/// Bit length of the largest numerator or denominator.
pub fn max_bits(xs: &[BigRational]) -> u64 {
    xs.iter()
        .map(|x| x.numer().bits().max(x.denom().bits()))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffinePoint(pub Vec<BigRational>);

impl AffinePoint {
    pub fn new(coords: Vec<BigRational>) -> Self {
        AffinePoint(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        AffinePoint(
            coords
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    pub fn parse(items: &[&str]) -> Result<Self, MapError> {
        items
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_, _>>()
            .map(AffinePoint)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn on_torus(&self) -> bool {
        self.0.iter().all(|c| !c.is_zero())
    }
}

impl Serialize for AffinePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(rat_to_string))
    }
}

impl<'de> Deserialize<'de> for AffinePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items: Vec<String> = Vec::deserialize(d)?;
        items
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<_, _>>()
            .map(AffinePoint)
            .map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for AffinePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(rat_to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Point of ℙ^m stored as its canonical integer representative: coprime
/// entries, first nonzero entry positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjectivePoint(Vec<BigInt>);

impl ProjectivePoint {
    pub fn new(coords: Vec<BigInt>) -> Result<Self, MapError> {
        let g = arith::gcd_all(&coords);
        if g.is_zero() {
            return Err(MapError::Invalid(
                "projective point with all coordinates zero".into(),
            ));
        }
        let neg = coords
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(|c| c.is_negative());
        let g = if neg { -g } else { g };
        if g.is_one() {
            return Ok(ProjectivePoint(coords));
        }
        Ok(ProjectivePoint(
            coords.into_iter().map(|c| c / &g).collect(),
        ))
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self, MapError> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Canonical representative of a nonzero rational vector.
    pub fn from_rationals(coords: &[BigRational]) -> Result<Self, MapError> {
        let l = arith::lcm_all(coords.iter().map(|c| c.denom()));
        Self::new(
            coords
                .iter()
                .map(|c| c.numer() * (&l / c.denom()))
                .collect(),
        )
    }

    /// Image of `(a_1, …, a_m)` under the chart `a ↦ [a_1 : … : a_m : 1]`.
    pub fn from_affine(p: &AffinePoint) -> Self {
        let mut v = p.0.clone();
        v.push(BigRational::one());
        Self::from_rationals(&v).expect("last coordinate is nonzero")
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Back to the standard chart when the last coordinate is nonzero.
    pub fn to_affine(&self) -> Option<AffinePoint> {
        let last = self.0.last()?;
        if last.is_zero() {
            return None;
        }
        Some(AffinePoint(
            self.0[..self.0.len() - 1]
                .iter()
                .map(|c| arith::ratio(c.clone(), last.clone()))
                .collect(),
        ))
    }
}

impl Serialize for ProjectivePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|c| c.to_string()))
    }
}

impl<'de> Deserialize<'de> for ProjectivePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items: Vec<String> = Vec::deserialize(d)?;
        let ints = items
            .iter()
            .map(|s| s.trim().parse::<BigInt>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        ProjectivePoint::new(ints).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Affine(AffinePoint),
    Projective(ProjectivePoint),
}

impl Point {
    pub fn bits(&self) -> u64 {
        match self {
            Point::Affine(a) => max_bits(&a.0),
            Point::Projective(p) => p.0.iter().map(|c| c.bits()).max().unwrap_or(0),
        }
    }

    pub fn as_affine(&self) -> Option<&AffinePoint> {
        match self {
            Point::Affine(a) => Some(a),
            Point::Projective(_) => None,
        }
    }

    pub fn as_projective(&self) -> Option<&ProjectivePoint> {
        match self {
            Point::Projective(p) => Some(p),
            Point::Affine(_) => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Affine(a) => a.fmt(f),
            Point::Projective(p) => p.fmt(f),
        }
    }
}
