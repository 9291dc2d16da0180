use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{gcd, MultiPoly, PolyError};

/// Quotient of two polynomials with a nonzero denominator.
///
/// Kept reduced: numerator and denominator share no polynomial factor, both
/// have integer coefficients, their integer contents are coprime, and the
/// denominator's leading coefficient is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.nvars() != den.nvars() {
            return Err(PolyError::VarCountMismatch(num.nvars(), den.nvars()));
        }
        let mut r = RationalFunction { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let n = p.nvars();
        Self::new(p, MultiPoly::one(n)).expect("unit denominator")
    }

    fn normalize(&mut self) {
        let n = self.num.nvars();
        if self.num.is_zero() {
            self.den = MultiPoly::one(n);
            return;
        }
        let g = gcd(&self.num, &self.den);
        if !g.is_constant() {
            self.num = self.num.div_exact(&g).expect("gcd divides numerator");
            self.den = self.den.div_exact(&g).expect("gcd divides denominator");
        }
        let sd = self.den.primitive_scale();
        let num = self.num.scale(&sd);
        let den = self.den.scale(&sd);
        // num = (a/b) * primitive(num); multiply both sides by b
        let content = BigRational::one() / num.primitive_scale().abs();
        let b = BigRational::from_integer(content.denom().clone());
        self.num = num.scale(&b);
        self.den = den.scale(&b);
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The polynomial `num/den` when the denominator is constant.
    pub fn as_polynomial(&self) -> Option<MultiPoly> {
        let c = self.den.as_constant()?;
        Some(self.num.scale(&(BigRational::one() / c)))
    }

    /// `None` at a pole.
    pub fn eval(&self, point: &[BigRational]) -> Option<BigRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return None;
        }
        let n = self.num.eval(point);
        Some(crate::arith::ratio(
            n.numer() * d.denom(),
            n.denom() * d.numer(),
        ))
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &other.num, &self.den * &other.den)
            .expect("nonzero denominators")
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RationalFunction::new(num, &self.den * &other.den).expect("nonzero denominators")
    }

    pub fn to_expr_string(&self, names: &[String]) -> String {
        match self.den.as_constant() {
            Some(c) if c.is_one() => self.num.to_expr_string(names),
            _ => format!(
                "({})/({})",
                self.num.to_expr_string(names),
                self.den.to_expr_string(names)
            ),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = super::default_var_names("x", self.nvars(), 1);
        f.write_str(&self.to_expr_string(&names))
    }
}
