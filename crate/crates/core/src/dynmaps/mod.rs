//! Concrete self-maps: monomial maps of the torus, triangular maps of affine
//! space and endomorphisms of projective space, with exact evaluation,
//! composition and orbit iteration.

mod descriptor;
mod point;

use crate::arith;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::heights;
use crate::linalg::coprime::{self, LogVec};
use crate::linalg::IntMatrix;
use crate::poly::{
    default_var_names, gcd, gcd_many, parse_expression, Monomial, MultiPoly, ParseError, PolyError,
    RationalFunction, DEFAULT_MAX_TERMS,
};

pub use descriptor::MapDescriptor;
pub use point::{max_bits, parse_rational, rat_to_string, AffinePoint, Point, ProjectivePoint};

pub const DEFAULT_HEIGHT_BUDGET_BITS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("invalid map: {0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot compose a {0} map with a {1} map")]
    FamilyMismatch(&'static str, &'static str),
    #[error("exponent {0} is too large")]
    ExponentTooLarge(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("pole hit")]
    PoleHit,
    #[error("torus boundary hit")]
    TorusBoundaryHit,
    #[error("indeterminacy point")]
    Indeterminacy,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point kind does not match the map family")]
    WrongPointKind,
    #[error("exponent too large")]
    ExponentTooLarge,
}

/// `x^e` for a nonzero `x` or `e ≥ 0`.
pub fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    let k = e.unsigned_abs() as usize;
    let n = num_traits::pow(x.numer().clone(), k);
    let d = num_traits::pow(x.denom().clone(), k);
    if e >= 0 {
        BigRational::new_raw(n, d)
    } else if n.is_negative() {
        BigRational::new_raw(-d, -n)
    } else {
        BigRational::new_raw(d, n)
    }
}

/// `x ↦ (c_i · ∏_j x_j^{M_ij})_i` on the torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMap {
    matrix: IntMatrix,
    coeff: Vec<BigRational>,
}

impl MonomialMap {
    pub fn new(matrix: IntMatrix, coeff: Vec<BigRational>) -> Result<Self, MapError> {
        if !matrix.is_square() {
            return Err(MapError::Invalid("matrix is not square".into()));
        }
        if coeff.len() != matrix.nrows() {
            return Err(MapError::DimensionMismatch {
                expected: matrix.nrows(),
                got: coeff.len(),
            });
        }
        Ok(MonomialMap { matrix, coeff })
    }

    /// Untwisted map, all coefficients 1.
    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        let m = IntMatrix::from_rows(rows);
        let n = m.nrows();
        Self::new(m, vec![BigRational::one(); n]).expect("square matrix")
    }

    pub fn with_coeff(rows: &[Vec<i64>], coeff: &[i64]) -> Self {
        let m = IntMatrix::from_rows(rows);
        let c = coeff
            .iter()
            .map(|&x| BigRational::from_integer(x.into()))
            .collect();
        Self::new(m, c).expect("square matrix")
    }

    pub fn identity(n: usize) -> Self {
        Self::new(IntMatrix::identity(n), vec![BigRational::one(); n]).expect("square")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn coeff(&self) -> &[BigRational] {
        &self.coeff
    }

    pub fn is_untwisted(&self) -> bool {
        self.coeff.iter().all(One::is_one)
    }

    fn exponent(&self, i: usize, j: usize) -> Option<i64> {
        self.matrix[(i, j)].to_i64()
    }

    pub fn eval(&self, x: &AffinePoint) -> Result<AffinePoint, EvalError> {
        let n = self.dim();
        if x.dim() != n {
            return Err(EvalError::DimensionMismatch {
                expected: n,
                got: x.dim(),
            });
        }
        if !x.on_torus() {
            return Err(EvalError::TorusBoundaryHit);
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut num = self.coeff[i].numer().clone();
            let mut den = self.coeff[i].denom().clone();
            for (j, xj) in x.0.iter().enumerate() {
                let e = self.exponent(i, j).ok_or(EvalError::ExponentTooLarge)?;
                if e == 0 {
                    continue;
                }
                let k = e.unsigned_abs() as usize;
                let (a, b) = (
                    num_traits::pow(xj.numer().clone(), k),
                    num_traits::pow(xj.denom().clone(), k),
                );
                if e > 0 {
                    num *= a;
                    den *= b;
                } else {
                    num *= b;
                    den *= a;
                }
            }
            out.push(arith::ratio(num, den));
        }
        Ok(AffinePoint(out))
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &MonomialMap) -> Result<MonomialMap, MapError> {
        let n = self.dim();
        if g.dim() != n {
            return Err(MapError::DimensionMismatch {
                expected: n,
                got: g.dim(),
            });
        }
        let m = self.matrix.mul(&g.matrix);
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let mut ci = self.coeff[i].clone();
            for j in 0..n {
                let e = self
                    .exponent(i, j)
                    .ok_or_else(|| MapError::ExponentTooLarge(self.matrix[(i, j)].to_string()))?;
                if e != 0 {
                    ci *= rat_pow(&g.coeff[j], e);
                }
            }
            c.push(ci);
        }
        MonomialMap::new(m, c)
    }

    pub fn iterate(&self, k: u32) -> Result<MonomialMap, MapError> {
        let mut out = MonomialMap::identity(self.dim());
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// Components `c_i x^{M_i}` as rational functions.
    pub fn components(&self) -> Vec<RationalFunction> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut pos = vec![0u64; n];
                let mut neg = vec![0u64; n];
                for j in 0..n {
                    let e = &self.matrix[(i, j)];
                    let k = e.magnitude().to_u64().expect("exponent fits u64");
                    if e.is_negative() {
                        neg[j] = k;
                    } else {
                        pos[j] = k;
                    }
                }
                let num = MultiPoly::term(n, Monomial(pos), self.coeff[i].clone());
                let den = MultiPoly::term(n, Monomial(neg), BigRational::one());
                RationalFunction::new(num, den).expect("monomial denominator")
            })
            .collect()
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.matrix.det().is_zero() {
            out.push("singular matrix".to_string());
        }
        if self.coeff.iter().any(Zero::is_zero) {
            out.push("zero coefficient".to_string());
        }
        out
    }
}

/// `(f_1(x_1), f_2(x_1, x_2), …)` with `f_i` polynomial in `x_i` over the
/// rational functions of the earlier variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangularMap {
    vars: Vec<String>,
    comps: Vec<RationalFunction>,
}

impl TriangularMap {
    pub fn new(vars: Vec<String>, comps: Vec<RationalFunction>) -> Result<Self, MapError> {
        let m = vars.len();
        if comps.len() != m {
            return Err(MapError::DimensionMismatch {
                expected: m,
                got: comps.len(),
            });
        }
        if let Some(c) = comps.iter().find(|c| c.nvars() != m) {
            return Err(MapError::DimensionMismatch {
                expected: m,
                got: c.nvars(),
            });
        }
        Ok(TriangularMap { vars, comps })
    }

    pub fn parse(vars: &[&str], polys: &[&str]) -> Result<Self, MapError> {
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let comps = polys
            .iter()
            .map(|s| parse_expression(s, &names).map(|e| e.into_rational()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(names, comps)
    }

    pub fn identity(vars: Vec<String>) -> Self {
        let m = vars.len();
        let comps = (0..m)
            .map(|i| RationalFunction::from_poly(MultiPoly::var(m, i)))
            .collect();
        TriangularMap { vars, comps }
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.comps
    }

    pub fn eval(&self, x: &AffinePoint) -> Result<AffinePoint, EvalError> {
        let m = self.dim();
        if x.dim() != m {
            return Err(EvalError::DimensionMismatch {
                expected: m,
                got: x.dim(),
            });
        }
        self.comps
            .iter()
            .map(|c| c.eval(&x.0).ok_or(EvalError::PoleHit))
            .collect::<Result<Vec<_>, _>>()
            .map(AffinePoint)
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &TriangularMap) -> Result<TriangularMap, MapError> {
        if g.dim() != self.dim() {
            return Err(MapError::DimensionMismatch {
                expected: self.dim(),
                got: g.dim(),
            });
        }
        let comps = self
            .comps
            .iter()
            .map(|f| substitute_rational(f, &g.comps))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TriangularMap {
            vars: self.vars.clone(),
            comps,
        })
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, c) in self.comps.iter().enumerate() {
            let name = &self.vars[i];
            if c.is_constant() {
                out.push(format!("constant component: f{} is constant", i + 1));
            }
            if c.numerator().degree_in(i).unwrap_or(0) == 0 {
                out.push(format!("not dominant: f{} has degree 0 in {name}", i + 1));
            }
            let later = (i + 1..self.dim())
                .any(|j| c.numerator().involves(j) || c.denominator().involves(j));
            if later || c.denominator().involves(i) {
                out.push(format!(
                    "not triangular: f{} is not polynomial in {name} over the earlier variables",
                    i + 1
                ));
            }
        }
        out
    }
}

/// `p(subs)` for rational-function substitutions, brought to one fraction.
pub fn substitute_poly_rational(
    p: &MultiPoly,
    subs: &[RationalFunction],
) -> Result<RationalFunction, MapError> {
    let n = p.nvars();
    let out_vars = subs.first().map(|s| s.nvars()).unwrap_or(0);
    let e: Vec<u64> = (0..n).map(|j| p.degree_in(j).unwrap_or(0)).collect();
    let mut num = MultiPoly::zero(out_vars);
    for (m, c) in p.terms() {
        let mut t = MultiPoly::constant(out_vars, c.clone());
        for j in 0..n {
            let a = subs[j].numerator().checked_pow(m.0[j], DEFAULT_MAX_TERMS)?;
            let b = subs[j]
                .denominator()
                .checked_pow(e[j] - m.0[j], DEFAULT_MAX_TERMS)?;
            t = t
                .checked_mul(&a, DEFAULT_MAX_TERMS)?
                .checked_mul(&b, DEFAULT_MAX_TERMS)?;
        }
        num = &num + &t;
    }
    let mut den = MultiPoly::one(out_vars);
    for j in 0..n {
        den = den.checked_mul(
            &subs[j].denominator().checked_pow(e[j], DEFAULT_MAX_TERMS)?,
            DEFAULT_MAX_TERMS,
        )?;
    }
    Ok(RationalFunction::new(num, den)?)
}

fn substitute_rational(
    f: &RationalFunction,
    subs: &[RationalFunction],
) -> Result<RationalFunction, MapError> {
    let a = substitute_poly_rational(f.numerator(), subs)?;
    let b = substitute_poly_rational(f.denominator(), subs)?;
    if b.is_zero() {
        return Err(MapError::Invalid(
            "composition has an identically zero denominator".into(),
        ));
    }
    let num = a.numerator() * b.denominator();
    let den = a.denominator() * b.numerator();
    Ok(RationalFunction::new(num, den)?)
}

/// Endomorphism of ℙ^m given by m+1 homogeneous forms of one degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveEndo {
    coords: Vec<MultiPoly>,
    degree: u64,
}

impl ProjectiveEndo {
    /// Checks shape and homogeneity; common factors are kept (see
    /// [`ProjectiveEndo::reduced`]).
    pub fn new(coords: Vec<MultiPoly>) -> Result<Self, MapError> {
        let k = coords.len();
        if k < 2 {
            return Err(MapError::Invalid(
                "a map of projective space needs at least two coordinates".into(),
            ));
        }
        if let Some(c) = coords.iter().find(|c| c.nvars() != k) {
            return Err(MapError::DimensionMismatch {
                expected: k,
                got: c.nvars(),
            });
        }
        if coords.iter().all(MultiPoly::is_zero) {
            return Err(MapError::Invalid("all coordinates are zero".into()));
        }
        if coords.iter().any(|c| !c.is_homogeneous()) {
            return Err(MapError::Invalid("not homogeneous".into()));
        }
        let mut degs = coords.iter().filter_map(MultiPoly::total_degree);
        let d = degs.next().expect("some coordinate is nonzero");
        if degs.any(|e| e != d) {
            return Err(MapError::Invalid(
                "coordinates have different degrees".into(),
            ));
        }
        if d == 0 {
            return Err(MapError::Invalid("constant map".into()));
        }
        let degree = u64::try_from(d).map_err(|_| MapError::ExponentTooLarge(d.to_string()))?;
        Ok(ProjectiveEndo { coords, degree })
    }

    /// Divides out the gcd of the coordinate tuple and normalizes the first
    /// nonzero coordinate to be primitive with positive leading term.
    pub fn reduced(coords: Vec<MultiPoly>) -> Result<Self, MapError> {
        let nonzero: Vec<&MultiPoly> = coords.iter().filter(|c| !c.is_zero()).collect();
        let g = gcd_many(nonzero.iter().copied())
            .ok_or_else(|| MapError::Invalid("all coordinates are zero".into()))?;
        let mut out: Vec<MultiPoly> = if g.is_constant() {
            coords
        } else {
            coords
                .iter()
                .map(|c| c.div_exact(&g))
                .collect::<Result<_, _>>()?
        };
        // common rational scalar
        let mut l = BigInt::one();
        let mut gnum = BigInt::zero();
        for c in &out {
            for a in c.terms().values() {
                l = l.lcm(a.denom());
                gnum = gnum.gcd(a.numer());
            }
        }
        let mut s = BigRational::new(l, gnum);
        if out
            .iter()
            .find(|c| !c.is_zero())
            .and_then(|c| c.leading_term())
            .is_some_and(|(_, a)| a.is_negative())
        {
            s = -s;
        }
        if !s.is_one() {
            out = out.iter().map(|c| c.scale(&s)).collect();
        }
        Self::new(out)
    }

    pub fn parse(coords: &[&str]) -> Result<Self, MapError> {
        let names = default_var_names("X", coords.len(), 0);
        let polys = coords
            .iter()
            .map(|s| {
                parse_expression(s, &names)?.into_poly().ok_or_else(|| {
                    MapError::Invalid(format!("coordinate {s:?} is not a polynomial"))
                })
            })
            .collect::<Result<Vec<_>, MapError>>()?;
        Self::new(polys)
    }

    pub fn identity(dim: usize) -> Self {
        let k = dim + 1;
        Self::new((0..k).map(|i| MultiPoly::var(k, i)).collect()).expect("linear forms")
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn coords(&self) -> &[MultiPoly] {
        &self.coords
    }

    pub fn var_names(&self) -> Vec<String> {
        default_var_names("X", self.coords.len(), 0)
    }

    pub fn eval(&self, p: &ProjectivePoint) -> Result<ProjectivePoint, EvalError> {
        let k = self.coords.len();
        if p.coords().len() != k {
            return Err(EvalError::DimensionMismatch {
                expected: k - 1,
                got: p.dim(),
            });
        }
        let x: Vec<BigRational> = p
            .coords()
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let img: Vec<BigRational> = self.coords.iter().map(|c| c.eval(&x)).collect();
        ProjectivePoint::from_rationals(&img).map_err(|_| EvalError::Indeterminacy)
    }

    /// `self ∘ g` with the gcd of the resulting tuple removed.
    pub fn compose(
        &self,
        g: &ProjectiveEndo,
        max_terms: usize,
    ) -> Result<ProjectiveEndo, MapError> {
        if g.coords.len() != self.coords.len() {
            return Err(MapError::DimensionMismatch {
                expected: self.dim(),
                got: g.dim(),
            });
        }
        let raw = self
            .coords
            .iter()
            .map(|c| c.substitute(&g.coords, max_terms))
            .collect::<Result<Vec<_>, _>>()?;
        Self::reduced(raw)
    }

    pub fn diagnostics(&self) -> Vec<String> {
        let nonzero: Vec<&MultiPoly> = self.coords.iter().filter(|c| !c.is_zero()).collect();
        match gcd_many(nonzero.iter().copied()) {
            Some(g) if !g.is_constant() => {
                vec![format!(
                    "common factor: {}",
                    g.to_expr_string(&self.var_names())
                )]
            }
            _ => Vec::new(),
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        let names = self.var_names();
        self.coords
            .iter()
            .map(|c| c.to_expr_string(&names))
            .collect()
    }
}

/// Homogenization of an affine rational map `(f_1, …, f_m)` to ℙ^m through
/// the chart `x ↦ [x : 1]`, with the common factor removed.
pub fn homogenize_rational(comps: &[RationalFunction]) -> Result<ProjectiveEndo, MapError> {
    let m = comps.len();
    let mut l = MultiPoly::one(m);
    for c in comps {
        let d = c.denominator();
        let g = gcd(&l, d);
        l = (&l * d).div_exact(&g)?;
    }
    let mut affine: Vec<MultiPoly> = comps
        .iter()
        .map(|c| Ok(c.numerator() * &l.div_exact(c.denominator())?))
        .collect::<Result<_, PolyError>>()?;
    affine.push(l);
    let d = affine
        .iter()
        .filter_map(MultiPoly::total_degree)
        .max()
        .unwrap_or(0);
    let hom: Vec<MultiPoly> = affine
        .iter()
        .map(|p| {
            let mut out = MultiPoly::zero(m + 1);
            for (e, c) in p.terms() {
                let mut v = e.0.clone();
                v.push((d - e.total_degree()) as u64);
                out.add_term(Monomial(v), c.clone());
            }
            out
        })
        .collect();
    ProjectiveEndo::reduced(hom)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DynMap {
    Monomial(MonomialMap),
    Triangular(TriangularMap),
    Projective(ProjectiveEndo),
}

impl DynMap {
    pub fn family(&self) -> &'static str {
        match self {
            DynMap::Monomial(_) => "monomial",
            DynMap::Triangular(_) => "triangular",
            DynMap::Projective(_) => "projective",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DynMap::Monomial(f) => f.dim(),
            DynMap::Triangular(f) => f.dim(),
            DynMap::Projective(f) => f.dim(),
        }
    }

    pub fn identity_like(&self) -> DynMap {
        match self {
            DynMap::Monomial(f) => DynMap::Monomial(MonomialMap::identity(f.dim())),
            DynMap::Triangular(f) => DynMap::Triangular(TriangularMap::identity(f.vars.clone())),
            DynMap::Projective(f) => DynMap::Projective(ProjectiveEndo::identity(f.dim())),
        }
    }

    pub fn evaluate(&self, p: &Point) -> Result<Point, EvalError> {
        match (self, p) {
            (DynMap::Monomial(f), Point::Affine(x)) => f.eval(x).map(Point::Affine),
            (DynMap::Triangular(f), Point::Affine(x)) => f.eval(x).map(Point::Affine),
            (DynMap::Projective(f), Point::Projective(x)) => f.eval(x).map(Point::Projective),
            _ => Err(EvalError::WrongPointKind),
        }
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &DynMap) -> Result<DynMap, MapError> {
        match (self, g) {
            (DynMap::Monomial(f), DynMap::Monomial(g)) => f.compose(g).map(DynMap::Monomial),
            (DynMap::Triangular(f), DynMap::Triangular(g)) => f.compose(g).map(DynMap::Triangular),
            (DynMap::Projective(f), DynMap::Projective(g)) => {
                f.compose(g, DEFAULT_MAX_TERMS).map(DynMap::Projective)
            }
            _ => Err(MapError::FamilyMismatch(self.family(), g.family())),
        }
    }

    /// `self^k`, composed as `f ∘ f^{k−1}`.
    pub fn iterate(&self, k: u32) -> Result<DynMap, MapError> {
        let mut out = self.identity_like();
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// Projective model on ℙ^m used for degree computations.
    pub fn homogenize(&self) -> Result<ProjectiveEndo, MapError> {
        match self {
            DynMap::Monomial(f) => homogenize_rational(&f.components()),
            DynMap::Triangular(f) => homogenize_rational(&f.comps),
            DynMap::Projective(f) => Ok(f.clone()),
        }
    }

    pub fn descriptor(&self) -> MapDescriptor {
        MapDescriptor::from_map(self)
    }
}

/// Named violations of the map invariants; empty when the map is valid.
pub fn validate_map(f: &DynMap) -> Vec<String> {
    match f {
        DynMap::Monomial(f) => f.diagnostics(),
        DynMap::Triangular(f) => f.diagnostics(),
        DynMap::Projective(f) => f.diagnostics(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "step", rename_all = "kebab-case")]
pub enum OrbitStatus {
    Completed,
    PoleHit(usize),
    TorusBoundaryHit(usize),
    Indeterminacy(usize),
    HeightBudgetExceeded(usize),
}

impl OrbitStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, OrbitStatus::Completed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    pub map: MapDescriptor,
    pub start: Point,
    pub points: Vec<Point>,
    pub heights: Vec<f64>,
    pub height_bits: Vec<u64>,
    pub status: OrbitStatus,
}

impl OrbitRecord {
    pub fn affine_points(&self) -> Vec<AffinePoint> {
        self.points
            .iter()
            .filter_map(|p| p.as_affine().cloned())
            .collect()
    }
}

/// `start, f(start), …` up to `f^{n_max}(start)`; stops early at a pole, the
/// torus boundary, an indeterminacy point, or the first point whose
/// numerators or denominators exceed `budget_bits`.
pub fn iterate_orbit(f: &DynMap, start: &Point, n_max: usize, budget_bits: u64) -> OrbitRecord {
    let h0 = heights::height_of_point(start);
    let mut rec = OrbitRecord {
        map: f.descriptor(),
        start: start.clone(),
        points: vec![start.clone()],
        heights: vec![h0.value],
        height_bits: vec![h0.exact_bitlen],
        status: OrbitStatus::Completed,
    };
    let boundary =
        |p: &Point| matches!((f, p), (DynMap::Monomial(_), Point::Affine(a)) if !a.on_torus());
    if boundary(start) {
        rec.status = OrbitStatus::TorusBoundaryHit(0);
        return rec;
    }
    if start.bits() > budget_bits {
        rec.status = OrbitStatus::HeightBudgetExceeded(0);
        return rec;
    }
    if let (DynMap::Monomial(m), Point::Affine(a)) = (f, start) {
        if m.dim() == a.dim() && !m.coeff().iter().any(Zero::is_zero) {
            monomial_orbit(m, a, n_max, budget_bits, &mut rec);
            return rec;
        }
    }
    let mut cur = start.clone();
    for k in 1..=n_max {
        let next = match f.evaluate(&cur) {
            Ok(p) => p,
            Err(EvalError::TorusBoundaryHit) => {
                rec.status = OrbitStatus::TorusBoundaryHit(k - 1);
                return rec;
            }
            Err(EvalError::Indeterminacy) => {
                rec.status = OrbitStatus::Indeterminacy(k - 1);
                return rec;
            }
            Err(_) => {
                rec.status = OrbitStatus::PoleHit(k - 1);
                return rec;
            }
        };
        if next.bits() > budget_bits {
            rec.status = OrbitStatus::HeightBudgetExceeded(k);
            return rec;
        }
        let h = heights::height_of_point(&next);
        rec.heights.push(h.value);
        rec.height_bits.push(h.exact_bitlen);
        rec.points.push(next.clone());
        if boundary(&next) {
            rec.status = OrbitStatus::TorusBoundaryHit(k);
            return rec;
        }
        cur = next;
    }
    rec
}

/// Orbit of a torus point under a monomial map, tracked as exponent vectors
/// over a coprime base of the start point and the coefficients. Points come
/// out reduced without any gcd, and the budget is checked before a point is
/// built.
fn monomial_orbit(
    f: &MonomialMap,
    start: &AffinePoint,
    n_max: usize,
    budget_bits: u64,
    rec: &mut OrbitRecord,
) {
    let mut qs = start.coords().to_vec();
    qs.extend_from_slice(f.coeff());
    let base = coprime::base_for(&qs);
    let log2b: Vec<f64> = base
        .iter()
        .map(|b| heights::ln_abs(b) / std::f64::consts::LN_2)
        .collect();
    let c: Vec<LogVec> = f
        .coeff()
        .iter()
        .map(|q| coprime::rat_log(q, &base))
        .collect();
    let mut cur: Vec<LogVec> = start
        .coords()
        .iter()
        .map(|q| coprime::rat_log(q, &base))
        .collect();
    let m = f.matrix();
    let n = f.dim();
    for k in 1..=n_max {
        let next: Vec<LogVec> = (0..n)
            .map(|i| {
                let mut l = c[i].clone();
                for (j, xj) in cur.iter().enumerate() {
                    let e = &m[(i, j)];
                    if e.is_zero() {
                        continue;
                    }
                    l.neg ^= xj.neg && e.is_odd();
                    for (a, b) in l.exps.iter_mut().zip(&xj.exps) {
                        *a += e * b;
                    }
                }
                l
            })
            .collect();
        let est = next
            .iter()
            .flat_map(|l| {
                let (mut pos, mut neg) = (0.0, 0.0);
                for (e, w) in l.exps.iter().zip(&log2b) {
                    let x = e.to_f64().unwrap_or(f64::INFINITY) * w;
                    if x > 0.0 {
                        pos += x;
                    } else {
                        neg -= x;
                    }
                }
                [pos, neg]
            })
            .fold(0.0, f64::max);
        // the bit length is floor(log2) + 1; leave a wide margin for rounding
        if est.is_infinite() || est > budget_bits as f64 + 2.0 {
            rec.status = OrbitStatus::HeightBudgetExceeded(k);
            return;
        }
        let parts: Vec<(BigInt, BigInt)> = next.iter().map(|l| split_power(l, &base)).collect();
        let point = AffinePoint(
            parts
                .iter()
                .zip(&next)
                .map(|((num, den), l)| {
                    let num = if l.neg { -num } else { num.clone() };
                    BigRational::new_raw(num, den.clone())
                })
                .collect(),
        );
        if parts
            .iter()
            .map(|(a, b)| a.bits().max(b.bits()))
            .max()
            .unwrap_or(0)
            > budget_bits
        {
            rec.status = OrbitStatus::HeightBudgetExceeded(k);
            return;
        }
        // lcm of the denominators is the product of the largest negative powers
        let kk = base.len();
        let dmax: Vec<BigInt> = (0..kk)
            .map(|t| {
                next.iter()
                    .map(|l| (-&l.exps[t]).max(BigInt::zero()))
                    .max()
                    .unwrap_or_default()
            })
            .collect();
        let lcm = LogVec {
            neg: false,
            exps: dmax.clone(),
        };
        let mut top = split_power(&lcm, &base).0;
        for l in &next {
            let shifted = LogVec {
                neg: false,
                exps: l.exps.iter().zip(&dmax).map(|(a, b)| a + b).collect(),
            };
            top = top.max(split_power(&shifted, &base).0);
        }
        rec.heights.push(heights::ln_abs(&top));
        rec.height_bits.push(top.bits());
        rec.points.push(Point::Affine(point));
        cur = next;
    }
}

/// `(∏ b^{e⁺}, ∏ b^{e⁻})` for an exponent vector `e`.
fn split_power(l: &LogVec, base: &[BigInt]) -> (BigInt, BigInt) {
    let (mut num, mut den) = (BigInt::one(), BigInt::one());
    for (b, e) in base.iter().zip(&l.exps) {
        if e.is_zero() {
            continue;
        }
        let k = e.magnitude().to_usize().expect("exponent fits usize");
        let p = num_traits::pow(b.clone(), k);
        if e.is_positive() {
            num *= p;
        } else {
            den *= p;
        }
    }
    (num, den)
}
