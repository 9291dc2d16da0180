//! Zariski-density probes for orbits by exact interpolation, and the
//! small-dynamical-degree clause checker.

use num_integer::binomial;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::degrees::{arith_degree_from_heights, dyn_degrees, DynDegrees, KscParams, ALPHA_SLACK};
use crate::dynmaps::{iterate_orbit, AffinePoint, DynMap, OrbitRecord, OrbitStatus, Point};
use crate::linalg::kernel_basis;
use crate::poly::{default_var_names, Monomial, MultiPoly};
use crate::torus::{invariant_monomials, InvariantFunctionReport};

/// Extra points demanded beyond the dimension of the monomial space.
pub const POINT_MARGIN: usize = 3;

/// Exponent vectors of total degree ≤ `d` in `m` variables, ascending grlex.
pub fn monomials_up_to(m: usize, d: usize) -> Vec<Monomial> {
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, d as u64, &mut vec![0; m], &mut out);
    out.sort();
    out
}

pub fn monomial_space_dim(m: usize, d: usize) -> usize {
    binomial(m + d, d)
}

fn eval_row(p: &AffinePoint, monos: &[Monomial]) -> Vec<BigRational> {
    monos
        .iter()
        .map(|e| {
            MultiPoly::term(p.dim(), e.clone(), BigRational::from_integer(1.into()))
                .eval(p.coords())
        })
        .collect()
}

/// Basis of the polynomials of degree ≤ `d` vanishing at every point, by
/// fraction-free elimination of the evaluation matrix. Each element is
/// primitive with positive leading coefficient.
pub fn relation_kernel(points: &[AffinePoint], d: usize) -> Vec<MultiPoly> {
    assert!(d >= 1);
    let m = points.first().map(AffinePoint::dim).unwrap_or(0);
    assert!(
        points.iter().all(|p| p.dim() == m),
        "points of mixed dimension"
    );
    let monos = monomials_up_to(m, d);
    let rows: Vec<Vec<BigRational>> = points.iter().map(|p| eval_row(p, &monos)).collect();
    kernel_basis(&rows, monos.len())
        .into_iter()
        .map(|v| {
            MultiPoly::from_terms(
                m,
                monos
                    .iter()
                    .zip(v)
                    .map(|(e, c)| (e.0.clone(), BigRational::from_integer(c))),
            )
        })
        .collect()
}

/// Deterministic pick among kernel elements: coefficient vectors compared
/// lexicographically over the monomials in ascending grlex order.
fn pick_relation(kernel: Vec<MultiPoly>, monos: &[Monomial]) -> Option<MultiPoly> {
    let key = |p: &MultiPoly| -> Vec<BigRational> { monos.iter().map(|e| p.coeff(e)).collect() };
    kernel.into_iter().min_by(|a, b| key(a).cmp(&key(b)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCertificate {
    pub degree: usize,
    /// Serialized in the expression grammar.
    pub relation: String,
    #[serde(skip)]
    pub poly: MultiPoly,
    pub points_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityOutcome {
    RelationFound(RelationCertificate),
    NoRelationUpTo { d_max: usize },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub outcome: DensityOutcome,
    pub points_used: usize,
    pub d_max: usize,
}

impl DensityReport {
    pub fn relation(&self) -> Option<&RelationCertificate> {
        match &self.outcome {
            DensityOutcome::RelationFound(c) => Some(c),
            _ => None,
        }
    }

    pub fn summary(&self) -> String {
        match &self.outcome {
            DensityOutcome::RelationFound(c) => {
                format!("relation {} at degree {}", c.relation, c.degree)
            }
            DensityOutcome::NoRelationUpTo { d_max } => format!("no relation up to degree {d_max}"),
            DensityOutcome::Inconclusive { reason } => format!("inconclusive: {reason}"),
        }
    }
}

/// Affine points of an orbit; projective points are read in the chart of
/// the last coordinate.
fn orbit_affine_points(orbit: &OrbitRecord) -> Option<Vec<AffinePoint>> {
    orbit
        .points
        .iter()
        .map(|p| match p {
            Point::Affine(a) => Some(a.clone()),
            Point::Projective(q) => q.to_affine(),
        })
        .collect()
}

/// Lowest-degree polynomial relation on the orbit points, or a full-rank
/// certificate that none exists up to `d_max`.
pub fn density_certificate(orbit: &OrbitRecord, d_max: usize) -> DensityReport {
    let inconclusive = |reason: String, used: usize| DensityReport {
        outcome: DensityOutcome::Inconclusive { reason },
        points_used: used,
        d_max,
    };
    let Some(points) = orbit_affine_points(orbit) else {
        return inconclusive("orbit meets the hyperplane at infinity".into(), 0);
    };
    let n = points.len();
    let m = points.first().map(AffinePoint::dim).unwrap_or(0);
    let need = monomial_space_dim(m, d_max) + POINT_MARGIN;
    if n < need {
        return inconclusive(format!("{n} points, {need} needed for degree {d_max}"), n);
    }
    for d in 1..=d_max {
        let monos = monomials_up_to(m, d);
        let kernel = relation_kernel(&points, d);
        if let Some(rel) = pick_relation(kernel, &monos) {
            if !points.iter().all(|p| rel.eval(p.coords()).is_zero()) {
                return inconclusive("relation failed exact re-verification".into(), n);
            }
            let names = default_var_names("x", m, 1);
            return DensityReport {
                outcome: DensityOutcome::RelationFound(RelationCertificate {
                    degree: d,
                    relation: rel.to_expr_string(&names),
                    poly: rel,
                    points_used: n,
                }),
                points_used: n,
                d_max,
            };
        }
    }
    DensityReport {
        outcome: DensityOutcome::NoRelationUpTo { d_max },
        points_used: n,
        d_max,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SddClause {
    /// dim 2: `d₁ > 1` and `d₁ ≥ d₂`.
    SurfaceD1Dominant,
    /// dim 3: `d₁ > d₃ = 1`.
    ThreefoldTopDegreeOne,
    /// smooth, any dim: `d₁ > max_{i≥2} d_i`.
    SmoothD1StrictMax,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SddVerdict {
    pub dim: usize,
    pub degrees: Vec<Option<f64>>,
    pub smooth: bool,
    pub clause: SddClause,
    pub detail: Vec<String>,
}

pub const SDD_MARGIN: f64 = 1e-9;

/// First satisfied clause among the three degree conditions, in order.
pub fn sdd_hypothesis_check(dd: &DynDegrees, dim: usize, smooth: bool) -> SddVerdict {
    assert_eq!(dd.n, dim, "degree tuple length must equal the dimension");
    let mut detail = Vec::new();
    let d1 = dd.d1();
    let gt = |a: f64, b: f64| a - b > SDD_MARGIN;
    let ge = |a: f64, b: f64| a - b >= -SDD_MARGIN;
    let mut clause = SddClause::None;

    if dim == 2 {
        match dd.d(2) {
            Some(d2) => {
                let ok1 = gt(d1, 1.0);
                let ok2 = ge(d1, d2);
                detail.push(format!("d1 > 1: {d1} > 1 {}", verdict(ok1)));
                detail.push(format!("d1 >= d2: {d1} >= {d2} {}", verdict(ok2)));
                if ok1 && ok2 {
                    clause = SddClause::SurfaceD1Dominant;
                }
            }
            None => detail.push("d2 unavailable".into()),
        }
    }
    if clause == SddClause::None && dim == 3 {
        match dd.d(3) {
            Some(d3) => {
                let exact = d3 == 1.0;
                let ok = gt(d1, d3);
                detail.push(format!("d3 = 1 exactly: {d3} {}", verdict(exact)));
                detail.push(format!("d1 > d3: {d1} > {d3} {}", verdict(ok)));
                if exact && ok {
                    clause = SddClause::ThreefoldTopDegreeOne;
                }
            }
            None => detail.push("d3 unavailable".into()),
        }
    }
    if clause == SddClause::None {
        if !smooth {
            detail.push("smooth-variety clause skipped: variety not marked smooth".into());
        } else {
            let rest: Option<Vec<f64>> = (2..=dim).map(|i| dd.d(i)).collect();
            match rest {
                Some(rest) => {
                    let mx = rest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let ok = rest.is_empty() || gt(d1, mx);
                    detail.push(format!("d1 > max(d2..d{dim}): {d1} > {mx} {}", verdict(ok)));
                    if ok {
                        clause = SddClause::SmoothD1StrictMax;
                    }
                }
                None => detail.push("some d_i unavailable".into()),
            }
        }
    }
    SddVerdict {
        dim,
        degrees: dd.values.clone(),
        smooth,
        clause,
        detail,
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "fails"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZdoStart {
    pub start: Point,
    pub status: OrbitStatus,
    pub density: DensityReport,
    pub alpha_hat: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZdoReport {
    pub starts: Vec<ZdoStart>,
    pub invariant_functions: Option<InvariantFunctionReport>,
    pub sdd: Option<SddVerdict>,
    pub notes: Vec<String>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZdoParams {
    pub ksc: KscParams,
    pub l_max: Option<u64>,
    pub smooth: bool,
}

impl Default for ZdoParams {
    fn default() -> Self {
        ZdoParams {
            ksc: KscParams::default(),
            l_max: None,
            smooth: true,
        }
    }
}

/// Degree of the relation `x^{v⁺} − c·x^{v⁻}` coming from an invariant
/// Laurent monomial `x^v`.
fn invariant_relation_degree(v: &[i64]) -> usize {
    let pos: i64 = v.iter().filter(|x| **x > 0).sum();
    let neg: i64 = v.iter().filter(|x| **x < 0).map(|x| -x).sum();
    pos.max(neg) as usize
}

/// Per-start orbit, density and arithmetic-degree probes, plus map-level
/// invariant-function and SDD checks. One failing start never aborts the
/// experiment.
pub fn zdo_experiment(f: &DynMap, starts: &[Point], params: &ZdoParams) -> ZdoReport {
    let p = &params.ksc;
    let per: Vec<ZdoStart> = starts
        .par_iter()
        .map(|x| {
            let orbit = iterate_orbit(f, x, p.n_max, p.budget_bits);
            let density = density_certificate(&orbit, p.d_max);
            let est = arith_degree_from_heights(
                x.clone(),
                orbit.status,
                &orbit.heights,
                &orbit.height_bits,
            );
            ZdoStart {
                start: x.clone(),
                status: orbit.status,
                density,
                alpha_hat: est.as_ref().ok().map(|e| e.alpha_hat),
                error: est.err().map(|e| e.to_string()),
            }
        })
        .collect();

    let mut notes = Vec::new();
    let mut flags = Vec::new();
    let inv = match f {
        DynMap::Monomial(m) => Some(invariant_monomials(m, params.l_max)),
        _ => {
            notes.push("no invariant-function decision procedure for this family".into());
            None
        }
    };
    let dd = dyn_degrees(f, p.growth_n, p.tol);
    let sdd = match &dd {
        Ok(dd) => Some(sdd_hypothesis_check(dd, f.dim(), params.smooth)),
        Err(e) => {
            notes.push(format!("degrees unavailable: {e}"));
            None
        }
    };

    if let Some(inv) = &inv {
        let visible = inv
            .witnesses
            .iter()
            .filter(|w| w.coefficient_condition)
            .any(|w| invariant_relation_degree(&w.v) <= p.d_max);
        if inv.found && visible {
            for s in &per {
                if matches!(s.density.outcome, DensityOutcome::NoRelationUpTo { .. }) {
                    flags.push(format!(
                        "contradiction: invariant function found but no relation on the orbit of {}",
                        s.start
                    ));
                }
            }
        }
    }
    if let Ok(dd) = &dd {
        for s in &per {
            if let Some(a) = s.alpha_hat {
                if a > dd.d1() + ALPHA_SLACK {
                    flags.push(format!(
                        "contradiction: alpha_hat {a} exceeds d1 {} at {}",
                        dd.d1(),
                        s.start
                    ));
                }
            }
        }
    }
    ZdoReport {
        starts: per,
        invariant_functions: inv,
        sdd,
        notes,
        flags,
    }
}
