//! Degree growth of iterates, dynamical degrees (exact for monomial maps)
//! and arithmetic-degree estimation from orbit heights.

use std::fmt::Write as _;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::density::{self, DensityReport};
use crate::dynmaps::{
    iterate_orbit, DynMap, MapError, MonomialMap, OrbitStatus, Point, ProjectiveEndo,
};
use crate::linalg::roots::spectral_radius;
use crate::poly::{PolyError, DEFAULT_MAX_TERMS};

/// Relative slack allowed above `d₁` before an estimate counts as a
/// contradiction of the upper bound.
pub const ALPHA_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DegreeError {
    #[error("resource cap exceeded: {0}")]
    ResourceCap(#[from] PolyError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("need at least {need} iterates, got {got}")]
    TooFewIterates { need: usize, got: usize },
    #[error("orbit too short: {valid_steps} valid steps")]
    OrbitTooShort { valid_steps: usize },
}

/// Common degree of the reduced coordinate tuple of `f^n`.
pub fn degree_of_iterate(f: &ProjectiveEndo, n: u32, max_terms: usize) -> Result<u64, DegreeError> {
    assert!(n >= 1, "iterate index starts at 1");
    let mut g = f.clone();
    for _ in 1..n {
        g = f.compose(&g, max_terms)?;
    }
    Ok(g.degree())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeGrowth {
    /// `deg f^n` for `n = 1..`; shorter than requested when a cap was hit.
    pub degs: Vec<u64>,
    pub root_estimates: Vec<f64>,
    pub ratio_estimates: Vec<f64>,
    pub d1_estimate: f64,
    pub converged: bool,
    pub truncated: bool,
}

pub fn estimate_d1_growth(
    f: &ProjectiveEndo,
    n: usize,
    tol: f64,
    max_terms: usize,
) -> Result<DegreeGrowth, DegreeError> {
    if n < 3 {
        return Err(DegreeError::TooFewIterates { need: 3, got: n });
    }
    let mut degs = vec![f.degree()];
    let mut g = f.clone();
    let mut truncated = false;
    while degs.len() < n {
        match f.compose(&g, max_terms) {
            Ok(h) => {
                degs.push(h.degree());
                g = h;
            }
            Err(MapError::Poly(_)) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let root_estimates: Vec<f64> = degs
        .iter()
        .enumerate()
        .map(|(i, &d)| (d as f64).powf(1.0 / (i + 1) as f64))
        .collect();
    let ratio_estimates: Vec<f64> = degs.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    let d1_estimate = ratio_estimates
        .last()
        .or(root_estimates.last())
        .copied()
        .unwrap_or(1.0)
        .max(1.0);
    let converged = !truncated
        && match ratio_estimates.as_slice() {
            [.., a, b] => (b - a).abs() <= tol * b,
            _ => false,
        };
    Ok(DegreeGrowth {
        degs,
        root_estimates,
        ratio_estimates,
        d1_estimate,
        converged,
        truncated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMethod {
    ExactSpectral,
    GrowthEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynDegrees {
    pub n: usize,
    /// `d_1, …, d_n`; `None` where the method gives no value.
    pub values: Vec<Option<f64>>,
    pub method: DegreeMethod,
}

impl DynDegrees {
    pub fn d(&self, k: usize) -> Option<f64> {
        if k == 0 {
            return Some(1.0);
        }
        self.values.get(k - 1).copied().flatten()
    }

    pub fn d1(&self) -> f64 {
        self.d(1).expect("d1 is always present")
    }
}

/// `d_k` is the spectral radius of the k-th compound matrix of `M`; the top
/// degree is `|det M|` exactly.
pub fn monomial_dyn_degrees(f: &MonomialMap) -> DynDegrees {
    let m = f.matrix();
    let n = f.dim();
    let values = (1..=n)
        .map(|k| {
            if k == n {
                m.det().abs().to_f64()
            } else {
                Some(spectral_radius(&m.compound(k).charpoly()).max(1.0))
            }
        })
        .collect();
    DynDegrees {
        n,
        values,
        method: DegreeMethod::ExactSpectral,
    }
}

/// Number of iterates used for the growth path on non-monomial maps.
pub const GROWTH_ITERATES: usize = 6;

/// Dynamical degrees of any supported map. Monomial maps use the spectral
/// formula. Other maps get `d₁` from degree growth on ℙ^m; triangular maps
/// also get the topological degree `∏ deg_{x_i} f_i`.
pub fn dyn_degrees(f: &DynMap, growth_n: usize, tol: f64) -> Result<DynDegrees, DegreeError> {
    if let DynMap::Monomial(m) = f {
        return Ok(monomial_dyn_degrees(m));
    }
    let n = f.dim();
    let growth = estimate_d1_growth(&f.homogenize()?, growth_n, tol, DEFAULT_MAX_TERMS)?;
    let mut values = vec![None; n];
    values[0] = Some(growth.d1_estimate);
    if let DynMap::Triangular(t) = f {
        let top: f64 = t
            .components()
            .iter()
            .enumerate()
            .map(|(i, c)| c.numerator().degree_in(i).unwrap_or(0) as f64)
            .product();
        values[n - 1] = Some(top.max(1.0));
    }
    Ok(DynDegrees {
        n,
        values,
        method: DegreeMethod::GrowthEstimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArithDegreeEstimate {
    pub point: Point,
    pub n_used: usize,
    pub status: OrbitStatus,
    /// `h(f^n x)` for `n = 0..=n_used`.
    pub heights: Vec<f64>,
    pub height_bits: Vec<u64>,
    /// `h⁺(f^n x)^{1/n}` for `n = 1..=n_used`.
    pub root_seq: Vec<f64>,
    /// `h⁺(f^{n+1} x) / h⁺(f^n x)` for `n = 0..n_used`.
    pub ratio_seq: Vec<f64>,
    pub window: (f64, f64),
    pub alpha_hat: f64,
}

/// Length of the tail used for the window.
pub const WINDOW: usize = 5;

pub fn estimate_arith_degree(
    f: &DynMap,
    x: &Point,
    n_max: usize,
    budget_bits: u64,
) -> Result<ArithDegreeEstimate, DegreeError> {
    let orbit = iterate_orbit(f, x, n_max, budget_bits);
    arith_degree_from_heights(x.clone(), orbit.status, &orbit.heights, &orbit.height_bits)
}

/// Estimator on precomputed heights `h(f^n x)`, `n = 0, 1, …`.
pub fn arith_degree_from_heights(
    point: Point,
    status: OrbitStatus,
    heights: &[f64],
    height_bits: &[u64],
) -> Result<ArithDegreeEstimate, DegreeError> {
    let n_used = heights.len().saturating_sub(1);
    if n_used < 3 {
        return Err(DegreeError::OrbitTooShort {
            valid_steps: n_used,
        });
    }
    let hp: Vec<f64> = heights.iter().map(|&h| h.max(1.0)).collect();
    let root_seq: Vec<f64> = (1..=n_used).map(|n| hp[n].powf(1.0 / n as f64)).collect();
    let ratio_seq: Vec<f64> = hp.windows(2).map(|w| w[1] / w[0]).collect();
    let tail: Vec<f64> = ratio_seq[ratio_seq.len().saturating_sub(WINDOW)..]
        .iter()
        .map(|r| r.max(1.0))
        .collect();
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let alpha_hat = ratio_seq.last().copied().unwrap_or(1.0).max(1.0);
    Ok(ArithDegreeEstimate {
        point,
        n_used,
        status,
        heights: heights.to_vec(),
        height_bits: height_bits.to_vec(),
        root_seq,
        ratio_seq,
        window: (lo, hi),
        alpha_hat,
    })
}

/// Decimal with 12 significant digits, trailing zeros dropped.
pub fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

/// CSV trace with columns `n,height,height_plus,root_estimate,ratio_estimate`.
pub fn trace_csv(est: &ArithDegreeEstimate) -> String {
    let mut out = String::from("n,height,height_plus,root_estimate,ratio_estimate\n");
    for n in 0..=est.n_used {
        let h = est.heights[n];
        let root = if n == 0 {
            String::new()
        } else {
            fmt_sig12(est.root_seq[n - 1])
        };
        let ratio = est
            .ratio_seq
            .get(n)
            .map(|r| fmt_sig12(*r))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{n},{},{},{root},{ratio}",
            fmt_sig12(h),
            fmt_sig12(h.max(1.0))
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KscParams {
    pub n_max: usize,
    pub budget_bits: u64,
    pub d_max: usize,
    pub growth_n: usize,
    pub tol: f64,
}

impl Default for KscParams {
    fn default() -> Self {
        KscParams {
            n_max: 12,
            budget_bits: crate::dynmaps::DEFAULT_HEIGHT_BUDGET_BITS,
            d_max: 3,
            growth_n: GROWTH_ITERATES,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KscReport {
    pub alpha_hat: f64,
    pub window: (f64, f64),
    pub d1: f64,
    pub d1_method: DegreeMethod,
    pub gap: f64,
    pub violation: bool,
    pub density: DensityReport,
}

/// Compares the arithmetic degree estimate at `x` against `d₁(f)`.
pub fn ksc_report(f: &DynMap, x: &Point, params: &KscParams) -> Result<KscReport, DegreeError> {
    let dd = dyn_degrees(f, params.growth_n, params.tol)?;
    let orbit = iterate_orbit(f, x, params.n_max, params.budget_bits);
    let est =
        arith_degree_from_heights(x.clone(), orbit.status, &orbit.heights, &orbit.height_bits)?;
    let density = density::density_certificate(&orbit, params.d_max);
    let d1 = dd.d1();
    Ok(KscReport {
        alpha_hat: est.alpha_hat,
        window: est.window,
        d1,
        d1_method: dd.method,
        gap: d1 - est.alpha_hat,
        violation: est.alpha_hat > d1 + ALPHA_SLACK,
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynmaps::{AffinePoint, TriangularMap};

    fn squaring_p2() -> ProjectiveEndo {
        ProjectiveEndo::parse(&["X0^2", "X1^2", "X2^2"]).unwrap()
    }

    #[test]
    fn iterate_degrees() {
        assert_eq!(
            degree_of_iterate(&squaring_p2(), 3, DEFAULT_MAX_TERMS).unwrap(),
            8
        );
        assert_eq!(
            degree_of_iterate(&ProjectiveEndo::identity(2), 5, DEFAULT_MAX_TERMS).unwrap(),
            1
        );
        let t = DynMap::Triangular(TriangularMap::parse(&["x", "y"], &["x^2", "x*y + 1"]).unwrap());
        assert_eq!(
            degree_of_iterate(&t.homogenize().unwrap(), 2, DEFAULT_MAX_TERMS).unwrap(),
            4
        );
    }

    #[test]
    fn growth_examples() {
        let g = estimate_d1_growth(&squaring_p2(), 6, 1e-6, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(g.degs, vec![2, 4, 8, 16, 32, 64]);
        assert_eq!(g.d1_estimate, 2.0);
        assert!(g.converged);
        let g =
            estimate_d1_growth(&ProjectiveEndo::identity(2), 4, 1e-6, DEFAULT_MAX_TERMS).unwrap();
        assert_eq!(g.d1_estimate, 1.0);
        let cat = DynMap::Monomial(MonomialMap::from_ints(&[vec![2, 1], vec![1, 1]]));
        let g = estimate_d1_growth(&cat.homogenize().unwrap(), 8, 1e-6, DEFAULT_MAX_TERMS).unwrap();
        assert!((g.d1_estimate - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-3);
        assert!(estimate_d1_growth(&squaring_p2(), 2, 1e-6, DEFAULT_MAX_TERMS).is_err());
    }

    #[test]
    fn spectral_examples() {
        let d = monomial_dyn_degrees(&MonomialMap::from_ints(&[vec![2, 0], vec![0, 2]]));
        assert_eq!(d.values, vec![Some(2.0), Some(4.0)]);
        assert_eq!(d.method, DegreeMethod::ExactSpectral);
        let d = monomial_dyn_degrees(&MonomialMap::from_ints(&[vec![1, 1], vec![0, 1]]));
        assert_eq!(d.values, vec![Some(1.0), Some(1.0)]);
        let d = monomial_dyn_degrees(&MonomialMap::from_ints(&[vec![2, 1], vec![1, 1]]));
        assert!((d.d1() - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
        assert_eq!(d.d(2), Some(1.0));
        let d = monomial_dyn_degrees(&MonomialMap::from_ints(&[
            vec![2, 0, 0],
            vec![0, 3, 0],
            vec![0, 0, 5],
        ]));
        assert_eq!(d.values, vec![Some(5.0), Some(15.0), Some(30.0)]);
    }

    #[test]
    fn triangular_degrees() {
        let t = DynMap::Triangular(TriangularMap::parse(&["x", "y"], &["x^2", "y^2 + x"]).unwrap());
        let d = dyn_degrees(&t, 5, 1e-6).unwrap();
        assert_eq!(d.values, vec![Some(2.0), Some(4.0)]);
    }

    #[test]
    fn arith_degree_examples() {
        let sq = DynMap::Monomial(MonomialMap::from_ints(&[vec![2, 0], vec![0, 2]]));
        let e = estimate_arith_degree(
            &sq,
            &Point::Affine(AffinePoint::from_ints(&[2, 3])),
            12,
            1_000_000,
        )
        .unwrap();
        assert!((e.alpha_hat - 2.0).abs() < 0.1);
        assert!(e.window.0 <= e.alpha_hat && e.alpha_hat <= e.window.1);
        for (n, r) in e.root_seq.iter().enumerate() {
            let k = (n + 1) as f64;
            let want = (2f64.powf(k) * 3f64.ln()).powf(1.0 / k);
            assert!((r - want).abs() < 1e-9, "{n}: {r} vs {want}");
            assert!(*r >= 1.0);
        }
        let e = estimate_arith_degree(
            &sq,
            &Point::Affine(AffinePoint::from_ints(&[1, 1])),
            12,
            1_000_000,
        )
        .unwrap();
        assert_eq!(e.alpha_hat, 1.0);
        let e = estimate_arith_degree(
            &sq,
            &Point::Affine(AffinePoint::from_ints(&[1, 3])),
            12,
            1_000_000,
        )
        .unwrap();
        assert!((e.alpha_hat - 2.0).abs() < 0.1);
        let err = estimate_arith_degree(
            &sq,
            &Point::Affine(AffinePoint::from_ints(&[0, 3])),
            12,
            1_000_000,
        );
        assert_eq!(
            err.unwrap_err(),
            DegreeError::OrbitTooShort { valid_steps: 0 }
        );
    }

    #[test]
    fn ksc_examples() {
        let p = KscParams::default();
        let sq = DynMap::Monomial(MonomialMap::from_ints(&[vec![2, 0], vec![0, 2]]));
        let r = ksc_report(&sq, &Point::Affine(AffinePoint::from_ints(&[2, 3])), &p).unwrap();
        assert_eq!(r.d1, 2.0);
        assert!(r.gap.abs() < 0.1 && !r.violation);
        assert!(matches!(
            r.density.outcome,
            density::DensityOutcome::NoRelationUpTo { d_max: 3 }
        ));
        let cat = DynMap::Monomial(MonomialMap::from_ints(&[vec![2, 1], vec![1, 1]]));
        let r = ksc_report(&cat, &Point::Affine(AffinePoint::from_ints(&[2, 3])), &p).unwrap();
        assert!((r.alpha_hat - 2.618).abs() < 0.1);
        let id = DynMap::Monomial(MonomialMap::identity(2));
        let r = ksc_report(&id, &Point::Affine(AffinePoint::from_ints(&[5, 7])), &p).unwrap();
        assert_eq!((r.alpha_hat, r.d1, r.gap), (1.0, 1.0, 0.0));
    }

    #[test]
    fn csv_format() {
        assert_eq!(fmt_sig12(2.0), "2");
        assert_eq!(fmt_sig12(1.0986122886681098), "1.09861228867");
        assert_eq!(fmt_sig12(4_500.123_456_789_123), "4500.12345679");
        assert_eq!(fmt_sig12(1.5e20), "1.50000000000e20");
        let sq = DynMap::Monomial(MonomialMap::from_ints(&[vec![2, 0], vec![0, 2]]));
        let e = estimate_arith_degree(
            &sq,
            &Point::Affine(AffinePoint::from_ints(&[2, 3])),
            4,
            1_000_000,
        )
        .unwrap();
        let csv = trace_csv(&e);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1], "0,1.09861228867,1.09861228867,,2");
        assert!(lines[5].ends_with(','));
    }
}
