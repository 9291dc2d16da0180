//! Runs a validated scenario and assembles `report.json` plus CSV traces.

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use orbitlab_core::degrees::{
    arith_degree_from_heights, dyn_degrees, estimate_d1_growth, fmt_sig12, ksc_report, trace_csv,
    ArithDegreeEstimate, DegreeGrowth, DynDegrees, KscParams, KscReport, ALPHA_SLACK,
    GROWTH_ITERATES,
};
use orbitlab_core::density::{
    density_certificate, sdd_hypothesis_check, zdo_experiment, DensityReport, SddVerdict,
    ZdoParams, ZdoReport,
};
use orbitlab_core::dynmaps::AffinePoint;
use orbitlab_core::dynmaps::{
    iterate_orbit, rat_to_string, DynMap, MapDescriptor, OrbitStatus, Point,
};
use orbitlab_core::linalg::roots::spectral_radius;
use orbitlab_core::poly::DEFAULT_MAX_TERMS;
use orbitlab_core::torus::{
    fixed_point_count, invariant_monomials, invariant_subtori, padic_attraction_probe,
    restrict_to_subtorus, FixReport, InvariantFunctionReport, PAdicInt, Sublattice, SubtoriReport,
    Valuation,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::scenario::{Analysis, Params, Scenario, Validated};

/// Orbit points are written out only while their total size stays below this.
pub const POINT_BITS_CAP: u64 = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Error { error: String },
}

impl<T, E: ToString> From<Result<T, E>> for Outcome<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Outcome::Ok(v),
            Err(e) => Outcome::Error {
                error: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitSummary {
    pub start: Point,
    pub status: OrbitStatus,
    pub steps: usize,
    pub heights: Vec<f64>,
    pub height_bits: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Point>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreesResult {
    pub degrees: DynDegrees,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<DegreeGrowth>,
    pub sdd: SddVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Restriction {
    pub sublattice: Sublattice,
    pub map: Outcome<MapDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TorusResult {
    pub fixed_points: FixReport,
    pub invariant_monomials: InvariantFunctionReport,
    pub subtori: Outcome<SubtoriReport>,
    pub spectral_radius: f64,
    /// Restrictions to the subtori through the identity point.
    pub restrictions: Vec<Restriction>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PadicProbe {
    pub coordinate: usize,
    pub value: String,
    pub valuations: Outcome<Vec<Valuation>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit: Option<Vec<OrbitSummary>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Outcome<DegreesResult>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Outcome<ArithDegreeEstimate>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<DensityReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padic: Option<Vec<Vec<PadicProbe>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zdo: Option<ZdoReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ksc: Option<Vec<Outcome<KscReport>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    pub results: Results,
    pub flags: Vec<String>,
    pub version: String,
    pub timestamp: u64,
}

impl Report {
    pub fn has_contradiction(&self) -> bool {
        self.flags.iter().any(|f| f.starts_with(CONTRADICTION))
    }
}

pub const CONTRADICTION: &str = "contradiction";

/// A finished run: the report and the CSV traces keyed by file name.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub traces: Vec<(String, String)>,
}

impl RunOutput {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut json = serde_json::to_string_pretty(&self.report).expect("report serializes");
        json.push('\n');
        std::fs::write(dir.join("report.json"), json)?;
        for (name, body) in &self.traces {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

pub fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn ksc_params(p: &Params) -> KscParams {
    KscParams {
        n_max: p.n_max,
        budget_bits: p.height_budget_bits,
        d_max: p.d_max,
        growth_n: GROWTH_ITERATES,
        tol: p.tol,
    }
}

struct PerStart {
    orbit: OrbitSummary,
    alpha: Result<ArithDegreeEstimate, String>,
    density: Option<DensityReport>,
    ksc: Option<Result<KscReport, String>>,
    padic: Option<Vec<PadicProbe>>,
}

fn run_start(f: &DynMap, x: &Point, s: &Scenario) -> PerStart {
    let p = &s.params;
    let want = |a| s.analyses.contains(&a);
    let orbit = iterate_orbit(f, x, p.n_max, p.height_budget_bits);
    let alpha =
        arith_degree_from_heights(x.clone(), orbit.status, &orbit.heights, &orbit.height_bits)
            .map_err(|e| e.to_string());
    let density = want(Analysis::Density).then(|| density_certificate(&orbit, p.d_max));
    let ksc =
        want(Analysis::Ksc).then(|| ksc_report(f, x, &ksc_params(p)).map_err(|e| e.to_string()));
    let padic = want(Analysis::Padic).then(|| padic_probes(x, p));
    let total_bits: u64 = orbit.points.iter().map(Point::bits).sum();
    let summary = OrbitSummary {
        start: x.clone(),
        status: orbit.status,
        steps: orbit.points.len() - 1,
        heights: orbit.heights,
        height_bits: orbit.height_bits,
        points: (total_bits <= POINT_BITS_CAP).then_some(orbit.points),
    };
    PerStart {
        orbit: summary,
        alpha,
        density,
        ksc,
        padic,
    }
}

fn valuation(x: &BigInt, p: &BigInt) -> u32 {
    let mut x = x.clone();
    let mut v = 0;
    while !x.is_zero() && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// Probes each affine coordinate that lies in ℤ_p.
fn padic_probes(x: &Point, params: &Params) -> Vec<PadicProbe> {
    let Point::Affine(a) = x else { return vec![] };
    let pb = BigInt::from(params.p);
    a.coords()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (num, den) = (c.numer(), c.denom());
            let valuations = if den.is_multiple_of(&pb) {
                Outcome::Error {
                    error: format!("not in Z_{}", params.p),
                }
            } else {
                let diff = num - den;
                let v0 = if diff.is_zero() {
                    0
                } else {
                    valuation(&diff, &pb)
                };
                let k = v0 + params.padic_steps + 1;
                let m = num_traits::pow(pb.clone(), k as usize);
                let inv = den.modinv(&m).expect("denominator prime to p");
                PAdicInt::new(params.p, k, &(num * inv))
                    .and_then(|y| padic_attraction_probe(&y, params.padic_steps))
                    .into()
            };
            PadicProbe {
                coordinate: i,
                value: rat_to_string(c),
                valuations,
            }
        })
        .collect()
}

fn torus_result(
    f: &orbitlab_core::dynmaps::MonomialMap,
    p: &Params,
    flags: &mut Vec<String>,
) -> TorusResult {
    let rho = spectral_radius(&f.matrix().charpoly());
    let subtori = invariant_subtori(f);
    let ones = AffinePoint::new(vec![num_rational::BigRational::one(); f.dim()]);
    let mut restrictions = Vec::new();
    if let Ok(st) = &subtori {
        for l in &st.sublattices {
            let g = restrict_to_subtorus(f, l, &ones);
            let r = g
                .as_ref()
                .ok()
                .map(|g| spectral_radius(&g.matrix().charpoly()));
            if let Some(r) = r {
                if r > rho + 1e-9 {
                    flags.push(format!(
                        "{CONTRADICTION}: restriction to {:?} has spectral radius {} > {}",
                        l.basis(),
                        fmt_sig12(r),
                        fmt_sig12(rho)
                    ));
                }
            }
            restrictions.push(Restriction {
                sublattice: l.clone(),
                map: g
                    .map(|g| MapDescriptor::from_map(&DynMap::Monomial(g)))
                    .into(),
                spectral_radius: r,
            });
        }
    }
    TorusResult {
        fixed_points: fixed_point_count(f),
        invariant_monomials: invariant_monomials(f, p.l_max),
        subtori: subtori.into(),
        spectral_radius: rho,
        restrictions,
    }
}

fn growth_csv(g: &DegreeGrowth) -> String {
    let mut out = String::from("n,degree,ratio_estimate\n");
    for (i, d) in g.degs.iter().enumerate() {
        let ratio = if i == 0 {
            String::new()
        } else {
            fmt_sig12(g.ratio_estimates[i - 1])
        };
        out.push_str(&format!("{},{d},{ratio}\n", i + 1));
    }
    out
}

pub fn run_scenario(v: &Validated) -> RunOutput {
    let s = &v.scenario;
    let f = &v.map;
    let p = &s.params;
    let want = |a| s.analyses.contains(&a);
    let mut flags = Vec::new();
    let mut traces = Vec::new();
    let mut results = Results::default();

    let needs_d1 = want(Analysis::Degrees) || want(Analysis::Alpha);
    let dd = needs_d1.then(|| dyn_degrees(f, GROWTH_ITERATES, p.tol).map_err(|e| e.to_string()));

    if want(Analysis::Degrees) {
        let out = dd.clone().expect("computed").map(|d| {
            let growth = match f {
                DynMap::Monomial(_) => None,
                _ => f.homogenize().ok().and_then(|h| {
                    estimate_d1_growth(&h, GROWTH_ITERATES, p.tol, DEFAULT_MAX_TERMS).ok()
                }),
            };
            if let Some(g) = &growth {
                traces.push(("degree_growth.csv".to_string(), growth_csv(g)));
            }
            let sdd = sdd_hypothesis_check(&d, f.dim(), true);
            DegreesResult {
                degrees: d,
                growth,
                sdd,
            }
        });
        results.degrees = Some(out.into());
    }

    let per_start = s.analyses.iter().any(|a| {
        matches!(
            a,
            Analysis::Orbit | Analysis::Alpha | Analysis::Density | Analysis::Ksc | Analysis::Padic
        )
    });
    if per_start {
        let runs: Vec<PerStart> = s.starts.par_iter().map(|x| run_start(f, x, s)).collect();
        for (i, r) in runs.iter().enumerate() {
            if !r.orbit.status.is_completed() {
                flags.push(format!(
                    "note: orbit of start {i} stopped early: {:?}",
                    r.orbit.status
                ));
            }
        }
        if want(Analysis::Alpha) {
            let d1 = dd
                .as_ref()
                .and_then(|d| d.as_ref().ok())
                .map(DynDegrees::d1);
            for (i, r) in runs.iter().enumerate() {
                match (&r.alpha, d1) {
                    (Ok(e), Some(d1)) if e.alpha_hat > d1 + ALPHA_SLACK => flags.push(format!(
                        "{CONTRADICTION}: alpha: alpha_hat {} exceeds d1 {} + {ALPHA_SLACK} at start {i}",
                        fmt_sig12(e.alpha_hat),
                        fmt_sig12(d1)
                    )),
                    _ => {}
                }
                if let Ok(e) = &r.alpha {
                    traces.push((format!("alpha_{i}.csv"), trace_csv(e)));
                }
            }
            results.alpha = Some(runs.iter().map(|r| r.alpha.clone().into()).collect());
        }
        if want(Analysis::Density) {
            results.density = Some(
                runs.iter()
                    .map(|r| r.density.clone().expect("requested"))
                    .collect(),
            );
        }
        if want(Analysis::Ksc) {
            for (i, r) in runs.iter().enumerate() {
                if let Some(Ok(k)) = &r.ksc {
                    if k.violation {
                        flags.push(format!(
                            "{CONTRADICTION}: ksc: alpha_hat {} exceeds d1 {} + {ALPHA_SLACK} at start {i}",
                            fmt_sig12(k.alpha_hat),
                            fmt_sig12(k.d1)
                        ));
                    }
                }
            }
            results.ksc = Some(
                runs.iter()
                    .map(|r| r.ksc.clone().expect("requested").into())
                    .collect(),
            );
        }
        if want(Analysis::Padic) {
            results.padic = Some(
                runs.iter()
                    .map(|r| r.padic.clone().expect("requested"))
                    .collect(),
            );
        }
        if want(Analysis::Orbit) {
            results.orbit = Some(runs.into_iter().map(|r| r.orbit).collect());
        }
    }

    if want(Analysis::Torus) {
        if let DynMap::Monomial(m) = f {
            results.torus = Some(torus_result(m, p, &mut flags));
        }
    }

    if want(Analysis::Zdo) {
        let params = ZdoParams {
            ksc: ksc_params(p),
            l_max: p.l_max,
            smooth: true,
        };
        let z = zdo_experiment(f, &s.starts, &params);
        flags.extend(z.flags.iter().cloned());
        results.zdo = Some(z);
    }

    RunOutput {
        report: Report {
            scenario: s.clone(),
            results,
            flags,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: unix_time(),
        },
        traces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(js: &str) -> RunOutput {
        run_scenario(&Scenario::from_json(js).unwrap().validate().unwrap())
    }

    #[test]
    fn squaring_scenario() {
        let out = run(
            r#"{"map":{"type":"monomial","matrix":[[2,0],[0,2]]},"starts":[["2","3"]],
                "analyses":["alpha","degrees","density","ksc"]}"#,
        );
        let r = &out.report;
        let Some(Outcome::Ok(e)) = r.results.alpha.as_ref().map(|a| a[0].clone()) else {
            panic!()
        };
        assert!((e.alpha_hat - 2.0).abs() < 0.1);
        let Some(Outcome::Ok(d)) = &r.results.degrees else {
            panic!()
        };
        assert_eq!(d.degrees.d1(), 2.0);
        assert!(r.results.density.as_ref().unwrap()[0]
            .summary()
            .contains("no relation up to degree 3"));
        assert!(!r.has_contradiction());
        assert_eq!(out.traces[0].0, "alpha_0.csv");
    }

    #[test]
    fn identity_scenario() {
        let out = run(
            r#"{"map":{"type":"monomial","matrix":[[1,0],[0,1]]},"starts":[["5/7","3"]],"analyses":["alpha","degrees"]}"#,
        );
        let Some(Outcome::Ok(e)) = out.report.results.alpha.as_ref().map(|a| a[0].clone()) else {
            panic!()
        };
        assert_eq!(e.alpha_hat, 1.0);
        assert!(!out.report.has_contradiction());
    }

    #[test]
    fn padic_probe_on_rationals() {
        let out = run(
            r#"{"map":{"type":"monomial","matrix":[[3]]},"starts":[["4"],["7/2"],["1/3"]],"analyses":["padic"]}"#,
        );
        let pr = out.report.results.padic.unwrap();
        let exact = |v: &[u32]| v.iter().map(|&x| Valuation::Exact(x)).collect::<Vec<_>>();
        assert_eq!(pr[0][0].valuations, Outcome::Ok(exact(&[1, 2, 3, 4, 5, 6])));
        // 7/2 − 1 = 5/2 is a 3-adic unit
        assert!(matches!(pr[1][0].valuations, Outcome::Error { .. }));
        assert!(matches!(pr[2][0].valuations, Outcome::Error { .. }));
    }

    #[test]
    fn torus_scenario() {
        let out = run(r#"{"map":{"type":"monomial","matrix":[[0,1],[1,0]]},"analyses":["torus"]}"#);
        let t = out.report.results.torus.unwrap();
        assert!(t.invariant_monomials.found);
        assert_eq!(t.restrictions.len(), 2);
        assert!(t
            .restrictions
            .iter()
            .all(|r| r.spectral_radius == Some(1.0)));
    }
}
