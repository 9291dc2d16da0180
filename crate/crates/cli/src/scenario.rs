//! Scenario files: a map, start points, parameters and the analyses to run.

use std::collections::BTreeSet;

use orbitlab_core::dynmaps::{validate_map, DynMap, MapDescriptor, Point, ProjectivePoint};
use orbitlab_core::torus::is_prime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario: {0}")]
    Io(String),
    #[error("{0}")]
    Validation(String),
}

impl ScenarioError {
    fn invalid(msg: impl Into<String>) -> Self {
        ScenarioError::Validation(msg.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Orbit,
    Degrees,
    Alpha,
    Density,
    Torus,
    Padic,
    Zdo,
    Ksc,
}

impl Analysis {
    /// Runs once per start point rather than once per map.
    pub fn per_start(self) -> bool {
        !matches!(self, Analysis::Degrees | Analysis::Torus)
    }
}

fn default_n_max() -> usize {
    12
}
fn default_budget() -> u64 {
    1_000_000
}
fn default_d_max() -> usize {
    3
}
fn default_tol() -> f64 {
    1e-6
}
fn default_p() -> u64 {
    3
}
fn default_padic_steps() -> u32 {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_budget")]
    pub height_budget_bits: u64,
    #[serde(default = "default_d_max", alias = "D_max")]
    pub d_max: usize,
    #[serde(default, alias = "ℓ_max")]
    pub l_max: Option<u64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_p")]
    pub p: u64,
    #[serde(default = "default_padic_steps")]
    pub padic_steps: u32,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            n_max: default_n_max(),
            height_budget_bits: default_budget(),
            d_max: default_d_max(),
            l_max: None,
            tol: default_tol(),
            p: default_p(),
            padic_steps: default_padic_steps(),
        }
    }
}

/// ```json
/// {"name": "squaring", "map": {"type": "monomial", "matrix": [[2,0],[0,2]]},
///  "starts": [["2","3"]], "analyses": ["alpha", "degrees"]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub map: MapDescriptor,
    #[serde(default)]
    pub starts: Vec<Point>,
    #[serde(default)]
    pub params: Params,
    pub analyses: BTreeSet<Analysis>,
}

/// A scenario that passed validation, with its map built.
#[derive(Debug, Clone)]
pub struct Validated {
    pub scenario: Scenario,
    pub map: DynMap,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text)
            .map_err(|e| ScenarioError::invalid(format!("malformed scenario: {e}")))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(mut self) -> Result<Validated, ScenarioError> {
        let map = self
            .map
            .build()
            .map_err(|e| ScenarioError::invalid(e.to_string()))?;
        let problems = validate_map(&map);
        if !problems.is_empty() {
            return Err(ScenarioError::invalid(problems.join("; ")));
        }
        let p = &self.params;
        if p.n_max == 0 || p.height_budget_bits == 0 || p.d_max == 0 || p.padic_steps == 0 {
            return Err(ScenarioError::invalid("params must be positive"));
        }
        if p.l_max == Some(0) {
            return Err(ScenarioError::invalid("l_max must be positive"));
        }
        if !(p.tol > 0.0 && p.tol.is_finite()) {
            return Err(ScenarioError::invalid("tol must be positive"));
        }
        if self.analyses.is_empty() {
            return Err(ScenarioError::invalid("no analyses requested"));
        }
        if self.analyses.contains(&Analysis::Padic) && (!is_prime(p.p) || p.p == 2) {
            return Err(ScenarioError::invalid(format!(
                "p = {} is not an odd prime",
                p.p
            )));
        }
        if self.analyses.contains(&Analysis::Torus) && !matches!(map, DynMap::Monomial(_)) {
            return Err(ScenarioError::invalid(
                "torus analysis requires a monomial map",
            ));
        }
        if self.analyses.iter().any(|a| a.per_start()) && self.starts.is_empty() {
            return Err(ScenarioError::invalid(
                "requested analyses need at least one start point",
            ));
        }
        if matches!(map, DynMap::Projective(_)) {
            for (i, x) in self.starts.iter_mut().enumerate() {
                *x = as_projective(x)
                    .map_err(|e| ScenarioError::invalid(format!("start {i}: {e}")))?;
            }
        }
        for (i, x) in self.starts.iter().enumerate() {
            let ok = match (&map, x) {
                (DynMap::Projective(f), Point::Projective(q)) => q.dim() == f.dim(),
                (DynMap::Projective(_), _) | (_, Point::Projective(_)) => {
                    return Err(ScenarioError::invalid(format!(
                        "start {i}: point kind does not match the {} map",
                        map.family()
                    )));
                }
                (_, Point::Affine(a)) => a.dim() == map.dim(),
            };
            if !ok {
                return Err(ScenarioError::invalid(format!(
                    "start {i}: dimension does not match the map (dimension {})",
                    map.dim()
                )));
            }
        }
        Ok(Validated {
            scenario: self,
            map,
        })
    }
}

/// Start points are parsed as affine first; under a projective map an
/// all-integer point is read as homogeneous coordinates instead.
fn as_projective(x: &Point) -> Result<Point, String> {
    match x {
        Point::Projective(_) => Ok(x.clone()),
        Point::Affine(a) => {
            if !a.coords().iter().all(|c| c.is_integer()) {
                return Err("projective coordinates must be integers".into());
            }
            let ints = a.coords().iter().map(|c| c.to_integer()).collect();
            ProjectivePoint::new(ints)
                .map(Point::Projective)
                .map_err(|e| e.to_string())
        }
    }
}
