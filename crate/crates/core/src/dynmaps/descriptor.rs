use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::point::{parse_rational, rat_to_string};
use super::{DynMap, MapError, MonomialMap, ProjectiveEndo, TriangularMap};
use crate::linalg::IntMatrix;

/// JSON form of a map.
///
/// ```json
/// {"type":"monomial","matrix":[[2,0],[0,2]],"coeff":["1","1"]}
/// {"type":"triangular","vars":["x1","x2"],"polys":["x1^2","x1*x2 + 1"]}
/// {"type":"projective","dim":2,"coords":["X0^2","X1^2","X2^2"]}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapDescriptor {
    Monomial {
        matrix: Vec<Vec<i64>>,
        #[serde(default)]
        coeff: Vec<String>,
    },
    Triangular {
        vars: Vec<String>,
        polys: Vec<String>,
    },
    Projective {
        dim: usize,
        coords: Vec<String>,
    },
}

impl MapDescriptor {
    /// Builds the map; structural problems (shape, syntax, homogeneity) are
    /// errors, invariant violations are left to `validate_map`.
    pub fn build(&self) -> Result<DynMap, MapError> {
        match self {
            MapDescriptor::Monomial { matrix, coeff } => {
                let n = matrix.len();
                if n == 0 || matrix.iter().any(|r| r.len() != n) {
                    return Err(MapError::Invalid("matrix is not square".into()));
                }
                let c = if coeff.is_empty() {
                    vec![BigRational::one(); n]
                } else {
                    coeff
                        .iter()
                        .map(|s| parse_rational(s))
                        .collect::<Result<_, _>>()?
                };
                Ok(DynMap::Monomial(MonomialMap::new(
                    IntMatrix::from_rows(matrix),
                    c,
                )?))
            }
            MapDescriptor::Triangular { vars, polys } => {
                let v: Vec<&str> = vars.iter().map(String::as_str).collect();
                let p: Vec<&str> = polys.iter().map(String::as_str).collect();
                Ok(DynMap::Triangular(TriangularMap::parse(&v, &p)?))
            }
            MapDescriptor::Projective { dim, coords } => {
                if coords.len() != dim + 1 {
                    return Err(MapError::DimensionMismatch {
                        expected: dim + 1,
                        got: coords.len(),
                    });
                }
                let c: Vec<&str> = coords.iter().map(String::as_str).collect();
                Ok(DynMap::Projective(ProjectiveEndo::parse(&c)?))
            }
        }
    }

    /// Panics if a monomial exponent leaves the `i64` range.
    pub fn from_map(f: &DynMap) -> MapDescriptor {
        match f {
            DynMap::Monomial(m) => MapDescriptor::Monomial {
                matrix: m.matrix().to_i64_rows().expect("matrix entries fit i64"),
                coeff: m.coeff().iter().map(rat_to_string).collect(),
            },
            DynMap::Triangular(t) => MapDescriptor::Triangular {
                vars: t.vars().to_vec(),
                polys: t
                    .components()
                    .iter()
                    .map(|c| c.to_expr_string(t.vars()))
                    .collect(),
            },
            DynMap::Projective(p) => MapDescriptor::Projective {
                dim: p.dim(),
                coords: p.to_strings(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        for js in [
            r#"{"type":"monomial","matrix":[[2,0],[0,2]],"coeff":["1","1"]}"#,
            r#"{"type":"triangular","vars":["x1","x2"],"polys":["x1^2","x1*x2 + 1"]}"#,
            r#"{"type":"projective","dim":2,"coords":["X0^2","X1^2","X2^2"]}"#,
        ] {
            let d: MapDescriptor = serde_json::from_str(js).unwrap();
            let f = d.build().unwrap();
            assert_eq!(f.descriptor(), d);
            assert_eq!(serde_json::to_string(&d).unwrap(), js);
        }
    }

    #[test]
    fn structural_errors() {
        let d: MapDescriptor =
            serde_json::from_str(r#"{"type":"monomial","matrix":[[1,2]]}"#).unwrap();
        assert!(d.build().is_err());
        let d: MapDescriptor =
            serde_json::from_str(r#"{"type":"projective","dim":1,"coords":["X0^2","X1"]}"#)
                .unwrap();
        assert!(d.build().is_err());
        let d: MapDescriptor =
            serde_json::from_str(r#"{"type":"triangular","vars":["x"],"polys":["z"]}"#).unwrap();
        assert!(matches!(d.build(), Err(MapError::Parse(_))));
    }
}
