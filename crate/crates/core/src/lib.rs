//! Exact arithmetic dynamics at desk scale: concrete self-maps, Weil
//! heights, dynamical and arithmetic degrees, torus endomorphisms and orbit
//! density probes.

pub mod arith;
pub mod degrees;
pub mod density;
pub mod dynmaps;
pub mod heights;
pub mod linalg;
pub mod poly;
pub mod torus;
