//! Discrete conformal structures on ideally triangulated surfaces with boundary.
//!
//! Every face of the triangulation is a right-angled hyperbolic hexagon whose
//! three alternating sides are the edge lengths `l_ij`. A discrete conformal
//! structure assigns those lengths from per-boundary factors `f`, and the
//! generalized curvature `K_i` is the total boundary length at component `i`.
//!
//! Module map:
//! - [`lorentz`]: vector primitives of Minkowski space R^{2,1}.
//! - [`hexagon`]: embedded geometry of one hexagon (centers, signed distances, domains).
//! - [`conformal`]: the six edge-length families, coordinate changes, admissible spaces.
//! - [`mesh`]: triangulation data, the text mesh format, validation.
//! - [`curvature`]: angles, curvature map, analytic Jacobians.
//! - [`solver`]: damped Newton inversion of the curvature map and the energy.
//! - [`sampling`]: seeded samplers for faces, hexagons, meshes and admissible points.
//! - [`checks`]: sampled verification suites shared by the tests and the CLI.
//!
//! Face-level work runs through [`exec`], which uses rayon when the `parallel`
//! feature is enabled and always reduces in face order.

// Index loops mirror the matrix notation; negated comparisons reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod conformal;
pub mod curvature;
pub mod error;
pub mod exec;
pub mod hexagon;
pub mod lorentz;
pub mod mesh;
pub mod sampling;
pub mod solver;
pub mod tol;

pub use error::{Error, Result};
