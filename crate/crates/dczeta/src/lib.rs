//! Double-coset zeta functions of groups acting on trees, computed from
//! finite local data: edge-weighted quotient graphs and local action
//! diagrams.
//!
//! The library provides
//! - Serre-style weighted graphs with paths, spanning structures and the
//!   multiplicative path weights counting geodesic lifts ([`graph`],
//!   [`weights`]);
//! - the zeta function `Z_{Γ,u→w}(s)` through its Bass-operator determinant
//!   formula, its Dirichlet coefficients, truncated series with dual
//!   evaluation, reciprocal and splitting formulas ([`zeta`], [`splitting`]);
//! - local action diagrams with their standard weight, the colour-space Bass
//!   operator, the (P)-closed coset zeta and the truncated standard Δ-tree
//!   ([`perm`], [`lad`]);
//! - unimodularity, the Euler–Poincaré characteristic, its identity with the
//!   zeta reciprocal at -1, and the weighted Ihara determinant ([`euler`]);
//! - exact rational / complex floating linear algebra, including exact
//!   evaluation of determinant ratios at removable singularities
//!   ([`linalg`], [`limits`]);
//! - seeded instance generators for the verification suites ([`instances`]).

pub mod euler;
pub mod graph;
pub mod instances;
pub mod lad;
pub mod limits;
pub mod linalg;
pub mod perm;
pub mod splitting;
pub mod weights;
pub mod zeta;

pub use graph::{Path, Site, WeightedGraph};
pub use lad::{Inversion, LocalActionDiagram, RootSite};
pub use linalg::Scalar;
pub use zeta::SArg;
