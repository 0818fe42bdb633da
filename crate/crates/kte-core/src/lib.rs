//! Hopf-Lax infimum-convolution operators, Legendre transforms and Young
//! functions of convex costs, Luxemburg/Orlicz pseudo-norms, dual Sobolev
//! norms, exact discrete optimal transport, and end-to-end verification of
//! transport-energy bounds on grid-discretized measures.

#![forbid(unsafe_code)]

pub mod bvp;
pub mod cost;
pub mod error;
pub mod expr;
pub mod grid;
pub mod harness;
pub mod hopflax;
pub mod measure;
pub mod numerics;
pub mod orlicz;
pub mod reference;
pub mod sobolev;
pub mod transport;

pub use cost::{gamma, ConjugateSpec, CostKind, CostSpec, Delta2Report, Norm, YoungProfile};
pub use error::{Error, Result};
pub use grid::{Axis, GridField, GridGeometry, GridVectorField};
pub use measure::{DiscreteMeasure, VectorSample};
