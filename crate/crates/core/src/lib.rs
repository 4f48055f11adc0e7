//! Numerical analysis of conformal slant submersions from cosymplectic
//! manifolds.
//!
//! Manifolds, structure tensors and maps are given by expressions in a
//! coordinate chart ([`expr`], [`geometry`]). [`map_analysis`] decides
//! horizontal conformality and the slant angle pointwise, [`oneill`] builds
//! the O'Neill tensors and the second fundamental form of the map, and
//! [`theorems`] checks the structural identities and equivalences at sampled
//! points. [`cli`] drives all of it from JSON configurations.
//!
//! Numerical routines are generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix `f64`.

pub mod cli;
pub mod expr;
pub mod geometry;
pub mod linalg;
pub mod map_analysis;
pub mod oneill;
pub mod sampling;
pub mod scalar;
pub mod theorems;
pub mod verdict;

pub use expr::{parse, Expr};
pub use geometry::{AlmostContactStructure, ManifoldSpec, Pairing};
pub use map_analysis::{ConformalityReport, MapError, SlantClass, SlantReport, SmoothMapSpec};
pub use scalar::Real;
pub use theorems::Tolerances;
pub use verdict::{CheckVerdict, Status, Truth};

pub type PointData = map_analysis::PointData<f64>;
pub type FrameDecomposition = map_analysis::FrameDecomposition<f64>;
pub type SlantDecomposition = map_analysis::SlantDecomposition<f64>;
pub type Neighborhood = oneill::Neighborhood<f64>;
pub type ONeillSample = oneill::ONeillSample<f64>;
pub type SecondFundamentalSample = oneill::SecondFundamentalSample<f64>;
pub type Christoffel = geometry::Christoffel<f64>;
pub type Analysis<'m> = theorems::Analysis<'m, f64>;
pub type PointContext = theorems::PointContext<f64>;
