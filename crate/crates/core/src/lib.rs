//! Computational coarse geometry on finite graph metrics.
//!
//! Graphs with positive rational edge weights induce finite metric spaces
//! ([`metric`]). On top of those the crate measures Gromov hyperbolicity
//! ([`hyperbolicity`]), verifies and tames quasigeodesics
//! ([`quasigeodesic`]), and runs the constructions relating
//! quasigeodesic subspaces to hyperbolicity ([`subspaces`]): splicing two
//! quasigeodesics through a common point, and the four-segment triangle
//! experiment. [`families`] provides seeded graph generators and [`io`] the
//! text and JSON formats.
//!
//! All distances are exact rationals. Internally a space keeps its table as
//! integers over a common denominator so the hot loops stay in `i64`.

pub mod error;
pub mod families;
pub mod hyperbolicity;
pub mod io;
pub mod metric;
pub mod quasigeodesic;
pub mod rational;
pub mod subspaces;

pub use error::{Error, Result};
pub use hyperbolicity::{HyperbolicityReport, Method};
pub use metric::{FiniteMetricSpace, GeodesicSpace, Graph, VertexPath};
pub use quasigeodesic::{MorseEstimate, ParamPath, QGParams, QgVerdict};
pub use rational::Rational;
pub use subspaces::{SpliceWitness, Subspace, TriangleExperimentRecord};
