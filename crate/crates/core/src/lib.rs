//! Numerical geometry of oriented Grassmann manifolds: exterior algebra and
//! Plucker coordinates, Jordan angles and S-maps, convexity regions with
//! smoothed distance-type functions, graph submanifolds with their Gauss
//! maps, and minimal cones with rigidity checks.

pub mod cones;
pub mod error;
pub mod graph;
pub mod grassmann;
pub mod multivector;
pub mod numeric;
pub mod region;

pub use error::{GeoError, Result};
pub use grassmann::{GrassmannPoint, JordanData, MatrixChart, SOrthogonalPair};
pub use multivector::{MultiIndex, Multivector};
