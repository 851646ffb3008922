//! Fractal interpolation surfaces over triangular domains.
//!
//! The crate builds two families of self-affine interpolation surfaces over
//! the equilateral triangle — an N²-map "wedding cake" family and a 4-map
//! family with rotational orthogonal parts — and provides the machinery to
//! analyze them: attractor sampling and meshing, affinity/box dimension
//! estimators, the induced planar similarity system with its invariant
//! regions and overlap certificates, a 1D common-fixed-point symbolic layer,
//! and the exact order-12 matrix group with its induced Markov chain and
//! graph-directed system.

pub mod attractor;
pub mod cfs;
pub mod dimension;
pub mod furstenberg;
pub mod geometry;
pub mod markov;
pub mod report;
pub mod surface;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use geometry::{Affine2, Affine3, ConvexPolygon, DihedralScalar, Mat2, Mat3, Vec2, Vec3};
pub use surface::{Construction, SurfaceConfig, SurfaceIfs};
