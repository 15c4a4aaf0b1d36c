//! A verification laboratory for concentration inequalities of weakly
//! dependent random vectors.
//!
//! The crate computes Dobrushin interdependence matrices, checks
//! self-bounding witnesses by exhaustive enumeration, evaluates closed-form
//! moment generating function and tail bounds, and validates them against
//! exact laws and Monte Carlo simulation of four dependent models:
//!
//! - random subsets of a fixed point set (stochastic travelling salesman and
//!   minimum spanning tree functionals),
//! - the Curie-Weiss model with external field,
//! - exponential random graphs with edge and triangle statistics,
//! - sampling without replacement (convex distance inequality).
//!
//! Modules map onto the pieces of that pipeline:
//!
//! | module | contents |
//! |---|---|
//! | [`finite_dist`] | finite laws, total variation, the `(χ, B, C, D)` coupling |
//! | [`dobrushin`] | interdependence matrices, subset-law inhomogeneity |
//! | [`selfbounding`] | exhaustive self-bounding verification |
//! | [`bounds`] | mgf and tail bounds, `a_c`, application curves |
//! | [`models`] | Curie-Weiss, ERGM, weighted sampling, coupled Glauber chains |
//! | [`geometry`] | tours, Held-Karp, Hilbert ordering, MST |
//! | [`convexdist`] | Talagrand's convex distance via min-norm points |
//! | [`harness`] | experiment configs, Wilson intervals, reports |

#![forbid(unsafe_code)]

pub mod bounds;
pub mod convexdist;
pub mod dobrushin;
pub mod error;
pub mod finite_dist;
pub mod geometry;
pub mod harness;
pub mod models;
pub mod rng;
pub mod selfbounding;
pub mod space;

pub use error::{Error, Result};
