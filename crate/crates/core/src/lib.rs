//! Numerical laboratory for conformal Cantor sets in the complex plane.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`], [`disk`], [`system`], [`word`]: conformal Cantor systems, their
//!   inverse branches and depth-n covers;
//! * [`limit`]: configurations, renormalization and limit geometries;
//! * [`intersect`]: cover-based intersection tests and stable-intersection probes;
//! * [`kronecker`]: density of `z^m w^n` and exponent-pair search;
//! * [`unfolding`]: the model unfolding of a quadratic tangency and density scans.

pub mod catalog;
pub mod disk;
pub mod error;
pub mod expr;
pub mod intersect;
pub mod kronecker;
pub mod limit;
pub mod render;
pub mod system;
pub mod unfolding;
pub mod word;

pub use disk::Disk;
pub use error::{Error, Result};
pub use expr::MapExpr;
pub use num_complex::Complex64;
pub use system::{CantorSystem, Letter, TransitionSet};
pub use word::{TailSequence, Word};
