//! Numerics for convex bodies whose boundaries carry infinitely flat points.
//!
//! Everything here is pure computation over `alloc`; file formats, the
//! command-line front end and parallel sweeps live in the `minkflat` crate.
#![no_std]
// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::excessive_precision)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boman;
pub mod bump;
pub mod cantor;
pub mod curve;
pub mod error;
pub mod experiment;
pub mod func;
pub mod hinge;
pub mod infconv;
pub mod jet;
pub mod quad;
pub mod rotate;

pub use error::{Error, Result};
pub use func::{Interval, SmoothFn};
pub use jet::Jet;
