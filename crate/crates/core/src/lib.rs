//! Geometry and numerics for two-sided bounds on the bottom of the spectrum
//! of minimal submanifolds in Euclidean and hyperbolic space forms.
//!
//! The crate is `no_std` with `alloc`. Enable `parallel` for rayon-backed
//! sweeps and `serde` for serializable reports.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bounds;
pub mod catalog;
pub mod error;
pub mod geometry;
pub mod growth;
pub mod numeric;
pub mod spaceform;
pub mod spectrum;

pub use error::{Error, Result};
pub use geometry::{ImmersedGeometry, Topology};
pub use spaceform::SpaceForm;

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
