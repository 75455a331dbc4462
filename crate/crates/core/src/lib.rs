//! Hilbert geometry on strictly convex projective domains.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod error;
pub mod intersection;
pub mod metric;
pub mod projective;
pub mod rigidity;
pub mod surface;
pub mod word;

pub use error::{ErrorClass, GeometryError, Result};
