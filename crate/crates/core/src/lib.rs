//! Stiffness of wrinkled composite laminates and reduction of full-field
//! deflection measurements.
//!
//! The crate covers four pieces of work:
//!
//! - [`material`], [`geometry`] and [`rotation`]: ply stiffness from
//!   engineering constants, the wrinkle shape and the rotation of ply
//!   stiffness into global axes.
//! - [`homogenization`]: two-stage averaging of a wrinkled laminate, first
//!   through the thickness of each strip and then along the wrinkle.
//! - [`shearography`] and [`fpp`]: turning phase maps and point clouds into
//!   out-of-plane displacement fields.
//! - [`compare`] and [`io`]: error tables and file formats.

// `!(a > b)` is used on purpose to reject NaN along with the failing case.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compare;
pub mod error;
pub mod fpp;
pub mod geometry;
pub mod homogenization;
pub mod io;
pub mod material;
pub mod rotation;
pub mod shearography;

pub use error::{Error, ErrorKind, Result};
