//! Numerical workbench for accretivity and form boundedness of second-order
//! operators with rough complex coefficients on periodic boxes.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod certificates;
pub mod discrete;
pub mod eigen;
pub mod error;
pub mod field;
pub mod hodge;
pub mod profiles;
pub mod reduction;
pub mod regnorms;
pub mod varforms;

pub use error::{Error, Result};
pub use field::{Grid, MatrixField, ScalarField, VectorField};
