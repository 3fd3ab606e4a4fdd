#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod collision;
pub mod cross_section;
pub mod error;
pub mod moments;
pub mod quadrature;
pub mod slab;
pub mod special;

pub use error::{Error, Result};
