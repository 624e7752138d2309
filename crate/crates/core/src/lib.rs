//! Presentations of merge trees and multiparameter persistence modules, the
//! p-presentation cost between compatible presentations, p-Wasserstein
//! distance between barcodes, and the reduction gadgets built from balanced
//! partition and constrained invertibility instances.

pub mod assignment;
pub mod barcode;
pub mod cost;
pub mod error;
pub mod field;
pub mod gadgets;
pub mod matching;
pub mod merge_tree;
pub mod ordered;
pub mod pipeline;
pub mod rational;
pub mod report;
pub mod solvers;
pub mod two_param;
mod union_find;

pub use barcode::{Barcode, Death, Interval};
pub use cost::{Cost, Exponent};
pub use error::{Error, Result};
pub use field::{FieldMatrix, FieldVector, Modulus};
pub use merge_tree::MergeTreePresentation;
pub use two_param::{Grade2, TwoParamPresentation};
