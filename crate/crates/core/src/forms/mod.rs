//! Scalar exterior forms over jet coordinates and vector-valued forms.

mod scalar;
mod vector;

pub use scalar::{FieldAlong, ScalarForm};
pub use vector::{scalar_from_json, scalar_to_json, VectorForm};
pub(crate) use vector::{contract_dt, wedge_dt};
