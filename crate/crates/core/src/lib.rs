//! Divided powers, flag modules and Crabb–Hubbuck morphisms over finite
//! fields, with exact rank checks of the embedding criterion.

pub mod chmorph;
pub mod error;
pub mod field;
pub mod flags;
pub mod gamma;
pub mod harness;
pub mod linalg;

pub use chmorph::{CriterionReport, SeqS};
pub use error::{Error, Result};
pub use field::{FieldSpec, Gf};
pub use flags::FlagCanonical;
pub use linalg::MatrixFq;
