pub mod basis;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod reference;
pub mod solver;
pub mod transform;
pub mod viscosity;

pub use basis::BasisSpec;
pub use error::{Error, Result};
pub use transform::CoeffVec;
