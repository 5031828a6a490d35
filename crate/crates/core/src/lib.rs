pub mod error;
pub mod cli;
pub mod estimation;
pub mod linalg;
pub mod lm;
pub mod locc;
pub mod metrology;
pub mod scenarios;
pub mod zerodiag;

pub use error::{Error, Result};
