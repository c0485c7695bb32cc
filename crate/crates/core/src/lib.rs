pub mod circuit;
pub mod error;
pub mod eval;
pub mod harness;
pub mod model;
pub mod optim;
pub mod qsim;
pub mod textfeat;

pub use error::{Error, Result};
