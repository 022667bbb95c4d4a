pub mod algebra;
pub mod engine;
pub mod error;
pub mod measure;
pub mod scalar;
pub mod stepfn;
pub mod targets;
pub mod verify;

pub use error::{Error, Result};
