pub mod cli;
pub mod error;
pub mod gasdyn;
pub mod liealg;
pub mod linalg;
pub mod prolong;
pub mod report;
pub mod suite;
pub mod numerics;
pub mod symkernel;
pub mod transforms;

pub use error::{Error, Result};
