pub mod approx;
pub mod cli;
pub mod conespec;
pub mod ecm;
pub mod error;
pub mod fixtures;
pub mod mueller;
pub mod numkernel;
pub mod stokes;

pub use error::{Error, Result};
