pub mod disk;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod report;
pub mod schwartz;
pub mod specfun;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
