#[cfg(feature = "cli")]
pub mod cli;
pub mod convex;
pub mod entropy;
pub mod error;
pub mod extmath;
pub mod grid;
pub mod legendre;
pub mod measures;
pub mod pressure;
pub mod verify;

pub use error::{Error, Result};
pub use extmath::ExtReal;
