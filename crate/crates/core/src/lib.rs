pub mod cli;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod io;
pub mod localization;
pub mod signal;

pub use error::{Error, Result};
