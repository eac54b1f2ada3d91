pub mod applications;
pub mod bew;
pub mod cli;
pub mod error;
pub mod eval;
pub mod families;
pub mod graphstate;
pub mod lift;
pub mod tensorcore;

pub use error::{Error, Result};
