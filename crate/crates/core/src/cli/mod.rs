//! Command-line surface of the `gmew` binary.

pub mod commands;
pub mod descriptor;
pub mod io;
pub mod reproduce;
pub mod verify;

pub use commands::{run, Cli, Command, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
pub use descriptor::{parse_descriptor, Descriptor};
pub use reproduce::{reproduce, Figure, ReproduceConfig};
