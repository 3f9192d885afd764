//! Manifold definition files, command implementations and report
//! rendering behind the `paracontact` binary.

pub mod battery;
pub mod commands;
pub mod document;
pub mod manifest;

pub use commands::{CliError, SolitonArgs};
pub use document::{Format, ReportDocument};
pub use manifest::{load, parse_manifold, print_manifold, LoadError, Manifold};
