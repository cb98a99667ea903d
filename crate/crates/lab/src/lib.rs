//! Command-line front end for `pp-stability-core`: config and flag parsing,
//! CSV/JSON artifacts written atomically with checksums, and parallel
//! sweep and batch drivers.

pub mod artifact;
pub mod cli;
pub mod parallel;
pub mod report;
pub mod run;
pub mod seed;

pub use artifact::{ArtifactKind, RunArtifact};
pub use cli::{parse, CliError, Command, Verb};
pub use run::{run, RunError};
