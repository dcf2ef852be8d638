//! Standard-library side of the semantic link simulator: scenario files,
//! report formats and parallel sweeps on top of [`semcom_core`].

pub mod config;
pub mod parallel;
pub mod report;

pub use semcom_core;
