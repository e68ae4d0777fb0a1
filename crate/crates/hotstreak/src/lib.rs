//! Shot-log ingestion, report serialization and parallel batch execution
//! for [`hotstreak_core`].

pub mod output;
pub mod parallel;
pub mod report;
pub mod shotlog;

pub use hotstreak_core as core;
