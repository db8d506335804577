//! Plumbing around the market crates: a JSON instance format with exact
//! rationals, generators for the worked markets, exhaustive oracles, a batch
//! check runner and the `marketgraph` command line.

pub mod cli;
pub mod format;
pub mod generators;
pub mod oracle;
pub mod suite;
pub mod table;

pub use format::{load, save, BipartitePayload, BundlingPayload, InstanceFile, Kind, Metadata, Payload, ThreeSidedPayload, Q};
pub use generators::{generate, GENERATOR_IDS};
pub use marketgraph_core::Error;
pub use oracle::{oracle, Limits, OracleKind, OracleReport};
pub use suite::{evaluate, run_suite, Check, InstanceRef, Observed, SuiteConfig, SuiteRow};
pub use table::{Cell, Format, Table};
