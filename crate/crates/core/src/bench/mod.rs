//! Benchmark harness: instance files, generation, the brute-force oracle,
//! the gap metric and batch experiments.

pub mod generate;
pub mod io;
pub mod manifest;
pub mod oracle;
pub mod report;

pub use generate::{generate_instance, GeneratorConfig, Structure};
pub use io::{load_instance, parse_instance, write_instance, ReferenceTable};
pub use manifest::BatchManifest;
pub use oracle::brute_force_optimum;
pub use report::{gap, run_batch, BatchReport, RunRecord};
