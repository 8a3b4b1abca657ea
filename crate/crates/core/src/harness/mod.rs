//! Instance generation, files, query sampling and experiment runs.

pub mod experiments;
pub mod gen;
pub mod io;
pub mod queries;

pub use experiments::{run_experiments, Algorithm, AlgorithmSummary, ExperimentConfig, ExperimentReport, ReportRow};
pub use gen::{generate, GenSpec, NetworkKind};
pub use io::{read_network, read_queries, write_network, write_queries, QueryRecord};
pub use queries::{bucket_queries, BucketOptions, DEFAULT_BUCKETS};
