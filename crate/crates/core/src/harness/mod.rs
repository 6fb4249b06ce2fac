//! Workload synthesis, benchmarking and approximation-accuracy scans.

pub mod accuracy;
pub mod bench;
pub mod workload;

pub use bench::{run_bench, BenchOptions, BenchReport, Codec, CodecReport};
pub use workload::{generate_gsm_workload, generate_workload, GsmWorkload, Workload, WorkloadSpec};
