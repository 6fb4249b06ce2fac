//! Shared fixtures for the criterion benches.

use gmmcodec::harness::{generate_workload, Workload, WorkloadSpec};
use gmmcodec::{ApproximatorKind, SymbolAlphabet};

/// Workload of `symbols` symbols over a centered alphabet of `size`.
pub fn workload(
    symbols: usize,
    size: u32,
    k: usize,
    kind: ApproximatorKind,
) -> (WorkloadSpec, Workload) {
    let spec = WorkloadSpec {
        symbol_count: symbols,
        k,
        alphabet: SymbolAlphabet::centered(size, 16).expect("bench alphabet"),
        kind,
        seed: 42,
        chunk: 0,
    };
    let work = generate_workload(&spec).expect("bench workload");
    (spec, work)
}
