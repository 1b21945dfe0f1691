//! Benchmark helpers; the benchmarks live under `benches/`.

pub use muloc_core;
