//! Benchmarks for `tropstat`; see `benches/core.rs`.
