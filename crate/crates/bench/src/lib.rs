//! Criterion benchmarks for the pseudolap kernels; see `benches/kernels.rs`.
