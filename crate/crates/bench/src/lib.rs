//! Benchmarks for the orbifold kernels live in `benches/`.
