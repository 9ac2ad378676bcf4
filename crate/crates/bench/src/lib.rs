//! Criterion benchmarks for the pptsep pipeline live in `benches/`.
