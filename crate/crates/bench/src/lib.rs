//! Criterion benchmarks for `stacky-core`; see `benches/`.
