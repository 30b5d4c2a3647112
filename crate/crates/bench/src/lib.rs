//! Criterion benchmarks for crforge; see `benches/`.
