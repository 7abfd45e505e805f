//! Criterion benchmarks for `salem-core`; see `benches/census.rs`.
