//! Criterion benchmarks only; see `benches/pennant.rs`.
