//! Benchmarks for the correlation backends live in `benches/`.
