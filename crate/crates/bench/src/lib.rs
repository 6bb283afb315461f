//! Criterion benchmarks for the reductions; see `benches/reductions.rs`.
//! Run with `cargo bench -p gridmso-bench`.
