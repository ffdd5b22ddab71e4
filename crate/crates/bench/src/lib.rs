//! Benchmarks live in `benches/`; run them with `cargo bench -p ar1-bench`.
