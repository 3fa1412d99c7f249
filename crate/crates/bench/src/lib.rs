//! Benchmarks only; see `benches/kinetics.rs`. Run with `cargo bench -p ckm-bench`.
