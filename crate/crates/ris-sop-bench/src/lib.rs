//! Criterion benchmarks for the SOP evaluators; see `benches/sop.rs`.
