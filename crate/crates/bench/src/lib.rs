//! Criterion benchmarks for `titsweyl`; see `benches/spectra.rs`.

/// Models timed by the benchmarks.
pub const MODELS: &[&str] = &["sl:2", "sl:3", "sl:4", "gl:3", "sp:4", "psl2-adj"];
