//! Benchmark-only crate; see `benches/kernels.rs`.

use fcc_core::model::CircuitParams;

/// The reference parameter set used across the benchmarks.
pub fn reference_params() -> CircuitParams {
    CircuitParams {
        r: 1.0,
        l: 0.25e-3,
        c: 100e-6,
        vdc: 100.0,
        t: 1200e-6,
    }
}
