//! Shared fixtures for the criterion benchmarks.

use boundeffred::signal::{add_noise, ahm_extended, AhmParams, Signal};

/// Noisy modulated two-component signal at the benchmark configuration.
pub fn benchmark_signal(n: usize, seed: u64) -> Signal {
    let params = AhmParams::benchmark();
    let clean = ahm_extended(&params, n).expect("valid parameters");
    add_noise(&clean, 1e-2, seed).expect("valid sigma")
}
