//! Shared fixtures for the benchmark targets.

use mdlearn::{make_random_agnostic, MDLInstance};

/// Mid-size agnostic instance: 16 hypotheses, 6 distributions, 8 features.
pub fn bench_instance() -> MDLInstance {
    make_random_agnostic(16, 6, 8, 42).expect("bench instance")
}
