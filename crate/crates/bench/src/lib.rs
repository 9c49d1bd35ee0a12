//! Shared fixtures for the criterion benchmarks.

use scalemix::experiments::bench::bench_instance;
use scalemix::{RngStream, StructuredGaussian};

/// The benchmark instance for `(n, p)`, identical across runs.
pub fn instance(n: usize, p: usize) -> StructuredGaussian {
    let mut rng = RngStream::new(0x5ca1e, (n as u64) << 32 | p as u64);
    bench_instance(n, p, &mut rng).expect("valid benchmark instance")
}
