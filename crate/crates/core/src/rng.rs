//! Seedable random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed and positioned
//! on one of 2⁶⁴ independent streams, so per-chain and per-replicate streams
//! are derived from a single user seed without any shared state.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Open01, StandardNormal};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream on the same seed with a different stream id.
    pub fn substream(&self, stream_id: u64) -> Self {
        Self::new(self.seed, stream_id)
    }

    pub fn std_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn fill_std_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.inner.sample(StandardNormal);
        }
    }

    pub fn std_normal_vec(&mut self, k: usize) -> Vec<f64> {
        let mut v = vec![0.0; k];
        self.fill_std_normal(&mut v);
        v
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.sample(Open01)
    }

    pub fn gamma(&mut self, shape: f64, rate: f64) -> Result<f64> {
        if !(shape > 0.0 && shape.is_finite()) || !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma requires positive finite shape and rate, got shape={shape}, rate={rate}"
            )));
        }
        let dist = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::InvalidParameter(format!("gamma: {e}")))?;
        Ok(dist.sample(&mut self.inner))
    }

    pub fn exponential(&mut self, rate: f64) -> Result<f64> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponential requires a positive finite rate, got {rate}"
            )));
        }
        let dist = Exp::new(rate).map_err(|e| Error::InvalidParameter(format!("exponential: {e}")))?;
        Ok(dist.sample(&mut self.inner))
    }

    /// `k` distinct indices drawn uniformly from `0..n`, in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.inner, n, k).into_vec()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
        }
        d
    }

    #[test]
    fn std_normal_moments() {
        let mut rng = RngStream::new(1, 0);
        let x = rng.std_normal_vec(100_000);
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.013, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn gamma_shape_one_is_exponential() {
        let mut a = RngStream::new(2, 0);
        let mut b = RngStream::new(2, 1);
        let g: Vec<f64> = (0..100_000).map(|_| a.gamma(1.0, 2.0).unwrap()).collect();
        let e: Vec<f64> = (0..100_000).map(|_| b.exponential(2.0).unwrap()).collect();
        let d = ks_two_sample(g, e);
        assert!(d < 0.01, "KS distance {d}");
    }

    #[test]
    fn small_shape_gamma_mean() {
        let mut rng = RngStream::new(3, 0);
        let n = 100_000;
        let m = (0..n).map(|_| rng.gamma(0.5, 1.0).unwrap()).sum::<f64>() / n as f64;
        // sd of the mean: sqrt(0.5 / n)
        assert!((m - 0.5).abs() < 4.0 * (0.5f64 / n as f64).sqrt());
    }

    #[test]
    fn same_seed_and_stream_repeat() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 0);
        assert_eq!(a.std_normal().to_bits(), b.std_normal().to_bits());
        assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        let xa = a.std_normal_vec(8);
        let xb = b.std_normal_vec(8);
        assert_ne!(xa, xb);
    }

    #[test]
    fn uniform_is_open() {
        let mut rng = RngStream::new(4, 0);
        for _ in 0..10_000 {
            let u = rng.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let mut rng = RngStream::new(5, 0);
        assert!(matches!(rng.gamma(0.0, 1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(rng.gamma(1.0, -1.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(rng.exponential(0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn sample_indices_are_distinct() {
        let mut rng = RngStream::new(6, 0);
        let mut idx = rng.sample_indices(50, 5);
        idx.sort_unstable();
        idx.dedup();
        assert_eq!(idx.len(), 5);
        assert!(idx.iter().all(|&i| i < 50));
    }
}
