//! Wall-clock comparison of the fast and reference samplers.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::gaussian::{ScaleStructure, StructuredGaussian};
use crate::linalg::DenseMatrix;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Fast,
    Baseline,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Fast, Method::Baseline];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Fast => "fast",
            Method::Baseline => "baseline",
        }
    }

    /// One draw with this method.
    pub fn sample(&self, g: &StructuredGaussian, rng: &mut RngStream) -> Result<Vec<f64>> {
        match self {
            Method::Fast => Ok(g.fast_sample(rng)?.theta),
            Method::Baseline => g.baseline_sample(rng),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Method::Fast),
            "baseline" => Ok(Method::Baseline),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub n: usize,
    pub p: usize,
    pub median_seconds: f64,
}

/// Least-squares slope of `log(time)` against `log(p)` at fixed `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub method: Method,
    pub n: usize,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub rows: Vec<BenchRow>,
    pub slopes: Vec<SlopeFit>,
}

impl BenchResult {
    pub fn median(&self, method: Method, n: usize, p: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.n == n && r.p == p)
            .map(|r| r.median_seconds)
    }

    pub fn slope(&self, method: Method, n: usize) -> Option<f64> {
        self.slopes
            .iter()
            .find(|s| s.method == method && s.n == n)
            .map(|s| s.slope)
    }
}

/// Random instance with standard normal `Φ`, `α` and `D = diag(e^{z})`.
pub fn bench_instance(n: usize, p: usize, rng: &mut RngStream) -> Result<StructuredGaussian> {
    let phi = DenseMatrix::new(n, p, rng.std_normal_vec(n * p))?;
    let d = (0..p).map(|_| (0.5 * rng.std_normal()).exp()).collect();
    let alpha = rng.std_normal_vec(n);
    StructuredGaussian::new(phi, ScaleStructure::diagonal(d)?, alpha)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Times both samplers over the grid. Each (method, n, p) cell gets one
/// untimed warm-up draw followed by `repetitions` timed draws; the instance
/// is generated outside the timed region. Runs on the calling thread only.
pub fn run_bench(n_grid: &[usize], p_grid: &[usize], repetitions: usize, seed: u64) -> Result<BenchResult> {
    if n_grid.is_empty() || p_grid.is_empty() {
        return Err(Error::InvalidParameter("benchmark grids must be non-empty".into()));
    }
    if n_grid.contains(&0) || p_grid.contains(&0) {
        return Err(Error::InvalidParameter("grid sizes must be positive".into()));
    }
    if repetitions == 0 {
        return Err(Error::InvalidParameter("at least one repetition is required".into()));
    }
    let mut rows = Vec::new();
    for (a, &n) in n_grid.iter().enumerate() {
        for (b, &p) in p_grid.iter().enumerate() {
            let mut rng = RngStream::new(seed, ((a as u64) << 32) | b as u64);
            let g = bench_instance(n, p, &mut rng)?;
            for method in Method::ALL {
                method.sample(&g, &mut rng)?;
                let mut times = Vec::with_capacity(repetitions);
                for _ in 0..repetitions {
                    let start = Instant::now();
                    let theta = method.sample(&g, &mut rng)?;
                    times.push(start.elapsed().as_secs_f64());
                    std::hint::black_box(theta);
                }
                rows.push(BenchRow {
                    method,
                    n,
                    p,
                    median_seconds: median(times).max(1e-9),
                });
            }
        }
    }
    let mut slopes = Vec::new();
    let mut distinct_p = p_grid.to_vec();
    distinct_p.sort_unstable();
    distinct_p.dedup();
    if distinct_p.len() >= 2 {
        for &n in n_grid {
            for method in Method::ALL {
                let (lx, ly): (Vec<f64>, Vec<f64>) = rows
                    .iter()
                    .filter(|r| r.method == method && r.n == n)
                    .map(|r| ((r.p as f64).ln(), r.median_seconds.ln()))
                    .unzip();
                slopes.push(SlopeFit {
                    method,
                    n,
                    slope: ls_slope(&lx, &ly),
                });
            }
        }
    }
    Ok(BenchResult { rows, slopes })
}
