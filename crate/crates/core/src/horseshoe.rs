//! Gibbs sampler for `y = Xβ + ε` under the horseshoe prior
//! `β_j | λ_j, τ, σ ~ N(0, λ_j²τ²σ²)` with half-Cauchy `λ_j` and `τ`.
//!
//! One systematic scan updates, in order:
//!
//! 1. `β` from its Gaussian conditional, through [`StructuredGaussian`] with
//!    `Φ = X/σ`, `D = σ²τ²diag(λ²)`, `α = y/σ`;
//! 2. each `η_j = λ_j⁻²` by a slice step on `e^{−m_j η}/(1+η)`,
//!    `m_j = β_j²/(2τ²σ²)`;
//! 3. `ξ = τ⁻²` by a slice step on `ξ^{(p−1)/2} e^{−ξS/(2σ²)}/(1+ξ)`,
//!    `S = Σ β_j²/λ_j²`;
//! 4. `σ²` from its inverse-gamma conditional under `π(σ²) ∝ 1/σ²`, unless
//!    it is held fixed.

use crate::error::{Error, Result};
use crate::gaussian::{ScaleStructure, StructuredGaussian};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::rng::RngStream;
use crate::summary::{summarize_columns, CoefSummary};

/// Inverse squared scales are kept inside this range so that `D` stays
/// finite and strictly positive.
const INV_SCALE_MIN: f64 = 1e-30;
const INV_SCALE_MAX: f64 = 1e30;

/// Below this truncated-gamma mass the small-bound power law is used.
const GAMMA_CDF_FLOOR: f64 = 1e-12;

const SCALE_FLOOR: f64 = 1e-300;

/// `σ²` is kept above this fraction of the mean squared response. An exact
/// fit makes the `1/σ²`-prior posterior improper at `σ² = 0` and the chain
/// would otherwise underflow.
const SIGMA2_REL_FLOOR: f64 = 1e-10;

/// Design matrix and response.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    x: DenseMatrix,
    y: DenseVector,
}

impl RegressionData {
    pub fn new(x: DenseMatrix, y: DenseVector) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::dims(
                "RegressionData: rows of X vs length of y",
                x.rows(),
                y.len(),
            ));
        }
        if x.rows() < 2 {
            return Err(Error::InvalidParameter(format!(
                "regression needs at least 2 observations, got {}",
                x.rows()
            )));
        }
        if x.cols() == 0 {
            return Err(Error::InvalidParameter(
                "regression needs at least one covariate".into(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("y"));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// Smallest `σ²` the sampler will visit.
    pub fn sigma2_floor(&self) -> f64 {
        let mean_sq = self.y.iter().map(|v| v * v).sum::<f64>() / self.y.len() as f64;
        SIGMA2_REL_FLOOR * if mean_sq > 0.0 { mean_sq } else { 1.0 }
    }

    fn residual_ss(&self, beta: &[f64]) -> Result<f64> {
        let fitted = self.x.matvec(beta)?;
        Ok(self.y.iter().zip(&fitted).map(|(y, f)| (y - f).powi(2)).sum())
    }
}

/// Parameters of one Gibbs scan.
#[derive(Debug, Clone, PartialEq)]
pub struct HorseshoeState {
    pub beta: DenseVector,
    /// Local scales `λ_j`.
    pub lambda: DenseVector,
    /// Global scale.
    pub tau: f64,
    /// Noise variance.
    pub sigma2: f64,
}

impl HorseshoeState {
    /// `β = 0`, `λ = 1`, `τ = 1`, and `σ²` either fixed or the sample
    /// variance of `y` (1 when `y` is constant).
    pub fn initial(data: &RegressionData, fixed_sigma: Option<f64>) -> Self {
        let sigma2 = match fixed_sigma {
            Some(s) => s * s,
            None => {
                let var = sample_variance(data.y());
                if var > 0.0 && var.is_finite() {
                    var
                } else {
                    1.0
                }
            }
        };
        Self {
            beta: vec![0.0; data.p()],
            lambda: vec![1.0; data.p()],
            tau: 1.0,
            sigma2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !self.lambda.iter().all(|&l| pos(l)) {
            return Err(Error::InvalidParameter(
                "local scales must be positive and finite".into(),
            ));
        }
        if !pos(self.tau) || !pos(self.sigma2) {
            return Err(Error::InvalidParameter(format!(
                "τ and σ² must be positive and finite, got τ={}, σ²={}",
                self.tau, self.sigma2
            )));
        }
        if self.beta.len() != self.lambda.len() {
            return Err(Error::dims(
                "HorseshoeState: β vs λ",
                self.lambda.len(),
                self.beta.len(),
            ));
        }
        if self.beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("β"));
        }
        Ok(())
    }

    /// `Σ_j β_j²/λ_j²`
    fn weighted_beta_ss(&self) -> f64 {
        self.beta.iter().zip(&self.lambda).map(|(b, l)| (b / l).powi(2)).sum()
    }
}

/// Chain length, thinning and seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n_iter: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// When set, `σ` is held at this value and never updated.
    pub fixed_sigma: Option<f64>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            n_iter: 6000,
            burn_in: 1000,
            thin: 1,
            seed: 0,
            fixed_sigma: None,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.burn_in >= self.n_iter {
            return Err(Error::Config(format!(
                "burn-in ({}) must be smaller than the number of iterations ({})",
                self.burn_in, self.n_iter
            )));
        }
        if let Some(s) = self.fixed_sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("fixed sigma must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Number of stored draws, `⌊(n_iter − burn_in)/thin⌋`.
    pub fn kept_draws(&self) -> usize {
        (self.n_iter - self.burn_in) / self.thin
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleDraw {
    pub tau: f64,
    pub sigma2: f64,
}

/// Kept draws and per-coefficient summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainResult {
    /// One row per kept iteration.
    pub draws: DenseMatrix,
    pub scale_draws: Vec<ScaleDraw>,
    pub summaries: Vec<CoefSummary>,
    pub level: f64,
}

impl ChainResult {
    pub fn posterior_mean(&self) -> DenseVector {
        self.summaries.iter().map(|s| s.mean).collect()
    }

    pub fn posterior_median(&self) -> DenseVector {
        self.summaries.iter().map(|s| s.median).collect()
    }
}

/// The Gaussian conditional of `β` as a structured instance.
pub fn beta_conditional(state: &HorseshoeState, data: &RegressionData) -> Result<StructuredGaussian> {
    let sigma = state.sigma2.sqrt();
    let prior_var = state.sigma2 * state.tau * state.tau;
    let d = state.lambda.iter().map(|l| prior_var * l * l).collect();
    let alpha = data.y.iter().map(|y| y / sigma).collect();
    StructuredGaussian::new(data.x.scaled(1.0 / sigma), ScaleStructure::diagonal(d)?, alpha)
}

/// Draws `β` from `N(A⁻¹Xᵀy, σ²A⁻¹)`, `A = XᵀX + (τ²diag(λ²))⁻¹`.
pub fn update_beta(state: &HorseshoeState, data: &RegressionData, rng: &mut RngStream) -> Result<DenseVector> {
    Ok(beta_conditional(state, data)?.fast_sample(rng)?.theta)
}

/// Slice height `s ~ U(0, 1/(1+x))` expressed as the upper end of the
/// slice `{x' : 1/(1+x') > s} = (0, (1−s)/s)`.
#[inline]
pub fn slice_upper_bound(s: f64) -> f64 {
    (1.0 - s) / s
}

/// Inverse CDF of `Exp(rate)` truncated to `(0, bound)` at `u ∈ (0,1)`.
/// A zero rate is the uniform on `(0, bound)`.
pub fn truncated_exponential_inv(rate: f64, bound: f64, u: f64) -> f64 {
    if rate <= 0.0 {
        return u * bound;
    }
    // mass of (0, bound) is 1 − e^{−rate·bound}
    let mass = -(-rate * bound).exp_m1();
    let x = -(-u * mass).ln_1p() / rate;
    x.min(bound)
}

/// Inverse CDF of `Gamma(shape, rate)` truncated to `(0, bound)` at `u`.
/// Falls back to `bound·u^{1/shape}` when the truncated mass underflows,
/// which is also the exact answer for `rate = 0`.
pub fn truncated_gamma_inv(shape: f64, rate: f64, bound: f64, u: f64) -> f64 {
    if !(rate > 0.0) {
        return bound * u.powf(1.0 / shape);
    }
    // beyond this point the untruncated upper tail is negligible
    let tail = shape + 40.0 * (shape.sqrt() + 1.0);
    let z_hi = (rate * bound).min(tail);
    let mass = gamma_cdf(shape, z_hi);
    if !(mass >= GAMMA_CDF_FLOOR) {
        return bound * u.powf(1.0 / shape);
    }
    (invert_gamma_cdf(shape, u * mass, z_hi) / rate).min(bound)
}

/// Regularized lower incomplete gamma `P(shape, z)`.
fn gamma_cdf(shape: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    statrs::function::gamma::checked_gamma_lr(shape, z).unwrap_or(f64::NAN)
}

/// Solves `P(shape, z) = target` on `(0, z_hi)` by Newton steps kept inside
/// a shrinking bisection bracket.
fn invert_gamma_cdf(shape: f64, target: f64, z_hi: f64) -> f64 {
    let ln_gamma = statrs::function::gamma::ln_gamma(shape);
    let (mut lo, mut hi) = (0.0, z_hi);
    let mut z = 0.5 * z_hi;
    for _ in 0..200 {
        let err = gamma_cdf(shape, z) - target;
        if err == 0.0 {
            return z;
        }
        if err > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        let density = ((shape - 1.0) * z.ln() - z - ln_gamma).exp();
        let newton = z - err / density;
        let next = if newton > lo && newton < hi && newton.is_finite() {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - z).abs() <= 4.0 * f64::EPSILON * z || hi - lo <= f64::EPSILON * hi {
            return next;
        }
        z = next;
    }
    z
}

/// One slice transition for `η = λ⁻²` given the two uniforms.
pub fn local_scale_step(eta: f64, rate: f64, u_slice: f64, u_inv: f64) -> f64 {
    let s = u_slice / (1.0 + eta);
    let bound = slice_upper_bound(s);
    truncated_exponential_inv(rate, bound, u_inv).clamp(INV_SCALE_MIN, INV_SCALE_MAX)
}

/// One slice transition for `ξ = τ⁻²` given the two uniforms.
pub fn global_scale_step(xi: f64, p: usize, rate: f64, u_slice: f64, u_inv: f64) -> f64 {
    let s = u_slice / (1.0 + xi);
    let bound = slice_upper_bound(s);
    let shape = (p as f64 + 1.0) / 2.0;
    truncated_gamma_inv(shape, rate, bound, u_inv).clamp(INV_SCALE_MIN, INV_SCALE_MAX)
}

/// Slice-samples every local scale `λ_j` independently.
pub fn update_lambda(state: &HorseshoeState, rng: &mut RngStream) -> DenseVector {
    let denom = 2.0 * state.tau * state.tau * state.sigma2;
    state
        .beta
        .iter()
        .zip(&state.lambda)
        .map(|(b, l)| {
            let eta = 1.0 / (l * l);
            let rate = b * b / denom;
            let u_slice = rng.uniform();
            let u_inv = rng.uniform();
            local_scale_step(eta, rate, u_slice, u_inv).sqrt().recip()
        })
        .collect()
}

/// Slice-samples the global scale `τ`.
pub fn update_tau(state: &HorseshoeState, rng: &mut RngStream) -> f64 {
    let xi = 1.0 / (state.tau * state.tau);
    let rate = state.weighted_beta_ss() / (2.0 * state.sigma2);
    let u_slice = rng.uniform();
    let u_inv = rng.uniform();
    global_scale_step(xi, state.beta.len(), rate, u_slice, u_inv)
        .sqrt()
        .recip()
}

/// Shape and scale of the inverse-gamma conditional of `σ²`.
pub fn sigma2_conditional(residual_ss: f64, prior_ss: f64, n: usize, p: usize) -> (f64, f64) {
    let shape = (n + p) as f64 / 2.0;
    let scale = ((residual_ss + prior_ss) / 2.0).max(SCALE_FLOOR);
    (shape, scale)
}

/// Draws `σ² ~ InvGamma(shape, scale)` as the reciprocal of a gamma draw.
pub fn draw_inverse_gamma(shape: f64, scale: f64, rng: &mut RngStream) -> Result<f64> {
    let g = rng.gamma(shape, scale)?;
    Ok((1.0 / g).min(f64::MAX))
}

/// Draws `σ²` from
/// `InvGamma((n+p)/2, {‖y − Xβ‖² + Σ β_j²/(τ²λ_j²)}/2)`.
pub fn update_sigma2(state: &HorseshoeState, data: &RegressionData, rng: &mut RngStream) -> Result<f64> {
    let rss = data.residual_ss(&state.beta)?;
    let prior_ss = state.weighted_beta_ss() / (state.tau * state.tau);
    let (shape, scale) = sigma2_conditional(rss, prior_ss, data.n(), data.p());
    Ok(draw_inverse_gamma(shape, scale, rng)?.max(data.sigma2_floor()))
}

/// One full scan, updating `state` in place.
pub fn gibbs_scan(
    state: &mut HorseshoeState,
    data: &RegressionData,
    fixed_sigma: bool,
    rng: &mut RngStream,
) -> Result<()> {
    state.beta = update_beta(state, data, rng)?;
    state.lambda = update_lambda(state, rng);
    state.tau = update_tau(state, rng);
    if !fixed_sigma {
        state.sigma2 = update_sigma2(state, data, rng)?;
    }
    Ok(())
}

/// Runs a chain on stream 0 of `cfg.seed`.
pub fn run_chain(data: &RegressionData, cfg: &ChainConfig) -> Result<ChainResult> {
    let mut rng = RngStream::new(cfg.seed, 0);
    run_chain_with(data, cfg, &mut rng)
}

/// Runs a chain on a caller-supplied stream.
pub fn run_chain_with(data: &RegressionData, cfg: &ChainConfig, rng: &mut RngStream) -> Result<ChainResult> {
    cfg.validate()?;
    let p = data.p();
    let kept = cfg.kept_draws();
    let mut state = HorseshoeState::initial(data, cfg.fixed_sigma);
    let mut draws = Vec::with_capacity(kept * p);
    let mut scale_draws = Vec::with_capacity(kept);
    for iter in 0..cfg.n_iter {
        gibbs_scan(&mut state, data, cfg.fixed_sigma.is_some(), rng)?;
        if iter >= cfg.burn_in && (iter - cfg.burn_in + 1).is_multiple_of(cfg.thin) {
            draws.extend_from_slice(&state.beta);
            scale_draws.push(ScaleDraw {
                tau: state.tau,
                sigma2: state.sigma2,
            });
        }
    }
    let draws = DenseMatrix::new(kept, p, draws)?;
    let level = 0.95;
    let summaries = summarize_columns(&draws, level);
    Ok(ChainResult {
        draws,
        scale_draws,
        summaries,
        level,
    })
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}
