//! Exact sampling from `N(μ, Σ)` with `Σ = (ΦᵀΦ + D⁻¹)⁻¹` and `μ = ΣΦᵀα`.
//!
//! The fast sampler never touches a p×p precision matrix. It draws the
//! augmented pair `u ~ N(0, D)`, `δ ~ N(0, I_n)` and maps it linearly onto
//! the target:
//!
//! ```text
//! v = Φu + δ
//! (ΦDΦᵀ + I_n) w = α − v
//! θ = u + DΦᵀw
//! ```
//!
//! With diagonal `D` the dominant cost is forming the n×n matrix `ΦDΦᵀ`,
//! O(n²p). The reference sampler ([`StructuredGaussian::baseline_sample`])
//! instead factors the p×p precision `Q = ΦᵀΦ + D⁻¹` at every call, O(p³).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_unchecked, cholesky_with_threshold, dot, DenseMatrix, DenseVector, SpdFactor};
use crate::rng::RngStream;

/// The prior covariance `D`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleStructure {
    /// `D = diag(d)` with every `d_j > 0`.
    Diagonal(Vec<f64>),
    /// A dense SPD `D` together with its Cholesky factor, used to draw
    /// `N(0, D)` as `L z`.
    DenseSpd { matrix: DenseMatrix, factor: SpdFactor },
}

impl ScaleStructure {
    pub fn diagonal(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::InvalidParameter("diagonal scale must be non-empty".into()));
        }
        if let Some((j, v)) = d.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "diagonal scale entry {j} must be positive and finite, got {v}"
            )));
        }
        Ok(Self::Diagonal(d))
    }

    /// Factors a dense SPD matrix.
    pub fn dense(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() == 0 {
            return Err(Error::InvalidParameter("dense scale must be non-empty".into()));
        }
        let factor = cholesky(&matrix)?;
        Ok(Self::DenseSpd { matrix, factor })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Diagonal(d) => d.len(),
            Self::DenseSpd { matrix, .. } => matrix.rows(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self, Self::Diagonal(_))
    }

    /// Maps a standard normal vector onto a `N(0, D)` draw.
    pub fn correlate(&self, z: &[f64]) -> Result<DenseVector> {
        if z.len() != self.dim() {
            return Err(Error::dims("ScaleStructure::correlate", self.dim(), z.len()));
        }
        match self {
            Self::Diagonal(d) => Ok(d.iter().zip(z).map(|(d, z)| d.sqrt() * z).collect()),
            Self::DenseSpd { factor, .. } => factor.mul_lower(z),
        }
    }

    /// `D x`
    pub fn apply(&self, x: &[f64]) -> Result<DenseVector> {
        if x.len() != self.dim() {
            return Err(Error::dims("ScaleStructure::apply", self.dim(), x.len()));
        }
        match self {
            Self::Diagonal(d) => Ok(d.iter().zip(x).map(|(d, x)| d * x).collect()),
            Self::DenseSpd { matrix, .. } => matrix.matvec(x),
        }
    }

    /// `Φ D` for an n×p `Φ`. Row-scales for diagonal `D` (O(np)), a full
    /// product otherwise (O(np²)).
    pub fn right_apply(&self, phi: &DenseMatrix) -> Result<DenseMatrix> {
        match self {
            Self::Diagonal(d) => phi.scale_columns(d),
            Self::DenseSpd { matrix, .. } => phi.matmul(matrix),
        }
    }

    /// `xᵀ D⁻¹ x`
    pub fn inverse_quadratic(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::dims("ScaleStructure::inverse_quadratic", self.dim(), x.len()));
        }
        match self {
            Self::Diagonal(d) => Ok(d.iter().zip(x).map(|(d, x)| x * x / d).sum()),
            Self::DenseSpd { factor, .. } => {
                let y = factor.solve_lower(x)?;
                Ok(dot(&y, &y))
            }
        }
    }

    pub fn log_det(&self) -> f64 {
        match self {
            Self::Diagonal(d) => d.iter().map(|v| v.ln()).sum(),
            Self::DenseSpd { factor, .. } => factor.log_det(),
        }
    }

    /// Adds `D⁻¹` onto a p×p matrix in place.
    fn add_inverse_to(&self, q: &mut DenseMatrix) {
        match self {
            Self::Diagonal(d) => {
                for (j, v) in d.iter().enumerate() {
                    q[(j, j)] += 1.0 / v;
                }
            }
            Self::DenseSpd { factor, .. } => {
                let inv = factor.inverse();
                for i in 0..q.rows() {
                    for (a, b) in q.row_mut(i).iter_mut().zip(inv.row(i)) {
                        *a += b;
                    }
                }
            }
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Self::Diagonal(d) => DenseMatrix::diagonal(d),
            Self::DenseSpd { matrix, .. } => matrix.clone(),
        }
    }
}

/// The problem instance `(Φ, D, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredGaussian {
    phi: DenseMatrix,
    scale: ScaleStructure,
    alpha: DenseVector,
}

/// Every intermediate of one fast draw. `(v, u)` is the augmented Gaussian
/// vector; `theta` is the draw from the target.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDraw {
    pub u: DenseVector,
    pub delta: DenseVector,
    pub v: DenseVector,
    pub w: DenseVector,
    pub theta: DenseVector,
}

/// Covariance blocks of the augmented vector `(v, u)`:
/// `P = ΦDΦᵀ + I_n`, `S = ΦD`, `R = D`.
#[derive(Debug, Clone)]
pub struct AugmentationBlocks {
    pub p: DenseMatrix,
    pub s: DenseMatrix,
    pub r: DenseMatrix,
}

impl StructuredGaussian {
    pub fn new(phi: DenseMatrix, scale: ScaleStructure, alpha: DenseVector) -> Result<Self> {
        let (n, p) = phi.shape();
        if n == 0 || p == 0 {
            return Err(Error::InvalidParameter(format!(
                "Φ must have at least one row and column, got {n}×{p}"
            )));
        }
        if scale.dim() != p {
            return Err(Error::dims(
                "StructuredGaussian: scale dimension vs Φ columns",
                p,
                scale.dim(),
            ));
        }
        if alpha.len() != n {
            return Err(Error::dims("StructuredGaussian: α length vs Φ rows", n, alpha.len()));
        }
        if alpha.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("α"));
        }
        Ok(Self { phi, scale, alpha })
    }

    /// Number of rows of `Φ`.
    pub fn n(&self) -> usize {
        self.phi.rows()
    }

    /// Dimension of the target.
    pub fn p(&self) -> usize {
        self.phi.cols()
    }

    pub fn phi(&self) -> &DenseMatrix {
        &self.phi
    }

    pub fn scale(&self) -> &ScaleStructure {
        &self.scale
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// Factors the n×n system once so that repeated draws share it.
    pub fn fast_sampler(&self) -> Result<FastSampler<'_>> {
        let coupled = self.scale.right_apply(&self.phi)?;
        let gram = coupled.mul_transpose(&self.phi, true)?;
        let mut system = gram.clone();
        system.add_to_diagonal(1.0);
        let factor = factor_system(&system)?;
        Ok(FastSampler {
            g: self,
            coupled,
            gram,
            factor,
        })
    }

    /// One exact draw via data augmentation.
    pub fn fast_sample(&self, rng: &mut RngStream) -> Result<AugmentedDraw> {
        self.fast_sampler()?.draw(rng)
    }

    /// Runs the deterministic part of the fast sampler on a given
    /// `u ~ N(0, D)` and `δ ~ N(0, I_n)`.
    pub fn complete_draw(&self, u: DenseVector, delta: DenseVector) -> Result<AugmentedDraw> {
        self.fast_sampler()?.complete(u, delta)
    }

    /// `μ`, obtained as the fast map applied to `u = 0`, `δ = 0`.
    pub fn posterior_mean(&self) -> Result<DenseVector> {
        self.fast_sampler()?.mean()
    }

    /// The precision `Q = ΦᵀΦ + D⁻¹` as an explicit p×p matrix.
    pub fn precision(&self) -> DenseMatrix {
        let phi_t = self.phi.transpose();
        let mut q = phi_t.mul_transpose(&phi_t, true).expect("matching inner dimension");
        self.scale.add_inverse_to(&mut q);
        q
    }

    /// Reference sampler: factors `Q` and returns `μ + L⁻ᵀz`. The factor is
    /// rebuilt on every call.
    pub fn baseline_sample(&self, rng: &mut RngStream) -> Result<DenseVector> {
        let z = rng.std_normal_vec(self.p());
        self.baseline_from_noise(&z)
    }

    /// Reference sampler on a supplied standard normal p-vector.
    pub fn baseline_from_noise(&self, z: &[f64]) -> Result<DenseVector> {
        if z.len() != self.p() {
            return Err(Error::dims("baseline_from_noise", self.p(), z.len()));
        }
        let q = self.precision();
        let factor = cholesky_unchecked(&q)?;
        let b = self.phi.tr_matvec(&self.alpha)?;
        let mut theta = factor.solve(&b)?;
        let offset = factor.solve_upper(z)?;
        for (t, o) in theta.iter_mut().zip(offset) {
            *t += o;
        }
        Ok(theta)
    }

    /// `log N(x; μ, Σ)` using only n×n factorizations:
    /// `log|Σ⁻¹| = −log|D| + log|ΦDΦᵀ + I_n|` and
    /// `(x−μ)ᵀQ(x−μ) = xᵀQx − 2(Φx)ᵀα + αᵀ(ΦDΦᵀ + I_n)⁻¹ΦDΦᵀα`.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.p() {
            return Err(Error::dims("log_density", self.p(), x.len()));
        }
        let sampler = self.fast_sampler()?;
        let phi_x = self.phi.matvec(x)?;
        let x_q_x = dot(&phi_x, &phi_x) + self.scale.inverse_quadratic(x)?;
        let cross = dot(&phi_x, &self.alpha);
        let solved = sampler.factor.solve(&self.alpha)?;
        let gram_alpha = sampler.gram.matvec(&self.alpha)?;
        let mu_q_mu = dot(&solved, &gram_alpha);
        let quad = x_q_x - 2.0 * cross + mu_q_mu;
        let log_det_precision = sampler.factor.log_det() - self.scale.log_det();
        let p = self.p() as f64;
        Ok(-0.5 * p * (2.0 * PI).ln() + 0.5 * log_det_precision - 0.5 * quad)
    }

    pub fn augmentation_blocks(&self) -> Result<AugmentationBlocks> {
        let s = self.scale.right_apply(&self.phi)?;
        let mut p = s.mul_transpose(&self.phi, true)?;
        p.add_to_diagonal(1.0);
        Ok(AugmentationBlocks {
            p,
            s,
            r: self.scale.to_dense(),
        })
    }
}

/// Relative roundoff level, per row, at which a pivot of `ΦDΦᵀ + I_n` is
/// no longer trustworthy.
const SYSTEM_PIVOT_EPS: f64 = 1e-14;

/// Factors `ΦDΦᵀ + I_n`. Every exact pivot of this matrix is at least 1, so
/// a pivot is only rejected once accumulated roundoff, of order
/// `n·ε·max_ii P_ii`, can account for it.
fn factor_system(system: &DenseMatrix) -> Result<SpdFactor> {
    let n = system.rows();
    let max_diag = (0..n).map(|i| system[(i, i)]).fold(0.0, f64::max);
    cholesky_with_threshold(system, SYSTEM_PIVOT_EPS * n as f64 * max_diag)
}

/// A fast sampler with the n×n system `ΦDΦᵀ + I_n` already factored.
#[derive(Debug, Clone)]
pub struct FastSampler<'a> {
    g: &'a StructuredGaussian,
    /// `ΦD`, n×p
    coupled: DenseMatrix,
    /// `ΦDΦᵀ`, n×n
    gram: DenseMatrix,
    /// Cholesky factor of `ΦDΦᵀ + I_n`
    factor: SpdFactor,
}

impl FastSampler<'_> {
    pub fn draw(&self, rng: &mut RngStream) -> Result<AugmentedDraw> {
        let z = rng.std_normal_vec(self.g.p());
        let u = self.g.scale.correlate(&z)?;
        let delta = rng.std_normal_vec(self.g.n());
        self.complete(u, delta)
    }

    pub fn complete(&self, u: DenseVector, delta: DenseVector) -> Result<AugmentedDraw> {
        let g = self.g;
        if u.len() != g.p() {
            return Err(Error::dims("complete_draw: u", g.p(), u.len()));
        }
        if delta.len() != g.n() {
            return Err(Error::dims("complete_draw: δ", g.n(), delta.len()));
        }
        let mut v = g.phi.matvec(&u)?;
        for (vi, di) in v.iter_mut().zip(&delta) {
            *vi += di;
        }
        let rhs: Vec<f64> = g.alpha.iter().zip(&v).map(|(a, v)| a - v).collect();
        let w = self.factor.solve(&rhs)?;
        // DΦᵀw = (ΦD)ᵀw
        let shift = self.coupled.tr_matvec(&w)?;
        let theta = u.iter().zip(&shift).map(|(u, s)| u + s).collect();
        Ok(AugmentedDraw { u, delta, v, w, theta })
    }

    pub fn mean(&self) -> Result<DenseVector> {
        let g = self.g;
        Ok(self.complete(vec![0.0; g.p()], vec![0.0; g.n()])?.theta)
    }

    /// Factor of `ΦDΦᵀ + I_n`.
    pub fn system_factor(&self) -> &SpdFactor {
        &self.factor
    }
}
