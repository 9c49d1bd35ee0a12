//! Simulated sparse regression designs.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};
use crate::rng::RngStream;

/// Covariance of the covariate rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovKind {
    /// `Σ = I_p`
    Independent,
    /// Unit diagonal, constant off-diagonal correlation `rho`.
    CompoundSymmetry { rho: f64 },
    /// `Σ_jk = rho^{|j−k|}` (stationary AR(1)).
    Toeplitz { rho: f64 },
}

impl CovKind {
    pub const COMPOUND_SYMMETRY: CovKind = CovKind::CompoundSymmetry { rho: 0.5 };
    pub const TOEPLITZ: CovKind = CovKind::Toeplitz { rho: 0.9 };

    pub fn label(&self) -> &'static str {
        match self {
            CovKind::Independent => "ind",
            CovKind::CompoundSymmetry { .. } => "cs",
            CovKind::Toeplitz { .. } => "toep",
        }
    }
}

impl FromStr for CovKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ind" | "independent" => Ok(CovKind::Independent),
            "cs" | "compound-symmetry" => Ok(CovKind::COMPOUND_SYMMETRY),
            "toep" | "toeplitz" => Ok(CovKind::TOEPLITZ),
            other => Err(Error::InvalidParameter(format!("unknown covariance kind `{other}`"))),
        }
    }
}

/// Magnitudes of the nonzero coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalSet {
    Strong,
    Weak,
}

impl SignalSet {
    pub fn magnitudes(&self) -> [f64; 5] {
        match self {
            SignalSet::Strong => [1.5, 1.75, 2.0, 2.25, 2.5],
            SignalSet::Weak => [0.75, 1.0, 1.25, 1.5, 1.75],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SignalSet::Strong => "strong",
            SignalSet::Weak => "weak",
        }
    }
}

impl FromStr for SignalSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(SignalSet::Strong),
            "weak" => Ok(SignalSet::Weak),
            other => Err(Error::InvalidParameter(format!("unknown signal set `{other}`"))),
        }
    }
}

impl fmt::Display for SignalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDesign {
    pub n: usize,
    pub p: usize,
    pub sigma: f64,
    pub cov_kind: CovKind,
    pub signal_set: SignalSet,
    pub sparsity: usize,
    pub n_replicates: usize,
}

impl Default for SimDesign {
    fn default() -> Self {
        Self {
            n: 100,
            p: 500,
            sigma: 1.5,
            cov_kind: CovKind::Independent,
            signal_set: SignalSet::Strong,
            sparsity: 5,
            n_replicates: 10,
        }
    }
}

impl SimDesign {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.p == 0 {
            return Err(Error::InvalidParameter(format!(
                "design needs n ≥ 2 and p ≥ 1, got n={}, p={}",
                self.n, self.p
            )));
        }
        if self.sparsity > self.p {
            return Err(Error::InvalidParameter(format!(
                "sparsity {} exceeds p = {}",
                self.sparsity, self.p
            )));
        }
        if self.n_replicates == 0 {
            return Err(Error::InvalidParameter("at least one replicate is required".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        match self.cov_kind {
            CovKind::CompoundSymmetry { rho } if !(0.0..1.0).contains(&rho) => Err(Error::InvalidParameter(format!(
                "compound symmetry needs 0 ≤ ρ < 1, got {rho}"
            ))),
            CovKind::Toeplitz { rho } if !(rho.abs() < 1.0) => Err(Error::InvalidParameter(format!(
                "Toeplitz design needs |ρ| < 1, got {rho}"
            ))),
            _ => Ok(()),
        }
    }
}

/// One simulated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SimData {
    pub x: DenseMatrix,
    pub beta0: DenseVector,
    pub y: DenseVector,
    /// Indices of the nonzero coefficients, in draw order.
    pub signal_positions: Vec<usize>,
}

/// Fills one covariate row with a `N_p(0, Σ)` draw in O(p).
fn fill_row(kind: CovKind, row: &mut [f64], rng: &mut RngStream) {
    match kind {
        CovKind::Independent => rng.fill_std_normal(row),
        CovKind::CompoundSymmetry { rho } => {
            let shared = rho.sqrt() * rng.std_normal();
            let own = (1.0 - rho).sqrt();
            for v in row.iter_mut() {
                *v = own * rng.std_normal() + shared;
            }
        }
        CovKind::Toeplitz { rho } => {
            let innovation = (1.0 - rho * rho).sqrt();
            let mut prev = 0.0;
            for (j, v) in row.iter_mut().enumerate() {
                let z = rng.std_normal();
                prev = if j == 0 { z } else { rho * prev + innovation * z };
                *v = prev;
            }
        }
    }
}

/// Draws `X` with i.i.d. `N_p(0, Σ)` rows, a sparse `β₀` with signed
/// magnitudes at uniformly chosen positions, and `y = Xβ₀ + σz`.
pub fn gen_design(design: &SimDesign, rng: &mut RngStream) -> Result<SimData> {
    design.validate()?;
    let (n, p) = (design.n, design.p);
    let mut x = DenseMatrix::zeros(n, p);
    for i in 0..n {
        fill_row(design.cov_kind, x.row_mut(i), rng);
    }
    let magnitudes = design.signal_set.magnitudes();
    let signal_positions = rng.sample_indices(p, design.sparsity);
    let mut beta0 = vec![0.0; p];
    for (k, &j) in signal_positions.iter().enumerate() {
        let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
        beta0[j] = sign * magnitudes[k % magnitudes.len()];
    }
    let mut y = x.matvec(&beta0)?;
    for v in y.iter_mut() {
        *v += design.sigma * rng.std_normal();
    }
    Ok(SimData {
        x,
        beta0,
        y,
        signal_positions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr(x: &DenseMatrix, a: usize, b: usize) -> f64 {
        let n = x.rows() as f64;
        let ca = x.column(a);
        let cb = x.column(b);
        let ma = ca.iter().sum::<f64>() / n;
        let mb = cb.iter().sum::<f64>() / n;
        let sab: f64 = ca.iter().zip(&cb).map(|(u, v)| (u - ma) * (v - mb)).sum();
        let saa: f64 = ca.iter().map(|u| (u - ma).powi(2)).sum();
        let sbb: f64 = cb.iter().map(|v| (v - mb).powi(2)).sum();
        sab / (saa * sbb).sqrt()
    }

    fn design(kind: CovKind) -> SimDesign {
        SimDesign {
            n: 5000,
            p: 6,
            cov_kind: kind,
            n_replicates: 1,
            ..Default::default()
        }
    }

    #[test]
    fn independent_moments() {
        let data = gen_design(&design(CovKind::Independent), &mut RngStream::new(1, 0)).unwrap();
        for j in 0..6 {
            let c = data.x.column(j);
            let var = c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64;
            assert!((0.92..=1.08).contains(&var), "col {j} var {var}");
        }
        for a in 0..6 {
            for b in 0..a {
                assert!(corr(&data.x, a, b).abs() < 0.05);
            }
        }
    }

    #[test]
    fn compound_symmetry_correlation() {
        let data = gen_design(&design(CovKind::COMPOUND_SYMMETRY), &mut RngStream::new(2, 0)).unwrap();
        let r = corr(&data.x, 0, 1);
        assert!((r - 0.5).abs() < 0.05, "r = {r}");
    }

    #[test]
    fn toeplitz_correlation_at_lag_two() {
        let data = gen_design(&design(CovKind::TOEPLITZ), &mut RngStream::new(3, 0)).unwrap();
        let r = corr(&data.x, 0, 2);
        assert!((r - 0.81).abs() < 0.05, "r = {r}");
    }

    #[test]
    fn sparse_truth_uses_signal_magnitudes() {
        let d = SimDesign {
            n: 20,
            p: 50,
            ..Default::default()
        };
        let data = gen_design(&d, &mut RngStream::new(4, 0)).unwrap();
        let nonzero: Vec<usize> = (0..50).filter(|&j| data.beta0[j] != 0.0).collect();
        assert_eq!(nonzero.len(), 5);
        let mut mags: Vec<f64> = data.signal_positions.iter().map(|&j| data.beta0[j].abs()).collect();
        mags.sort_by(f64::total_cmp);
        assert_eq!(mags, SignalSet::Strong.magnitudes().to_vec());
    }

    #[test]
    fn invalid_designs_are_rejected() {
        let d = SimDesign {
            sparsity: 600,
            ..Default::default()
        };
        assert!(d.validate().is_err());
        assert!("diag".parse::<CovKind>().is_err());
        assert_eq!("toep".parse::<CovKind>().unwrap(), CovKind::TOEPLITZ);
    }
}
