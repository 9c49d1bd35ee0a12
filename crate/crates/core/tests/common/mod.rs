//! Reference computations used as test oracles. Everything here works on
//! plain nested `Vec`s with textbook algorithms (Gauss–Jordan elimination,
//! triple loops, Simpson quadrature) and shares no code path with the
//! library's factorizations.

#![allow(dead_code)]

use scalemix::{DenseMatrix, RngStream, ScaleStructure, StructuredGaussian};

pub type Mat = Vec<Vec<f64>>;

pub fn to_mat(m: &DenseMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn from_mat(m: &Mat) -> DenseMatrix {
    DenseMatrix::from_rows(m).unwrap()
}

pub fn eye(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    (0..r)
        .map(|i| {
            (0..c)
                .map(|j| {
                    let mut s = 0.0;
                    for t in 0..k {
                        s += a[i][t] * b[t][j];
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn matvec(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

/// Gauss–Jordan inverse with partial pivoting; also returns log|det|.
pub fn inverse_and_logdet(a: &Mat) -> (Mat, f64) {
    let n = a.len();
    let mut m: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    let mut logdet = 0.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs())).unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        logdet += d.abs().ln();
        for v in m[c].iter_mut() {
            *v /= d;
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            let f = row[c];
            if r != c && f != 0.0 {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * b;
                }
            }
        }
    }
    (m.into_iter().map(|r| r[n..].to_vec()).collect(), logdet)
}

pub fn inverse(a: &Mat) -> Mat {
    inverse_and_logdet(a).0
}

/// Explicit `Σ = (ΦᵀΦ + D⁻¹)⁻¹` and `μ = ΣΦᵀα`.
pub fn dense_moments(phi: &Mat, d: &Mat, alpha: &[f64]) -> (Vec<f64>, Mat) {
    let pt = transpose(phi);
    let q = add(&matmul(&pt, phi), &inverse(d));
    let sigma = inverse(&q);
    let mu = matvec(&sigma, &matvec(&pt, alpha));
    (mu, sigma)
}

/// `u + DΦᵀ(ΦDΦᵀ + I)⁻¹(α − Φu − δ)`
pub fn woodbury_theta(phi: &Mat, d: &Mat, alpha: &[f64], u: &[f64], delta: &[f64]) -> Vec<f64> {
    let pt = transpose(phi);
    let dpt = matmul(d, &pt);
    let system = add(&matmul(phi, &dpt), &eye(phi.len()));
    let phi_u = matvec(phi, u);
    let rhs: Vec<f64> = (0..alpha.len()).map(|i| alpha[i] - phi_u[i] - delta[i]).collect();
    let w = matvec(&inverse(&system), &rhs);
    let shift = matvec(&dpt, &w);
    u.iter().zip(&shift).map(|(a, b)| a + b).collect()
}

/// Log density from explicit `Σ⁻¹` and its determinant.
pub fn dense_log_density(phi: &Mat, d: &Mat, alpha: &[f64], x: &[f64]) -> f64 {
    let p = x.len();
    let pt = transpose(phi);
    let q = add(&matmul(&pt, phi), &inverse(d));
    let (sigma, logdet_q_inv) = inverse_and_logdet(&q);
    let mu = matvec(&sigma, &matvec(&pt, alpha));
    let r: Vec<f64> = x.iter().zip(&mu).map(|(a, b)| a - b).collect();
    let qr = matvec(&q, &r);
    let quad: f64 = r.iter().zip(&qr).map(|(a, b)| a * b).sum();
    // logdet_q_inv here is log|Q| (determinant of the matrix inverted)
    -0.5 * p as f64 * (2.0 * std::f64::consts::PI).ln() + 0.5 * logdet_q_inv - 0.5 * quad
}

/// A random instance with entries from `rng`. Dense scales are `MᵀM/p + I/2`.
pub fn random_instance(n: usize, p: usize, dense: bool, rng: &mut RngStream) -> StructuredGaussian {
    let phi = DenseMatrix::new(n, p, rng.std_normal_vec(n * p)).unwrap();
    let scale = if dense {
        let m = rng.std_normal_vec(p * p);
        let d: Mat = (0..p)
            .map(|i| {
                (0..p)
                    .map(|j| {
                        let s: f64 = (0..p).map(|k| m[k * p + i] * m[k * p + j]).sum();
                        s / p as f64 + if i == j { 0.5 } else { 0.0 }
                    })
                    .collect()
            })
            .collect();
        ScaleStructure::dense(from_mat(&d)).unwrap()
    } else {
        ScaleStructure::diagonal((0..p).map(|_| 0.2 + 2.0 * rng.uniform()).collect()).unwrap()
    };
    let alpha = rng.std_normal_vec(n);
    StructuredGaussian::new(phi, scale, alpha).unwrap()
}

/// Parts of an instance as oracle matrices: (Φ, D, α).
pub fn parts(g: &StructuredGaussian) -> (Mat, Mat, Vec<f64>) {
    (to_mat(g.phi()), to_mat(&g.scale().to_dense()), g.alpha().to_vec())
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let den = b.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(1e-300);
    num / den
}

/// Empirical moment accumulator over vector draws.
pub struct Moments {
    pub count: usize,
    pub sum: Vec<f64>,
    pub cross: Mat,
}

impl Moments {
    pub fn new(dim: usize) -> Self {
        Self {
            count: 0,
            sum: vec![0.0; dim],
            cross: vec![vec![0.0; dim]; dim],
        }
    }

    /// Accumulates about a known centre to limit cancellation.
    pub fn push(&mut self, x: &[f64], centre: &[f64]) {
        self.count += 1;
        let c: Vec<f64> = x.iter().zip(centre).map(|(a, b)| a - b).collect();
        for i in 0..c.len() {
            self.sum[i] += c[i];
            for j in 0..c.len() {
                self.cross[i][j] += c[i] * c[j];
            }
        }
    }

    /// Mean offset from the centre.
    pub fn mean_offset(&self) -> Vec<f64> {
        self.sum.iter().map(|s| s / self.count as f64).collect()
    }

    /// Sample covariance.
    pub fn cov(&self) -> Mat {
        let n = self.count as f64;
        let m = self.mean_offset();
        (0..m.len())
            .map(|i| {
                (0..m.len())
                    .map(|j| (self.cross[i][j] - n * m[i] * m[j]) / (n - 1.0))
                    .collect()
            })
            .collect()
    }
}

/// Standard error of an empirical covariance entry under Gaussianity:
/// `sqrt((Σ_ii Σ_jj + Σ_ij²)/N)`.
pub fn cov_se(sigma: &Mat, i: usize, j: usize, n: usize) -> f64 {
    ((sigma[i][i] * sigma[j][j] + sigma[i][j] * sigma[i][j]) / n as f64).sqrt()
}

/// χ² CDF for even degrees of freedom via the Poisson-sum closed form.
pub fn chi2_cdf_even(x: f64, dof: usize) -> f64 {
    assert!(dof.is_multiple_of(2) && dof > 0);
    if x <= 0.0 {
        return 0.0;
    }
    let h = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..dof / 2 {
        term *= h / k as f64;
        sum += term;
    }
    1.0 - (-h).exp() * sum
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// Tabulated CDF of an unnormalized density on `(0, upper)` by composite
/// Simpson's rule over a grid in `t = sqrt(x)`, which resolves integrable
/// behaviour near zero.
pub struct QuadratureCdf {
    grid: Vec<f64>,
    cdf: Vec<f64>,
    pub mean: f64,
}

impl QuadratureCdf {
    pub fn new(density: impl Fn(f64) -> f64, upper: f64, cells: usize) -> Self {
        // x = t², dx = 2t dt
        let g = |t: f64| density(t * t) * 2.0 * t;
        let t_max = upper.sqrt();
        let h = t_max / cells as f64;
        let mut grid = vec![0.0];
        let mut cdf = vec![0.0];
        let mut acc = 0.0;
        let mut first_moment = 0.0;
        for k in 0..cells {
            let (a, b) = (k as f64 * h, (k + 1) as f64 * h);
            let m = 0.5 * (a + b);
            let cell = h / 6.0 * (g(a) + 4.0 * g(m) + g(b));
            let cell_moment = h / 6.0 * (a * a * g(a) + 4.0 * m * m * g(m) + b * b * g(b));
            acc += cell;
            first_moment += cell_moment;
            grid.push(b * b);
            cdf.push(acc);
        }
        let total = acc;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Self {
            grid,
            cdf,
            mean: first_moment / total,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => self.cdf[i],
            Err(i) if i >= self.grid.len() => 1.0,
            Err(i) => {
                let (x0, x1) = (self.grid[i - 1], self.grid[i]);
                let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
                c0 + (c1 - c0) * (x - x0) / (x1 - x0)
            }
        }
    }
}

/// Draws from `∝ e^{−rate·x}/(1+x)` by rejection from `Exp(rate)`.
pub fn rejection_local(rate: f64, rng: &mut RngStream) -> f64 {
    loop {
        let x = rng.exponential(rate).unwrap();
        if rng.uniform() < 1.0 / (1.0 + x) {
            return x;
        }
    }
}

/// Draws from `∝ x^{shape−1} e^{−rate·x}/(1+x)` by rejection from a gamma.
pub fn rejection_global(shape: f64, rate: f64, rng: &mut RngStream) -> f64 {
    loop {
        let x = rng.gamma(shape, rate).unwrap();
        if rng.uniform() < 1.0 / (1.0 + x) {
            return x;
        }
    }
}

/// Batch-means standard error of a correlated series.
pub fn batch_means_se(x: &[f64], batches: usize) -> f64 {
    let size = x.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| x[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

/// Ω = [[P, S], [Sᵀ, R]] and L⁻¹ = [[I, 0], [−SᵀP⁻¹, I]].
pub fn assemble_blocks(pm: &Mat, s: &Mat, r: &Mat) -> (Mat, Mat) {
    let (n, p) = (pm.len(), r.len());
    let st = transpose(s);
    let k = matmul(&st, &inverse(pm));
    let mut omega = vec![vec![0.0; n + p]; n + p];
    let mut l_inv = eye(n + p);
    for i in 0..n {
        for j in 0..n {
            omega[i][j] = pm[i][j];
        }
        for j in 0..p {
            omega[i][n + j] = s[i][j];
            omega[n + j][i] = s[i][j];
        }
    }
    for i in 0..p {
        for j in 0..p {
            omega[n + i][n + j] = r[i][j];
        }
        for j in 0..n {
            l_inv[n + i][j] = -k[i][j];
        }
    }
    (omega, l_inv)
}
