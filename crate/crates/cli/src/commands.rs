//! Subcommand implementations.

use std::path::{Path, PathBuf};

use scalemix::experiments::{run_bench, run_replicates, CovKind, SignalSet, SimDesign, METRIC_NAMES};
use scalemix::{run_chain, ChainConfig, RegressionData, RngStream, ScaleStructure, StructuredGaussian};

use crate::csvio::{fmt_num, join_nums, read_table, OutFile};
use crate::{CliError, CovArg, MethodArg, SignalArg};

/// Builds `D` from a one-row table (diagonal) or a p×p table (dense SPD).
fn read_scale(path: &Path, p: usize) -> Result<ScaleStructure, CliError> {
    let table = read_table(path)?;
    let context = path.display().to_string();
    if table.n_rows() == 1 {
        if table.n_cols() != p {
            return Err(CliError::input(format!(
                "{context}: row 1: diagonal D needs {p} entries, found {}",
                table.n_cols()
            )));
        }
        let d = table.rows.into_iter().next().unwrap_or_default();
        return ScaleStructure::diagonal(d).map_err(|e| CliError::from_core(&context, e));
    }
    if table.n_rows() != p || table.n_cols() != p {
        return Err(CliError::input(format!(
            "{context}: expected one row or a {p}×{p} matrix, found {}×{}",
            table.n_rows(),
            table.n_cols()
        )));
    }
    let matrix = table.into_matrix(path)?;
    ScaleStructure::dense(matrix).map_err(|e| CliError::from_core(&context, e))
}

pub fn sample(
    phi_path: &Path,
    d_path: &Path,
    alpha_path: &Path,
    draws: usize,
    seed: u64,
    method: MethodArg,
    out: &Path,
) -> Result<(), CliError> {
    let phi = read_table(phi_path)?.into_matrix(phi_path)?;
    let scale = read_scale(d_path, phi.cols())?;
    let alpha = read_table(alpha_path)?.into_vector(alpha_path)?;
    if alpha.len() != phi.rows() {
        return Err(CliError::input(format!(
            "{}: α needs {} entries to match Φ, found {}",
            alpha_path.display(),
            phi.rows(),
            alpha.len()
        )));
    }
    let g = StructuredGaussian::new(phi, scale, alpha).map_err(|e| CliError::from_core("instance", e))?;
    let mut rng = RngStream::new(seed, 0);
    let mut file = OutFile::create(out)?;
    match method {
        MethodArg::Fast => {
            let sampler = g.fast_sampler().map_err(|e| CliError::from_core("fast sampler", e))?;
            for _ in 0..draws {
                let draw = sampler
                    .draw(&mut rng)
                    .map_err(|e| CliError::from_core("fast sampler", e))?;
                file.line(&join_nums(&draw.theta))?;
            }
        }
        MethodArg::Baseline => {
            for _ in 0..draws {
                let theta = g
                    .baseline_sample(&mut rng)
                    .map_err(|e| CliError::from_core("baseline sampler", e))?;
                file.line(&join_nums(&theta))?;
            }
        }
    }
    file.finish()
}

pub fn fit(x_path: &Path, y_path: &Path, cfg: &ChainConfig, prefix: &str, write_draws: bool) -> Result<(), CliError> {
    cfg.validate().map_err(|e| CliError::input(e.to_string()))?;
    let x = read_table(x_path)?.into_matrix(x_path)?;
    let y = read_table(y_path)?.into_vector(y_path)?;
    if y.len() != x.rows() {
        return Err(CliError::input(format!(
            "{}: y needs {} entries to match X, found {}",
            y_path.display(),
            x.rows(),
            y.len()
        )));
    }
    let data = RegressionData::new(x, y).map_err(|e| CliError::input(format!("data: {e}")))?;
    let result = run_chain(&data, cfg).map_err(CliError::chain)?;

    let mut summary = OutFile::create(&PathBuf::from(format!("{prefix}_summary.csv")))?;
    summary.line("index,mean,median,lower95,upper95")?;
    for (j, s) in result.summaries.iter().enumerate() {
        summary.line(&format!("{j},{}", join_nums(&[s.mean, s.median, s.lower, s.upper])))?;
    }
    summary.finish()?;

    if write_draws {
        let mut file = OutFile::create(&PathBuf::from(format!("{prefix}_draws.csv")))?;
        for i in 0..result.draws.rows() {
            file.line(&join_nums(result.draws.row(i)))?;
        }
        file.finish()?;
    }
    Ok(())
}

pub fn sim_design(
    n: usize,
    p: usize,
    sigma: f64,
    cov: CovArg,
    signal: SignalArg,
    sparsity: usize,
    reps: usize,
) -> SimDesign {
    SimDesign {
        n,
        p,
        sigma,
        cov_kind: match cov {
            CovArg::Ind => CovKind::Independent,
            CovArg::Cs => CovKind::COMPOUND_SYMMETRY,
            CovArg::Toep => CovKind::TOEPLITZ,
        },
        signal_set: match signal {
            SignalArg::Strong => SignalSet::Strong,
            SignalArg::Weak => SignalSet::Weak,
        },
        sparsity,
        n_replicates: reps,
    }
}

/// Header: `replicate,status,signal_positions,<metrics>`. One row per
/// replicate, then `mean` and `se` rows over successful replicates and a
/// `pooled` row carrying pooled coverage fractions.
pub fn simulate(design: &SimDesign, cfg: &ChainConfig, threads: usize, out: &Path) -> Result<(), CliError> {
    if threads == 0 {
        return Err(CliError::input("--threads must be at least 1"));
    }
    let report = run_replicates(design, cfg, threads).map_err(|e| CliError::input(e.to_string()))?;
    let total = report.rows.len();
    let mut file = OutFile::create(out)?;
    file.line(&format!("replicate,status,signal_positions,{}", METRIC_NAMES.join(",")))?;
    for row in &report.rows {
        let positions = row
            .signal_positions
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(";");
        match &row.metrics {
            Ok(m) => file.line(&format!("{},ok,{positions},{}", row.index, join_nums(&m.values())))?,
            Err(_) => file.line(&format!(
                "{},failed,{positions},{}",
                row.index,
                vec!["NaN"; METRIC_NAMES.len()].join(",")
            ))?,
        }
    }
    let agg = &report.aggregate;
    let status = format!("{}/{total}", agg.succeeded);
    file.line(&format!("mean,{status},,{}", join_nums(&agg.mean)))?;
    file.line(&format!("se,{status},,{}", join_nums(&agg.se)))?;
    let mut pooled = vec![String::new(); METRIC_NAMES.len()];
    pooled[6] = fmt_num(agg.pooled_signal.fraction());
    pooled[7] = fmt_num(agg.pooled_noise.fraction());
    file.line(&format!("pooled,{status},,{}", pooled.join(",")))?;
    file.finish()
}

/// Rows `method,n,p,median_seconds`, then `slope,<method>,<n>,<slope>`
/// footer rows when the p grid has at least two distinct sizes.
pub fn bench(n_grid: &[usize], p_grid: &[usize], reps: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let result = run_bench(n_grid, p_grid, reps, seed).map_err(|e| CliError::from_core("bench", e))?;
    let mut file = OutFile::create(out)?;
    file.line("method,n,p,median_seconds")?;
    for row in &result.rows {
        file.line(&format!(
            "{},{},{},{}",
            row.method.label(),
            row.n,
            row.p,
            fmt_num(row.median_seconds)
        ))?;
    }
    for fit in &result.slopes {
        file.line(&format!(
            "slope,{},{},{}",
            fit.method.label(),
            fit.n,
            fmt_num(fit.slope)
        ))?;
    }
    file.finish()
}
