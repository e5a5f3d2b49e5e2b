//! Random XXZ recovery runs for scaling measurements.

use std::fmt::Write as _;

use lg_core::xl::{build_mq_system, xl_solve, LiouvillianAnsatz};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::io::row_seed;

pub const CSV_HEADER: &str = "N,rep,n_e,n_u,wall_time_ms,residual,matrix_density";

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub rep: usize,
    pub n_e: usize,
    pub n_u: usize,
    pub wall_time_ms: f64,
    /// System residual; NaN when the solve failed.
    pub residual: f64,
    pub matrix_density: f64,
    /// Largest deviation of a recovered `h` or `λ` from the sampled value.
    pub param_error: f64,
    pub error: Option<String>,
}

pub fn run_one(n: usize, rep: usize, base_seed: u64, d_max: usize) -> BenchRow {
    let mut row = BenchRow {
        n,
        rep,
        n_e: 0,
        n_u: 0,
        wall_time_ms: f64::NAN,
        residual: f64::NAN,
        matrix_density: f64::NAN,
        param_error: f64::NAN,
        error: None,
    };
    let outcome = (|| -> lg_core::Result<()> {
        let ansatz = LiouvillianAnsatz::xxz_chain(n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(row_seed(base_seed, n, rep));
        let params = ansatz.random_params(&mut rng);
        let target = ansatz.target(&params)?;
        let sys = build_mq_system(&ansatz, &target, true)?;
        row.n_e = sys.num_equations();
        row.n_u = sys.num_vars();
        let sol = xl_solve(&sys, d_max)?;
        row.wall_time_ms = sol.report.wall_time_ms;
        row.residual = sol.report.residual;
        row.matrix_density = sol.report.matrix_density;
        row.param_error = sol.assignment.iter().zip(&params).map(|(x, p)| (x - p).abs()).fold(0.0, f64::max);
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row
}

/// Rows ordered by `(N, rep)` whatever the evaluation order.
pub fn run(n_min: usize, n_max: usize, reps: usize, base_seed: u64, d_max: usize, parallel: bool) -> Vec<BenchRow> {
    let jobs: Vec<(usize, usize)> = (n_min..=n_max).flat_map(|n| (0..reps).map(move |r| (n, r))).collect();
    if parallel {
        jobs.par_iter().map(|&(n, r)| run_one(n, r, base_seed, d_max)).collect()
    } else {
        jobs.iter().map(|&(n, r)| run_one(n, r, base_seed, d_max)).collect()
    }
}

pub fn rows_csv(rows: &[BenchRow]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.rep.to_string(),
            r.n_e.to_string(),
            r.n_u.to_string(),
            r.wall_time_ms.to_string(),
            r.residual.to_string(),
            r.matrix_density.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeSummary {
    pub n: usize,
    pub reps: usize,
    pub failures: usize,
    pub mean_ms: f64,
    /// Sample standard deviation.
    pub std_ms: f64,
    pub max_residual: f64,
    pub max_param_error: f64,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<SizeSummary> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.n).collect();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| {
            let group: Vec<&BenchRow> = rows.iter().filter(|r| r.n == n).collect();
            let ok: Vec<&BenchRow> = group.iter().copied().filter(|r| r.error.is_none()).collect();
            let times: Vec<f64> = ok.iter().map(|r| r.wall_time_ms).collect();
            let k = times.len() as f64;
            let mean = times.iter().sum::<f64>() / k;
            let var =
                if times.len() > 1 { times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
            SizeSummary {
                n,
                reps: group.len(),
                failures: group.len() - ok.len(),
                mean_ms: mean,
                std_ms: var.sqrt(),
                max_residual: ok.iter().map(|r| r.residual).fold(0.0, f64::max),
                max_param_error: ok.iter().map(|r| r.param_error).fold(0.0, f64::max),
            }
        })
        .collect()
}

pub fn summary_csv(summary: &[SizeSummary]) -> String {
    let mut s = String::from("N,reps,failures,mean_ms,std_ms,max_residual,max_param_error\n");
    for r in summary {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n, r.reps, r.failures, r.mean_ms, r.std_ms, r.max_residual, r.max_param_error
        );
    }
    s
}

/// Least-squares slope of `ln(mean time)` against `ln N`.
pub fn loglog_slope(summary: &[SizeSummary]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = summary
        .iter()
        .filter(|s| s.mean_ms.is_finite() && s.mean_ms > 0.0)
        .map(|s| ((s.n as f64).ln(), s.mean_ms.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
