//! Parameter sweep over the mixed-channel family: one bound report per grid
//! point, computed concurrently but emitted in grid order.

use rayon::prelude::*;

use crate::bounds::{compute_bound_report, BoundReport, BoundsError};
use crate::entmeasures::OptimizerConfig;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep grid: p_min {p_min}, p_max {p_max}, steps {steps}")]
    BadGrid { p_min: f64, p_max: f64, steps: usize },
    #[error("unknown output format `{0}`")]
    BadFormat(String),
    #[error("bounds evaluation failed at p = {0}: {1}")]
    Row(f64, BoundsError),
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(name: &str) -> Result<Self, SweepError> {
        match name {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(SweepError::BadFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    pub seed: u64,
    pub tol: f64,
    pub jobs: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = !(0.0..=1.0).contains(&self.p_min)
            || !(0.0..=1.0).contains(&self.p_max)
            || self.p_min > self.p_max
            || self.steps == 0;
        if bad {
            return Err(SweepError::BadGrid {
                p_min: self.p_min,
                p_max: self.p_max,
                steps: self.steps,
            });
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.p_min];
        }
        let span = self.p_max - self.p_min;
        (0..self.steps)
            .map(|i| self.p_min + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

/// Sweep outcome: rows in grid order plus any ordering violations of the
/// upper-vs-lower bound consistency check.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<BoundReport>,
    pub violations: Vec<String>,
}

pub fn run_sweep(config: &SweepConfig, opt: &OptimizerConfig) -> Result<SweepResult, SweepError> {
    config.validate()?;
    let grid = config.grid();
    let mut opt = opt.clone();
    opt.rng_seed = config.seed;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");
    // collect() preserves grid order regardless of completion order
    let rows: Result<Vec<BoundReport>, SweepError> = pool.install(|| {
        grid.par_iter()
            .map(|&p| compute_bound_report(p, config.tol, &opt).map_err(|e| SweepError::Row(p, e)))
            .collect()
    });
    let rows = rows?;

    let mut violations = Vec::new();
    for row in &rows {
        let lower = row.lower_coherent.max(row.lower_rev_coherent);
        if row.upper_ska + 1e-9 < lower {
            violations.push(format!(
                "p = {:.6}: upper_ska {:.6} below best lower bound {:.6}",
                row.p, row.upper_ska, lower
            ));
        }
    }
    Ok(SweepResult { rows, violations })
}

const CSV_HEADER: &str = "p,upper_ska,upper_ppt_q,lower_coherent,lower_rev_coherent,epsilon,e_ppt_choi";

/// Full-precision CSV, byte-deterministic for identical inputs.
pub fn to_csv(rows: &[BoundReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.p, r.upper_ska, r.upper_ppt_q, r.lower_coherent, r.lower_rev_coherent, r.epsilon, r.e_ppt_choi
        ));
    }
    out
}

pub fn to_json(rows: &[BoundReport]) -> Result<String, SweepError> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn render(rows: &[BoundReport], format: OutputFormat) -> Result<String, SweepError> {
    match format {
        OutputFormat::Csv => Ok(to_csv(rows)),
        OutputFormat::Json => to_json(rows),
    }
}
