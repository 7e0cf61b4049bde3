use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::PathSample;
use crate::error::Result;
use crate::io::{fmt17, write_atomic};
use crate::scalar::Scalar;

/// `replica,jump_index,time` rows, one per jump.
pub fn paths_csv<T: Scalar>(paths: &[PathSample<T>]) -> String {
    let mut out = String::from("replica,jump_index,time\n");
    for (r, p) in paths.iter().enumerate() {
        for (j, t) in p.jump_times.iter().enumerate() {
            let _ = writeln!(out, "{r},{},{}", j + 1, fmt17(t.as_f64()));
        }
    }
    out
}

pub fn write_paths_csv<T: Scalar>(path: &Path, paths: &[PathSample<T>]) -> Result<()> {
    write_atomic(path, paths_csv(paths).as_bytes())
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub sampler: String,
    pub seed: u64,
    pub count: usize,
    pub n: u64,
    pub acceptance_rate: f64,
    pub statistics: serde_json::Value,
    pub median_jump_time: Option<f64>,
}

/// Median of all jump times pooled across paths.
pub fn median_jump_time<T: Scalar>(paths: &[PathSample<T>]) -> Option<f64> {
    let mut all: Vec<f64> = paths.iter().flat_map(|p| p.jump_times.iter().map(|t| t.as_f64())).collect();
    if all.is_empty() {
        return None;
    }
    all.sort_by(f64::total_cmp);
    let m = all.len();
    Some(if m % 2 == 1 { all[m / 2] } else { 0.5 * (all[m / 2 - 1] + all[m / 2]) })
}
