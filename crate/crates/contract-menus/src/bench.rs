//! Benchmark harness: runs the deterministic and randomized solvers over
//! a directory of instance files and emits a versioned JSON report.

use crate::det::{self, constant_types_enumeration, CONSTANT_TYPES_CAP};
use crate::io::{self, IoError};
use crate::randmenu;
use crate::rational::{rat, to_f64};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: String,
    pub det_mode: Option<String>,
    pub det_value: Option<f64>,
    pub rand_value_e05: Option<f64>,
    pub rand_value_e01: Option<f64>,
    pub sup_ub: Option<f64>,
    pub wall_ms: u128,
    pub iters: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": REPORT_SCHEMA,
            "rows": self.rows.iter().map(|r| {
                json!({
                    "instance": r.instance,
                    "det_mode": r.det_mode,
                    "det_value": r.det_value,
                    "rand_value_e05": r.rand_value_e05,
                    "rand_value_e01": r.rand_value_e01,
                    "sup_ub": r.sup_ub,
                    "wall_ms": r.wall_ms,
                    "iters": r.iters,
                    "error": r.error,
                })
            }).collect::<Vec<_>>(),
        })
    }
}

fn bench_one(path: &Path) -> BenchRow {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let start = Instant::now();
    let mut row = BenchRow {
        instance: name,
        det_mode: None,
        det_value: None,
        rand_value_e05: None,
        rand_value_e01: None,
        sup_ub: None,
        wall_ms: 0,
        iters: 0,
        error: None,
    };

    let mut run = || -> Result<(), String> {
        let raw = io::read_instance(path).map_err(|e| e.to_string())?;
        let report = raw.validate();
        if !report.is_valid() {
            return Err(format!(
                "invalid instance: {}",
                report
                    .violations
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join("; ")
            ));
        }
        let instance = report.normalized.expect("valid instances normalize");

        if instance.num_outcomes() == 2 {
            let (_, value) = det::solve_two_outcomes(&instance).map_err(|e| e.to_string())?;
            row.det_mode = Some("two-outcomes".into());
            row.det_value = Some(to_f64(&value));
        } else if constant_types_enumeration(&instance)
            .map(|c| c <= CONSTANT_TYPES_CAP)
            .unwrap_or(false)
        {
            let (_, value) = det::solve_constant_types(&instance).map_err(|e| e.to_string())?;
            row.det_mode = Some("const-types".into());
            row.det_value = Some(to_f64(&value));
        }

        let e05 = randmenu::solve_randomized(&instance, &rat(1, 20)).map_err(|e| e.to_string())?;
        let e01 = randmenu::solve_randomized(&instance, &rat(1, 100)).map_err(|e| e.to_string())?;
        row.rand_value_e05 = Some(to_f64(&e05.value));
        row.rand_value_e01 = Some(to_f64(&e01.value));
        row.sup_ub = Some(to_f64(&e01.sup_upper_bound()));
        row.iters = e05.iterations + e01.iterations;
        Ok(())
    };

    if let Err(e) = run() {
        row.error = Some(e);
    }
    row.wall_ms = start.elapsed().as_millis();
    row
}

/// Benchmarks every `.json` instance under `dir` (sorted by file name);
/// per-instance failures are recorded in the row and the run continues.
pub fn bench_dir(dir: &Path) -> Result<BenchReport, IoError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|source| IoError::Read { path: dir.display().to_string(), source })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
        .collect();
    paths.sort();
    // Per-instance solves are independent.
    use rayon::prelude::*;
    let rows = paths.par_iter().map(|p| bench_one(p)).collect();
    Ok(BenchReport { rows })
}

pub fn write_report(report: &BenchReport, out: &Path) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(&report.to_json())?;
    std::fs::write(out, text + "\n").map_err(|source| IoError::Write {
        path: out.display().to_string(),
        source,
    })
}
