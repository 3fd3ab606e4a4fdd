//! Result files: `moments.csv`, `report.json` and `e1_validation.csv`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::experiment::{Report, RunResults};
use crate::error::{Error, Result};
use crate::special::E1Check;

pub const MOMENTS_FILE: &str = "moments.csv";
pub const REPORT_FILE: &str = "report.json";
pub const E1_FILE: &str = "e1_validation.csv";

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Format {
            path: path.to_path_buf(),
            message: format!("{other:?}"),
        },
    }
}

/// Writes the three result files into `dir`, creating it if needed, and
/// returns their paths.
pub fn export_results(results: &RunResults, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let moments = dir.join(MOMENTS_FILE);
    write_moments(results, &moments)?;
    let report = dir.join(REPORT_FILE);
    write_report(&results.report, &report)?;
    let e1 = dir.join(E1_FILE);
    write_e1(&results.e1, &e1)?;
    Ok(vec![moments, report, e1])
}

fn write_moments(results: &RunResults, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec!["x".to_string()];
    for p in &results.profiles {
        header.push(format!("sigma_{}", p.alpha));
        header.push(format!("dsigma_dx_{}", p.alpha));
    }
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for (i, x) in results.x.iter().enumerate() {
        if results.profiles.is_empty() {
            break;
        }
        let mut row = vec![x.to_string()];
        for p in &results.profiles {
            row.push(p.sigma[i].to_string());
            row.push(p.d_sigma[i].to_string());
        }
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    out.write_all(b"\n")
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_e1(rows: &[E1Check], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
