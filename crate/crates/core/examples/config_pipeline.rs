// The full pipeline driven by a config file: parse, run, export results.

use std::path::Path;

use boltzslab::cli::{export_results, parse_config, run_experiment};
use boltzslab::Error;

const CONFIG: &str = "\
# coarse run of the default hot-wall problem
n_zeta1 = 32
n_zeta_r = 16
eps_grid = 1e-3
x_uniform = 17
dyadic_k_max = 12
fit_k_min = 6
fit_k_max = 11
moments = 0,0,0; 0,2,0
";

pub fn run_example() -> boltzslab::Result<()> {
    let dir = tempfile::tempdir().map_err(|e| Error::Io {
        path: std::env::temp_dir(),
        source: e,
    })?;
    let cfg = parse_config(CONFIG, Path::new("."))?;
    let results = run_experiment(&cfg)?;
    let report = &results.report;
    println!(
        "status {}, {} iterations",
        report.status, report.solver.iterations
    );
    for (x, rho, u, t) in &report.macroscopic {
        println!("x = {x:.3}: density {rho:.5}, velocity {u:.5}, temperature {t:.5}");
    }
    for s in &report.singularities {
        if let Some(r) = &s.report {
            println!("alpha {}: c {:.4}, b {:.4}", s.alpha, r.c_theory, r.b_fit);
        }
    }
    for path in export_results(&results, dir.path())? {
        let size = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!(
            "wrote {} ({size} bytes)",
            path.file_name().and_then(|n| n.to_str()).unwrap_or("?")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> boltzslab::Result<()> {
    run_example()
}
