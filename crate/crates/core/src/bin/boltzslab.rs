use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use boltzslab::cli::{
    export_results, load_config, read_report, run_experiment, write_e1, REPORT_FILE,
};
use boltzslab::collision::{check_operator, VelocityGrid};
use boltzslab::special::e1_validation;
use boltzslab::Error;

#[derive(Parser)]
#[command(version, about = "Linearized Boltzmann slab solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the slab problem described by a config file and write results.
    Solve {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check E1 against quadrature and its bounds on 1000 points of [1e-6, 50].
    ValidateE1 {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble the operator of a config and check its structural properties.
    ValidateOperator {
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Summarize the report.json in a result directory.
    Report { dir: PathBuf },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

fn fail(e: &Error) -> ExitCode {
    eprintln!("error [{}]: {e}", e.code());
    match e {
        Error::Parse { .. } | Error::Validation(_) => ExitCode::from(EXIT_CONFIG),
        _ => ExitCode::from(EXIT_FAILURE),
    }
}

fn solve(config: &Path, out: Option<PathBuf>) -> ExitCode {
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(e @ Error::Io { .. }) => {
            eprintln!("error [{}]: {e}", e.code());
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => return fail(&e),
    };
    let results = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let dir = out.unwrap_or_else(|| cfg.output_dir.clone());
    let report = &results.report;
    if !report.is_ok() {
        if let Err(e) = std::fs::create_dir_all(&dir)
            .map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })
            .and_then(|_| boltzslab::cli::write_report(report, &dir.join(REPORT_FILE)))
        {
            return fail(&e);
        }
        let msg = report
            .error
            .as_ref()
            .map(|e| e.message.as_str())
            .unwrap_or("unknown");
        eprintln!("solver failed: {msg}");
        return ExitCode::from(EXIT_FAILURE);
    }
    if let Err(e) = export_results(&results, &dir) {
        return fail(&e);
    }
    println!(
        "converged in {} iterations, results in {}",
        report.solver.iterations,
        dir.display()
    );
    print_singularities(report);
    ExitCode::SUCCESS
}

fn print_singularities(report: &boltzslab::cli::Report) {
    println!(
        "{:>6} {:>13} {:>13} {:>13} {:>9}",
        "alpha", "c_theory", "b_fit", "I slope", "gap"
    );
    for s in &report.singularities {
        match (&s.report, &s.error) {
            (Some(r), _) => println!(
                "{:>6} {:>13.6e} {:>13.6e} {:>13.6e} {:>9.4}",
                r.alpha.to_string(),
                r.c_theory,
                r.b_fit,
                r.i_limit,
                r.fit_gap()
            ),
            (None, Some(e)) => println!(
                "{:>6} error [{}]: {}",
                s.alpha.to_string(),
                e.code,
                e.message
            ),
            (None, None) => {}
        }
    }
}

fn validate_e1(out: Option<PathBuf>) -> ExitCode {
    let rows = match e1_validation(1000, 1e-6, 50.0) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    let bounds = rows.iter().all(|r| r.bounds_hold());
    let x = 1e-6f64;
    let ratio = boltzslab::special::e1(x) / -x.ln();
    println!("max relative error vs quadrature: {worst:.3e}");
    println!("bounds hold strictly: {bounds}");
    println!("E1(1e-6)/(-ln 1e-6) = {ratio:.6}");
    if let Some(dir) = out {
        let path = dir.join(boltzslab::cli::E1_FILE);
        if let Err(e) = std::fs::create_dir_all(&dir)
            .map_err(|e| Error::Io {
                path: dir.clone(),
                source: e,
            })
            .and_then(|_| write_e1(&rows, &path))
        {
            return fail(&e);
        }
    }
    if worst <= 1e-10 && bounds && (0.95..=1.05).contains(&ratio) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn validate_operator(config: &Path, samples: usize) -> ExitCode {
    let run = || -> boltzslab::Result<bool> {
        let cfg = load_config(config)?;
        let grid = VelocityGrid::new(cfg.grid.clone())?;
        let (check, _) = check_operator(
            &cfg.model()?,
            &grid,
            &cfg.assembly_options(),
            samples,
            cfg.seed,
        )?;
        let mut ok = true;
        for (name, d) in &check.invariant_defects {
            println!("invariant {name:<20} defect {d:.3e}");
            ok &= *d <= 1e-6;
        }
        println!("symmetry {:.3e}", check.symmetry);
        println!("max Rayleigh quotient {:.3e}", check.max_rayleigh);
        ok &= check.symmetry <= cfg.assembly_tol && check.max_rayleigh <= cfg.assembly_tol;
        if let Some(err) = check.nu_closed_form_error {
            println!("nu vs closed form {err:.3e}");
            ok &= err <= 1e-8;
        }
        println!("nu0 {:.6} nu1 {:.6}", check.nu0, check.nu1);
        Ok(ok)
    };
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(e @ Error::Io { .. }) => {
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => fail(&e),
    }
}

fn report(dir: &Path) -> ExitCode {
    let report = match read_report(&dir.join(REPORT_FILE)) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    println!("status {} (version {})", report.status, report.version);
    println!(
        "solver: converged {} after {} iterations, fixed-point residual {:.3e}",
        report.solver.converged, report.solver.iterations, report.solver.fixed_point_residual
    );
    if let Some(c) = &report.constants {
        println!(
            "nu0 {:.6} nu1 {:.6} boundedness {:.4}",
            c.nu0, c.nu1, c.boundedness
        );
        if let Some(slope) = c.holder.slope {
            println!("Holder slope {slope:.4} (beta {})", c.holder.beta);
        }
    }
    print_singularities(&report);
    if report.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve { config, out } => solve(&config, out),
        Command::ValidateE1 { out } => validate_e1(out),
        Command::ValidateOperator { config, samples } => validate_operator(&config, samples),
        Command::Report { dir } => report(&dir),
    }
}
