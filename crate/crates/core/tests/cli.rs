use std::path::{Path, PathBuf};
use std::process::Command;

use boltzslab::cli::{
    export_results, load_config, parse_config, read_report, run_experiment, write_report,
    BoundaryChoice, RunConfig, CACHE_DIR_ENV, E1_FILE, MOMENTS_FILE, REPORT_FILE,
};
use boltzslab::moments::MomentIndex;
use boltzslab::slab::BoundaryPreset;
use boltzslab::Error;

const SMALL: &str = "\
# small and quick
n_zeta1 = 32
n_zeta_r = 8
eps_grid = 1e-2
x_uniform = 17
dyadic_k_min = 6
dyadic_k_max = 12
fit_k_min = 6
fit_k_max = 11
smoothing_samples = 8
moments = 0,0,0; 0,2,0
";

fn small_config() -> RunConfig {
    parse_config(SMALL, Path::new("/tmp")).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_boltzslab"));
    c.env_remove(CACHE_DIR_ENV);
    c
}

#[test]
fn defaults_and_relative_paths() {
    let cfg = parse_config("output_dir = results\n", Path::new("/data/runs")).unwrap();
    let d = RunConfig::default();
    assert_eq!(cfg.output_dir, PathBuf::from("/data/runs/results"));
    assert_eq!(cfg.grid, d.grid);
    assert_eq!(
        cfg.moments,
        vec![
            MomentIndex::new(0, 0, 0),
            MomentIndex::new(2, 0, 0),
            MomentIndex::new(0, 2, 0)
        ]
    );
    assert_eq!(
        cfg.boundary,
        BoundaryChoice::Preset {
            name: BoundaryPreset::TemperatureJump
        }
    );
    assert_eq!((cfg.fit_k_min, cfg.fit_k_max), (8, 14));
    assert_eq!(
        cfg.echo,
        vec![("output_dir".to_string(), "results".to_string())]
    );
}

#[test]
fn parse_errors_carry_line_numbers() {
    let base = Path::new(".");
    match parse_config("l = 1\n\n# note\nspeed = 3\n", base) {
        Err(Error::Parse { line, message }) => {
            assert_eq!(line, 4);
            assert!(message.contains("speed"));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_config("l = 1\nl = 2\n", base),
        Err(Error::Parse { line: 2, .. })
    ));
    assert!(matches!(
        parse_config("tol = fast\n", base),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(
        parse_config("just words\n", base),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(
        parse_config("boundary = lukewarm\n", base),
        Err(Error::Parse { .. })
    ));
}

#[test]
fn validation_errors_are_aggregated() {
    let text = "moments = 0,1,0; 0,0,0\nfit_k_min = 12\nfit_k_max = 9\nrelaxation = 1.5\n";
    match parse_config(text, Path::new(".")) {
        Err(Error::Validation(problems)) => {
            assert!(problems.iter().any(|p| p.contains("moment 010")));
            assert!(problems.iter().any(|p| p.contains("fit_k_min")));
            assert!(problems.iter().any(|p| p.contains("relaxation")));
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_config(
            "dyadic_k_max = 8\nfit_k_max = 8\nfit_k_min = 6\n",
            Path::new(".")
        ),
        Err(Error::Validation(_))
    ));
    assert!(matches!(
        parse_config("cross_section = tabulated\n", Path::new(".")),
        Err(Error::Validation(_))
    ));
}

#[test]
fn run_export_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let results = run_experiment(&small_config()).unwrap();
    assert!(results.report.is_ok(), "{:?}", results.report.error);
    let files = export_results(&results, dir.path()).unwrap();
    assert_eq!(files.len(), 3);

    let mut rdr = csv::Reader::from_path(dir.path().join(MOMENTS_FILE)).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "x",
            "sigma_000",
            "dsigma_dx_000",
            "sigma_020",
            "dsigma_dx_020"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), results.x.len());
    assert_eq!(&rows[0][2], "NaN");
    assert!(rows[1][2].parse::<f64>().unwrap().is_finite());

    let e1_rows = csv::Reader::from_path(dir.path().join(E1_FILE))
        .unwrap()
        .records()
        .count();
    assert_eq!(e1_rows, 1000);

    let back = read_report(&dir.path().join(REPORT_FILE)).unwrap();
    assert_eq!(back, results.report);
}

#[test]
fn empty_moment_list_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config();
    cfg.moments.clear();
    let results = run_experiment(&cfg).unwrap();
    export_results(&results, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join(MOMENTS_FILE)).unwrap();
    assert_eq!(text, "x\n");
    assert!(results.report.singularities.is_empty());
}

#[test]
fn reports_are_deterministic() {
    let a = run_experiment(&small_config()).unwrap().report;
    let b = run_experiment(&small_config()).unwrap().report;
    let strip = |mut r: boltzslab::cli::Report| {
        r.timestamp.unix_seconds = 0;
        r.timestamp.assembly_seconds = 0.0;
        r.timestamp.solve_seconds = 0.0;
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(strip(a), strip(b));
}

#[test]
fn non_convergence_gives_error_report() {
    let mut cfg = small_config();
    cfg.max_iter = 2;
    cfg.tol = 1e-15;
    let results = run_experiment(&cfg).unwrap();
    assert_eq!(results.report.status, "non_convergence");
    assert!(results.profiles.is_empty() && results.report.constants.is_none());
    let dir = tempfile::tempdir().unwrap();
    write_report(&results.report, &dir.path().join(REPORT_FILE)).unwrap();
    assert!(!read_report(&dir.path().join(REPORT_FILE)).unwrap().is_ok());
}

#[test]
fn bin_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(
        dir.path(),
        "good.conf",
        &format!("{SMALL}output_dir = out\n"),
    );
    let cache = dir.path().join("cache");

    let run = |args: &[&str]| {
        let out = bin()
            .env(CACHE_DIR_ENV, &cache)
            .args(args)
            .output()
            .unwrap();
        (
            out.status.code().unwrap(),
            String::from_utf8_lossy(&out.stdout).into_owned(),
        )
    };

    let (code, stdout) = run(&["solve", good.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    for f in [MOMENTS_FILE, REPORT_FILE, E1_FILE] {
        assert!(dir.path().join("out").join(f).exists(), "{f}");
    }
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let first = read_report(&dir.path().join("out").join(REPORT_FILE)).unwrap();
    assert_eq!(first.timestamp.operator_cache, "miss");

    let alt = dir.path().join("alt");
    assert_eq!(
        run(&[
            "solve",
            good.to_str().unwrap(),
            "--out",
            alt.to_str().unwrap()
        ])
        .0,
        0
    );
    assert_eq!(
        read_report(&alt.join(REPORT_FILE))
            .unwrap()
            .timestamp
            .operator_cache,
        "hit"
    );

    assert_eq!(
        run(&["report", dir.path().join("out").to_str().unwrap()]).0,
        0
    );
    assert_eq!(run(&["report", dir.path().to_str().unwrap()]).0, 1);
    assert_eq!(run(&["validate-e1"]).0, 0);
    assert_eq!(
        run(&[
            "validate-operator",
            good.to_str().unwrap(),
            "--samples",
            "20"
        ])
        .0,
        0
    );

    assert_eq!(
        run(&["solve", dir.path().join("missing.conf").to_str().unwrap()]).0,
        2
    );
    let bad = write_config(dir.path(), "bad.conf", "n_zeta1 = 32\nwhatever = 1\n");
    assert_eq!(run(&["solve", bad.to_str().unwrap()]).0, 2);
    let odd = write_config(dir.path(), "odd.conf", "moments = 0,1,0\n");
    assert_eq!(run(&["solve", odd.to_str().unwrap()]).0, 2);

    let stuck = write_config(
        dir.path(),
        "stuck.conf",
        &format!("{SMALL}max_iter = 2\ntol = 1e-15\noutput_dir = stuck\n"),
    );
    assert_eq!(run(&["solve", stuck.to_str().unwrap()]).0, 1);
    let stuck_dir = dir.path().join("stuck");
    assert!(stuck_dir.join(REPORT_FILE).exists());
    assert!(!stuck_dir.join(MOMENTS_FILE).exists());
}

#[test]
fn shipped_configs_load() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["main.conf", "equilibrium.conf"] {
        let cfg = load_config(&root.join(name)).unwrap();
        cfg.slab_config().unwrap();
    }
}
