use std::fs;
use std::path::{Path, PathBuf};

use noma_wpt::cli::run_command;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("noma-wpt").chain(args.iter().copied());
    let code = run_command(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Writes a three-protocol config; `extra` lines replace the defaults for
/// the keys they set.
fn small_config(dir: &Path, extra: &str) -> PathBuf {
    let defaults = [("alpha", "0.1"), ("n_trials", "20000"), ("method", "both")];
    let mut text = String::from(
        "sigma2_sr = 10 dB\nsigma2_sd = 3 dB\nsigma2_rd = 10 dB\nprotocol = ps, ideal, benchmark\nrho = 0.1\nseed = 9\n",
    );
    for (key, value) in defaults {
        if !extra.lines().any(|l| l.trim_start().starts_with(key)) {
            text.push_str(&format!("{key} = {value}\n"));
        }
    }
    text.push_str(extra);
    let path = dir.join("small.conf");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn rate_prints_every_protocol() {
    let cfg = configs().join("strong.conf");
    let (code, out, err) = run(&["rate", "--config", cfg.to_str().unwrap(), "--method", "analytic"]);
    assert_eq!(code, 0, "{err}");
    for name in ["PS(rho=0.1)", "TS(xi=0.1)", "Ideal", "Benchmark"] {
        assert!(out.contains(name), "{out}");
    }
    assert!(!out.contains(" mc "));
}

#[test]
fn rate_routes_agree() {
    let cfg = configs().join("split.conf");
    let cfg = cfg.to_str().unwrap();
    let (_, a, _) = run(&["rate", "--config", cfg, "--c1-route", "density"]);
    let (_, b, _) = run(&["rate", "--config", cfg, "--c1-route", "double"]);
    assert_eq!(a, b);
}

#[test]
fn sweep_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "method = both\n");
    let cfg = cfg.to_str().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let (code, _, err) = run(&["sweep", "--config", cfg, "--grid", "0:30:10", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
    }
    let a = fs::read(&out1).unwrap();
    assert_eq!(a, fs::read(&out2).unwrap());
    let text = String::from_utf8(a).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    let header: Vec<_> = lines[0].split(',').collect();
    assert_eq!(header.len(), 1 + 3 * 3 * 2);
    assert_eq!(header[0], "snr_db");
    assert_eq!(header[1], "ps_rho0.1_mc_c1");
    assert!(lines.iter().all(|l| l.split(',').count() == header.len()));
    assert!(!text.contains('\r'));
}

#[test]
fn sweep_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "method = analytic\n");
    let cfg = cfg.to_str().unwrap();
    let path = dir.path().join("s.csv");
    let (_, stdout, _) = run(&["sweep", "--config", cfg, "--grid", "0:20:10"]);
    run(&["sweep", "--config", cfg, "--grid", "0:20:10", "--out", path.to_str().unwrap()]);
    assert_eq!(stdout, fs::read_to_string(path).unwrap());
}

#[test]
fn svg_has_one_monotone_polyline_per_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "method = analytic\n");
    let cfg = cfg.to_str().unwrap();
    let svg1 = dir.path().join("a.svg");
    let svg2 = dir.path().join("b.svg");
    for svg in [&svg1, &svg2] {
        let (code, _, err) = run(&["sweep", "--config", cfg, "--grid", "0:40:5", "--plot", svg.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
    }
    let text = fs::read_to_string(&svg1).unwrap();
    assert_eq!(text, fs::read_to_string(&svg2).unwrap());
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    let polylines: Vec<_> = text.lines().filter(|l| l.starts_with("<polyline")).collect();
    assert_eq!(polylines.len(), 3);
    for line in polylines {
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        let ys: Vec<f64> = pts
            .split(' ')
            .map(|p| p.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(ys.len(), 9);
        // SVG y grows downwards.
        assert!(ys.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn optimize_reports_rho() {
    let cfg = configs().join("split.conf");
    let (code, out, err) = run(&["optimize", "--config", cfg.to_str().unwrap(), "--which", "rho"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("PS: rho = 0.12"), "{out}");
}

#[test]
fn optimize_snr_is_rejected() {
    let cfg = configs().join("split.conf");
    let (code, _, err) = run(&["optimize", "--config", cfg.to_str().unwrap(), "--which", "snr"]);
    assert_ne!(code, 0);
    assert!(err.contains("monotone"));
}

#[test]
fn unknown_subcommand_fails() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_ne!(code, 0);
    assert!(!err.is_empty());
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "alpha = 0.6\n");
    let (code, _, err) = run(&["rate", "--config", cfg.to_str().unwrap()]);
    assert_ne!(code, 0);
    assert!(err.contains("line 9") && err.contains("alpha < 0.5"), "{err}");
}

#[test]
fn missing_config_fails() {
    let (code, _, err) = run(&["rate", "--config", "/nonexistent/x.conf"]);
    assert_ne!(code, 0);
    assert!(err.contains("/nonexistent/x.conf"));
}

#[test]
fn validate_weak_passes_and_leaves_config_untouched() {
    let cfg = configs().join("weak.conf");
    let before = fs::read(&cfg).unwrap();
    let (code, out, err) = run(&["validate", "--config", cfg.to_str().unwrap(), "--grid", "0:30:15"]);
    assert_eq!(code, 0, "{out}{err}");
    assert!(out.contains("max relative error"));
    assert_eq!(before, fs::read(&cfg).unwrap());
}

#[test]
fn validate_fails_on_impossible_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "n_trials = 1000\n");
    let (code, _, _) = run(&["validate", "--config", cfg.to_str().unwrap(), "--grid", "10", "--threshold", "1e-9"]);
    assert_ne!(code, 0);
}

#[test]
fn empty_table_writes_header_only() {
    use noma_wpt::explore::{Column, ColumnProtocol, MethodTag, SweepTable, SweptParam};
    use noma_wpt::model::{ChannelVariances, EhProtocol, SystemParams};
    let v = ChannelVariances { sr: 1.0, sd: 1.0, rd: 1.0 };
    let t = SweepTable {
        swept: SweptParam::SnrDb,
        columns: vec![Column {
            protocol: ColumnProtocol::Fixed(EhProtocol::Ideal),
            method: MethodTag::Analytic,
        }],
        rows: vec![],
        fixed_params: SystemParams::new(v, 0.1, 0.95, 10.0, EhProtocol::Ideal).unwrap(),
    };
    let mut buf = Vec::new();
    noma_wpt::cli::write_csv(&t, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "snr_db,ideal_analytic_c1,ideal_analytic_c2,ideal_analytic_csum\n");
    assert!(noma_wpt::cli::render_svg(&t).ends_with("</svg>\n"));
}

#[test]
fn empty_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "method = analytic\n");
    let (code, _, _) = run(&["sweep", "--config", cfg.to_str().unwrap(), "--grid", "5:1:1"]);
    assert_ne!(code, 0);
}
