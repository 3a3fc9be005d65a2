use std::path::Path;
use std::process::{Command, Output};

use delay_spectra::asymptotics::{predict_branch, BranchSign};
use delay_spectra::rootfinder::refine_root;
use delay_spectra::{Complex64, FamilyKind, SymbolFamily};
use delay_spectra_cli::report::{fmt_float, SpectrumReport, CSV_HEADER};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delay-spectra")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn column(rows: &[csv::StringRecord], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn maxwell_cattaneo_spectrum_is_closed_form() {
    let o = bin(&["spectrum", "--family", "maxwell-cattaneo", "--n-range", "1:5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 10);
    for r in &rows {
        assert_eq!(&r[3], "-5.0000000000000000e-1");
        assert_eq!(&r[6], "closed_form");
        assert!(r[5].parse::<f64>().unwrap() <= 1e-12);
    }
}

#[test]
fn stable_window_holds_no_roots() {
    let o = bin(&["spectrum", "--family", "stable-parabolic-delay", "--n", "1", "--box", "0.5,40,-200,200"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("{CSV_HEADER}\n"));
}

/// The only zero of `lambda + e^{-lambda}` in the window is `W_0(-1)`; no
/// branch seed falls inside it, since branch k >= 1 sits left of Re = -1.5.
#[test]
fn parabolic_window_near_origin() {
    let o = bin(&["spectrum", "--family", "parabolic-delay", "--n", "1", "--box", "-1,1,0.1,40", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: SpectrumReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.roots.len(), 1);
    let w0 = Complex64::new(-0.31813150520476413, 1.3372357014306895);
    assert!((Complex64::new(report.roots[0].re, report.roots[0].im) - w0).norm() < 1e-12);
    assert!(report.predictions.is_empty());
}

#[test]
fn parabolic_branch_roots_match_predictions() {
    let o = bin(&["spectrum", "--family", "parabolic-delay", "--n", "1", "--box", "-7,-2,28.5,319", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: SpectrumReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.predictions.len(), 46);
    assert_eq!(report.roots.len(), 46);
    let family = SymbolFamily::standard(FamilyKind::ParabolicDelay);
    let mode = family.mode(1).unwrap();
    for k in 5..=50 {
        let p = predict_branch(1, k, BranchSign::Plus).unwrap();
        let z = refine_root(&family, &mode, p.seed(), 1e-12).unwrap().lambda;
        let hits = report
            .roots
            .iter()
            .filter(|r| (Complex64::new(r.re, r.im) - z).norm() < 1e-6)
            .count();
        assert_eq!(hits, 1, "k={k}");
    }
}

#[test]
fn output_is_byte_deterministic() {
    let args = ["spectrum", "--family", "hyperbolic-delay", "--n-range", "1:4", "--box", "-3,2,-30,30"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert!(csv_rows(&stdout(&a)).len() > 8);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_and_csv_carry_the_same_roots() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("report");
    let o = bin(&[
        "spectrum", "--family", "parabolic-delay", "--n-range", "1:3", "--box", "-4,2,-40,40",
        "--format", "both", "--out", stem.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv_text = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let json_text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    let rows = csv_rows(&csv_text);
    let report: SpectrumReport = serde_json::from_str(&json_text).unwrap();
    assert!(!rows.is_empty());
    assert_eq!(rows.len(), report.roots.len());
    for (row, rec) in rows.iter().zip(&report.roots) {
        assert_eq!(&row[0], rec.family);
        assert_eq!(row[1].parse::<u64>().unwrap(), rec.n);
        assert_eq!(&row[2], rec.k.map(|k| k.to_string()).unwrap_or_default());
        assert_eq!(row[3].parse::<f64>().unwrap(), rec.re);
        assert_eq!(row[4].parse::<f64>().unwrap(), rec.im);
        assert_eq!(row[5].parse::<f64>().unwrap(), rec.residual);
        assert_eq!(&row[6], rec.method);
        assert_eq!(row[7].parse::<bool>().unwrap(), rec.certified);
    }
}

#[test]
fn certified_spectrum_carries_margin_in_json() {
    let o = bin(&["spectrum", "--family", "parabolic-delay", "--n-range", "10:1000:log", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: SpectrumReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.roots.len(), 3);
    for r in &report.roots {
        assert!(r.certified);
        assert_eq!(r.method, "certified_rouche");
        assert!(r.rouche_margin.unwrap() > 0.0);
    }
}

#[test]
fn certify_decades_increase() {
    let o = bin(&["certify", "--b", "1", "--n-range", "10:10000:log"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    let x = column(&rows, 1);
    assert!(x.windows(2).all(|p| p[1] > p[0]), "{x:?}");
    assert!(column(&rows, 3).iter().all(|m| *m > 0.0));
}

/// The sampled margin for b = 2 is negative at n = 100, so this exits 2
/// rather than printing a certified row. n = 1000 certifies.
#[test]
fn certify_hyperbolic_small_n_is_refused() {
    let o = bin(&["certify", "--b", "2", "--n", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("MarginNonPositive"));

    let o = bin(&["certify", "--b", "2", "--n", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&o)).len(), 1);
}

#[test]
fn certify_n1_fails_with_margin_detail() {
    let o = bin(&["certify", "--b", "1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("MarginNonPositive"));
}

#[test]
fn asymptote_parabolic_ratio_approaches_one() {
    let o = bin(&["asymptote", "--family", "parabolic-delay", "--n-range", "10:10000:log"]);
    assert_eq!(o.status.code(), Some(0));
    let gaps: Vec<f64> = column(&csv_rows(&stdout(&o)), 3).iter().map(|r| (r - 1.0).abs()).collect();
    assert!(gaps.windows(2).all(|p| p[1] <= p[0]), "{gaps:?}");
}

#[test]
fn asymptote_perturbed_uses_admissible_indices() {
    let o = bin(&["asymptote", "--family", "perturbed-hyperbolic", "--n-range", "50:5000", "--limit", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let ns: Vec<u64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(ns, [64, 70, 89, 108, 114, 133, 152, 158, 177, 196]);
    assert!(rows.iter().all(|r| &r[6] == "true"));
}

#[test]
fn asymptote_hyperbolic_starts_at_six() {
    let o = bin(&["asymptote", "--family", "hyperbolic-delay", "--n-range", "1:8"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(&rows[0][0], "6");
    assert_eq!(rows.len(), 3);
    assert!(stderr(&o).contains("skipped"));
}

fn key_values(text: &str) -> std::collections::HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn simulate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("traj.txt");
    let o = bin(&["simulate", "--family", "parabolic-delay", "--n", "2", "--out", traj.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let kv = key_values(&stdout(&o));
    let sigma: f64 = kv["sigma_hat"].parse().unwrap();
    let abscissa: f64 = kv["abscissa"].parse().unwrap();
    assert!(sigma > 0.0);
    assert!((sigma - abscissa).abs() / abscissa <= 0.05);
    let lines = std::fs::read_to_string(&traj).unwrap();
    assert_eq!(lines.lines().count(), 8001);
    assert_eq!(lines.lines().next().unwrap().split_whitespace().count(), 2);

    let o = bin(&["simulate", "--family", "maxwell-cattaneo", "--n", "1"]);
    let sigma: f64 = key_values(&stdout(&o))["sigma_hat"].parse().unwrap();
    assert!((sigma + 0.5).abs() < 0.025);

    let o = bin(&["simulate", "--family", "stable-parabolic-delay", "--n", "3"]);
    let sigma: f64 = key_values(&stdout(&o))["sigma_hat"].parse().unwrap();
    assert!(sigma < 0.0);
}

#[test]
fn simulate_second_order_writes_three_columns() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("traj.txt");
    let o = bin(&[
        "simulate", "--family", "hyperbolic-delay", "--n", "1", "--history", "sinusoid:1,2,0.3",
        "--history-derivative", "sinusoid:2,2,1.8707963267948966", "--out", traj.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = std::fs::read_to_string(&traj).unwrap();
    let cols: Vec<f64> = first.lines().next().unwrap().split_whitespace().map(|v| v.parse().unwrap()).collect();
    assert_eq!(cols.len(), 3);
    assert_eq!(cols[1], 0.3f64.sin());
}

#[test]
fn stablecheck_verdicts() {
    let o = bin(&["stablecheck", "--n-range", "1:20"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.ends_with("verdict=EMPTY\n"));
    assert_eq!(text.lines().count(), 22);

    let o = bin(&["stablecheck", "--family", "maxwell-cattaneo", "--n-range", "1:20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("verdict=EMPTY\n"));

    let o = bin(&["stablecheck", "--family", "parabolic-delay", "--n", "100", "--disk"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "n,winding\n100,1\nverdict=NONEMPTY\n");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["spectrum", "--family", "nope", "--n", "1"][..],
        &["spectrum", "--family", "maxwell-cattaneo"],
        &["spectrum", "--family", "maxwell-cattaneo", "--n", "1", "--n-range", "1:2"],
        &["spectrum", "--family", "parabolic-delay", "--n", "1", "--box", "1,2,3"],
        &["spectrum", "--family", "perturbed-hyperbolic", "--n", "1"],
        &["certify", "--b", "3", "--n", "10"],
        &["certify", "--b", "1", "--n-range", "5:1"],
        &["asymptote", "--family", "maxwell-cattaneo", "--n", "10"],
        &["simulate", "--family", "parabolic-delay", "--n", "1", "--dt", "0.3"],
        &["simulate", "--family", "parabolic-delay", "--n", "1", "--history", "spline:1"],
        &["frobnicate"],
    ] {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    let o = bin(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn numeric_failure_exits_three() {
    // Too short to collect ten envelope peaks.
    let o = bin(&["simulate", "--family", "maxwell-cattaneo", "--n", "1", "--t-end", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("TooFewPeaks"));

    // Re(lambda) h beyond the overflow guard on the box edge.
    let o = bin(&["spectrum", "--family", "parabolic-delay", "--n", "1", "--box", "-800,1,-1,1"]);
    assert_eq!(o.status.code(), Some(3));
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.conf");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn config_presets_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "# looser tolerance\ntol = 1e-10\n");
    let o = bin(&["--config", &cfg, "spectrum", "--family", "maxwell-cattaneo", "--n", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: SpectrumReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.meta.settings["tol"], fmt_float(1e-10));
    assert_eq!(report.meta.settings["config"], cfg);

    let o = bin(&[
        "spectrum", "--config", &cfg, "--family", "maxwell-cattaneo", "--n", "1", "--tol", "1e-11",
        "--format", "json",
    ]);
    let report: SpectrumReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.meta.settings["tol"], fmt_float(1e-11));

    let bad = write_config(dir.path(), "colour = blue\n");
    let o = bin(&["--config", &bad, "spectrum", "--family", "maxwell-cattaneo", "--n", "1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = bin(&["--config", "/nonexistent/run.conf", "certify", "--b", "1", "--n", "10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_sets_simulation_window() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t_end = 60\nwindow_fraction = 0.5\n");
    let o = bin(&["--config", &cfg, "simulate", "--family", "parabolic-delay", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let kv = key_values(&stdout(&o));
    assert_eq!(kv["t_end"], fmt_float(60.0));
    assert_eq!(kv["window_fraction"], fmt_float(0.5));
    assert_eq!(kv["samples"], "6001");
}
