//! Subcommand definitions and their implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use delay_spectra::asymptotics::{
    admissible_indices, find_perturbed_root, mc_roots, predict_branch, predict_hyperbolic,
    predict_parabolic, predict_perturbed, AsymptoticPrediction, BranchSign,
};
use delay_spectra::integrator::{
    estimate_growth, simulate_mode, HistoryKind, HistorySpec, CROSS_VALIDATION_DELAYS,
    CROSS_VALIDATION_STEPS_PER_DELAY, CROSS_VALIDATION_WINDOW,
};
use delay_spectra::rootfinder::{
    certify_unstable_with, find_roots, log_form_center, log_form_root, spectral_abscissa_window,
    winding_number_perturbed, DEFAULT_TOL,
};
use delay_spectra::{
    Complex64, Contour, Error, FamilyKind, Mode, Rect, Root, RootMethod, SymbolFamily,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::report::{fmt_float, PredictionRecord, ReportMeta, RootRecord, SpectrumReport};
use crate::settings::{parse_box, parse_n_range, Config};
use crate::{CliError, EXIT_CERTIFICATION, EXIT_OK};

const DEFAULT_MARGIN_SAMPLES: f64 = 4096.0;
const DEFAULT_SIMULATION_BOX: &str = "-5,10,-50,50";
const DEFAULT_STABLE_BOX: &str = "0.5,40,-200,200";

#[derive(Debug, Parser)]
#[command(name = "delay-spectra", version, about = "Spectra of delay-coupled mode equations")]
pub struct Cli {
    /// key=value file presetting tolerances; explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of one family per mode, as CSV and/or JSON.
    Spectrum(SpectrumArgs),
    /// Rouche certification of the unstable root.
    Certify(CertifyArgs),
    /// Located roots against the leading-order asymptotics.
    Asymptote(AsymptoteArgs),
    /// Integrate one mode and estimate its growth rate.
    Simulate(SimulateArgs),
    /// Check that a window of the right half-plane holds no roots.
    Stablecheck(StablecheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ModeSelect {
    #[arg(long)]
    pub n: Option<u64>,
    /// `a:b` inclusive, or `a:b:log` for a, 10a, 100a, ...
    #[arg(long, value_name = "RANGE")]
    pub n_range: Option<String>,
}

impl ModeSelect {
    fn values(&self) -> Result<Vec<u64>, CliError> {
        match (&self.n, &self.n_range) {
            (Some(0), _) => Err(CliError::Usage("--n must be >= 1".into())),
            (Some(n), _) => Ok(vec![*n]),
            (None, Some(r)) => parse_n_range(r),
            (None, None) => Err(CliError::Usage("one of --n or --n-range is required".into())),
        }
    }

    fn describe(&self) -> String {
        match (&self.n, &self.n_range) {
            (Some(n), _) => n.to_string(),
            (None, Some(r)) => r.clone(),
            (None, None) => String::new(),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file. With `--format both`, `.csv` and `.json` are appended.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub family: FamilyKind,
    #[command(flatten)]
    pub modes: ModeSelect,
    /// x_min,x_max,y_min,y_max
    #[arg(long = "box", value_name = "BOX", allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// 1 for the parabolic delay family, 2 for the hyperbolic one.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub b: u8,
    #[command(flatten)]
    pub modes: ModeSelect,
    #[arg(long)]
    pub margin_samples: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AsymptoteArgs {
    #[arg(long)]
    pub family: FamilyKind,
    #[command(flatten)]
    pub modes: ModeSelect,
    /// Keep at most this many rows (after admissibility filtering).
    #[arg(long)]
    pub limit: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub family: FamilyKind,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Defaults to 80 delays.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Defaults to h/100.
    #[arg(long)]
    pub dt: Option<f64>,
    /// constant:c | sinusoid:a,f,p | poly:c0,c1,...
    #[arg(long, default_value = "constant:1", allow_hyphen_values = true)]
    pub history: String,
    /// History of T' for second-order families.
    #[arg(long, default_value = "constant:0", allow_hyphen_values = true)]
    pub history_derivative: String,
    #[arg(long)]
    pub window_fraction: Option<f64>,
    /// Window searched for the spectral abscissa.
    #[arg(long = "box", value_name = "BOX", default_value = DEFAULT_SIMULATION_BOX, allow_hyphen_values = true)]
    pub window: String,
    /// Trajectory file (`t value [derivative]` per line).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StablecheckArgs {
    #[arg(long, default_value = "stable-parabolic-delay")]
    pub family: FamilyKind,
    #[command(flatten)]
    pub modes: ModeSelect,
    #[arg(long = "box", value_name = "BOX", default_value = DEFAULT_STABLE_BOX, allow_hyphen_values = true)]
    pub window: String,
    /// Use the certification disk |lambda - w| < |w|/2 instead of the box.
    #[arg(long, conflicts_with = "window")]
    pub disk: bool,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, &config, stdout, stderr),
        Command::Certify(a) => cmd_certify(a, &config, stdout, stderr),
        Command::Asymptote(a) => cmd_asymptote(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, &config, stdout),
        Command::Stablecheck(a) => cmd_stablecheck(a, &config, stdout),
    }
}

fn build_family(
    kind: FamilyKind,
    h: Option<f64>,
    theta: Option<f64>,
    config: &Config,
) -> Result<SymbolFamily, CliError> {
    let h = config.resolve("h", h, 1.0);
    let theta = config.resolve("theta", theta, 2.0);
    SymbolFamily::new(kind, h, theta).map_err(|e| CliError::Usage(e.to_string()))
}

fn is_certification(e: &Error) -> bool {
    matches!(e, Error::MarginNonPositive { .. } | Error::WindingMismatch { .. })
}

fn write_target(out: Option<&Path>, suffix: Option<&str>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let path = match suffix {
                Some(ext) => {
                    let mut s = path.as_os_str().to_owned();
                    s.push(ext);
                    PathBuf::from(s)
                }
                None => path.to_path_buf(),
            };
            std::fs::write(path, text)?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit(output: &OutputArgs, csv: &str, json: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let out = output.out.as_deref();
    match output.format {
        Format::Csv => write_target(out, None, csv, stdout),
        Format::Json => write_target(out, None, json, stdout),
        Format::Both => {
            write_target(out, Some(".csv"), csv, stdout)?;
            write_target(out, Some(".json"), json, stdout)
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("rows are always serializable");
    s.push('\n');
    s
}

fn closed_form_roots(family: &SymbolFamily, mode: &Mode) -> Result<Vec<Root>, Error> {
    let (upper, lower) = mc_roots(mode.n)?;
    [lower, upper]
        .into_iter()
        .map(|lambda| {
            Ok(Root {
                family: *family,
                n: mode.n,
                k: None,
                lambda,
                residual: family.relative_residual(mode, lambda)?,
                method: RootMethod::ClosedForm,
                certified: false,
                rouche_margin: None,
            })
        })
        .collect()
}

fn unstable_b(kind: FamilyKind) -> Option<u8> {
    match kind {
        FamilyKind::ParabolicDelay => Some(1),
        FamilyKind::HyperbolicDelay => Some(2),
        _ => None,
    }
}

fn predictions_for(family: &SymbolFamily, n: u64, window: Option<&Rect>) -> Vec<AsymptoticPrediction> {
    if *family != SymbolFamily::standard(family.kind) {
        return Vec::new();
    }
    let mut preds = Vec::new();
    match family.kind {
        FamilyKind::ParabolicDelay => {
            if let Ok(p) = predict_parabolic(n) {
                preds.push(p);
            }
            if let Some(r) = window {
                let reach = r.y_min.abs().max(r.y_max.abs());
                let k_max = (reach / std::f64::consts::TAU).ceil() as i64 + 1;
                for k in 1..=k_max {
                    for sign in [BranchSign::Minus, BranchSign::Plus] {
                        if let Ok(p) = predict_branch(n, k, sign) {
                            preds.push(p);
                        }
                    }
                }
            }
        }
        FamilyKind::HyperbolicDelay => {
            if let Ok(p) = predict_hyperbolic(n) {
                preds.push(p);
            }
        }
        _ => {}
    }
    if let Some(r) = window {
        preds.retain(|p| r.contains(p.seed()));
    }
    preds
}

fn cmd_spectrum(
    a: &SpectrumArgs,
    config: &Config,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let family = build_family(a.family, a.h, a.theta, config)?;
    let ns = a.modes.values()?;
    let window = a.window.as_deref().map(parse_box).transpose()?;
    let tol = config.resolve("tol", a.tol, DEFAULT_TOL);
    let margin_samples = config.resolve("margin_samples", None, DEFAULT_MARGIN_SAMPLES) as usize;

    let b = unstable_b(family.kind);
    if window.is_none() {
        let certifiable = b.is_some() && family == SymbolFamily::standard(family.kind);
        if family.kind != FamilyKind::MaxwellCattaneo && !certifiable {
            return Err(CliError::Usage(format!(
                "--box is required for {} unless h = 1 and theta = 2 with a certifiable family",
                family.kind
            )));
        }
    }

    let results: Vec<Result<Vec<Root>, Error>> = ns
        .par_iter()
        .map(|&n| {
            let mode = family.mode(n)?;
            match (&window, family.kind) {
                (Some(r), _) => find_roots(&family, &mode, r, tol),
                (None, FamilyKind::MaxwellCattaneo) => closed_form_roots(&family, &mode),
                (None, _) => certify_unstable_with(b.expect("checked above"), &mode, margin_samples)
                    .map(|r| vec![r]),
            }
        })
        .collect();

    let mut roots = Vec::new();
    let mut code = EXIT_OK;
    for (n, res) in ns.iter().zip(results) {
        match res {
            Ok(rs) => roots.extend(rs.iter().map(RootRecord::from)),
            Err(e) if is_certification(&e) => {
                writeln!(stderr, "n={n}: {e} ({e:?})")?;
                code = EXIT_CERTIFICATION;
            }
            Err(e) => return Err(CliError::Numeric(e)),
        }
    }
    let predictions = ns
        .iter()
        .flat_map(|&n| predictions_for(&family, n, window.as_ref()))
        .map(|p| PredictionRecord::from(&p))
        .collect();

    let mut settings = BTreeMap::from([
        ("n".to_string(), a.modes.describe()),
        ("tol".to_string(), fmt_float(tol)),
        ("margin_samples".to_string(), margin_samples.to_string()),
    ]);
    if let Some(r) = &window {
        let spec = [r.x_min, r.x_max, r.y_min, r.y_max].map(fmt_float).join(",");
        settings.insert("box".to_string(), spec);
    }
    if let Some(path) = &config.source {
        settings.insert("config".to_string(), path.display().to_string());
    }
    let meta = ReportMeta {
        tool: "delay-spectra".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "spectrum".into(),
        family: family.kind.token().into(),
        h: family.h,
        theta: family.theta,
        settings,
    };
    let report = SpectrumReport::new(meta, roots, predictions);
    emit(&a.output, &report.to_csv(), &report.to_json(), stdout)?;
    Ok(code)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyRow {
    pub n: u64,
    pub x_n: f64,
    pub y_n: f64,
    pub margin: f64,
    pub residual: f64,
}

pub const CERTIFY_HEADER: &str = "n,x_n,y_n,margin,residual";

fn cmd_certify(
    a: &CertifyArgs,
    config: &Config,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let ns = a.modes.values()?;
    let samples = config.resolve("margin_samples", a.margin_samples.map(|s| s as f64), DEFAULT_MARGIN_SAMPLES);
    let samples = samples as usize;
    let family = SymbolFamily::standard(if a.b == 1 {
        FamilyKind::ParabolicDelay
    } else {
        FamilyKind::HyperbolicDelay
    });

    let results: Vec<Result<Root, Error>> = ns
        .par_iter()
        .map(|&n| certify_unstable_with(a.b, &family.mode(n)?, samples))
        .collect();

    let mut rows = Vec::new();
    let mut code = EXIT_OK;
    for (n, res) in ns.iter().zip(results) {
        match res {
            Ok(root) => rows.push(CertifyRow {
                n: *n,
                x_n: root.lambda.re,
                y_n: root.lambda.im,
                margin: root.rouche_margin.unwrap_or(f64::NAN),
                residual: root.residual,
            }),
            Err(e) if is_certification(&e) => {
                writeln!(stderr, "n={n}: {e} ({e:?})")?;
                code = EXIT_CERTIFICATION;
            }
            Err(e) => return Err(CliError::Numeric(e)),
        }
    }

    let mut csv = format!("{CERTIFY_HEADER}\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.n,
            fmt_float(r.x_n),
            fmt_float(r.y_n),
            fmt_float(r.margin),
            fmt_float(r.residual)
        );
    }
    emit(&a.output, &csv, &to_json(&rows), stdout)?;
    Ok(code)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoteRow {
    pub n: u64,
    pub x_pred: f64,
    pub x_found: f64,
    pub ratio: f64,
    pub abs_gap: f64,
    pub y_found: f64,
    /// Whether `y_found` lies in `(n, n+1)`; only meaningful for the perturbed family.
    pub in_bracket: Option<bool>,
}

pub const ASYMPTOTE_HEADER: &str = "n,x_pred,x_found,ratio,abs_gap,y_found,in_bracket";

impl AsymptoteRow {
    fn new(n: u64, x_pred: f64, found: Complex64, in_bracket: Option<bool>) -> Self {
        Self {
            n,
            x_pred,
            x_found: found.re,
            ratio: found.re / x_pred,
            abs_gap: (found.re - x_pred).abs(),
            y_found: found.im,
            in_bracket,
        }
    }
}

/// The unstable root, certified when the margin allows and otherwise taken
/// from the uncertified log-form solve.
fn unstable_root(b: u8, mode: &Mode) -> Result<Root, Error> {
    match certify_unstable_with(b, mode, DEFAULT_MARGIN_SAMPLES as usize) {
        Err(e) if is_certification(&e) => log_form_root(b, mode).map(|(r, _)| r),
        other => other,
    }
}

fn cmd_asymptote(a: &AsymptoteArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let requested = a.modes.values()?;
    let min_n = match a.family {
        FamilyKind::ParabolicDelay => 2,
        FamilyKind::HyperbolicDelay => 6,
        FamilyKind::PerturbedHyperbolic => 3,
        other => {
            return Err(CliError::Usage(format!("no asymptotic prediction for family {other}")));
        }
    };
    let mut ns: Vec<u64> = requested.iter().copied().filter(|&n| n >= min_n).collect();
    if ns.len() < requested.len() {
        writeln!(stderr, "note: skipped n < {min_n} (outside the prediction's domain)")?;
    }
    if a.family == FamilyKind::PerturbedHyperbolic {
        let max = ns.last().copied().unwrap_or(0);
        let admissible: std::collections::BTreeSet<u64> =
            admissible_indices(max).into_iter().map(|i| i.n).collect();
        ns.retain(|n| admissible.contains(n));
    }
    if let Some(limit) = a.limit {
        ns.truncate(limit);
    }
    if ns.is_empty() {
        return Err(CliError::Usage("no admissible n in the requested range".into()));
    }

    let family = SymbolFamily::standard(a.family);
    let rows: Vec<Result<AsymptoteRow, Error>> = ns
        .par_iter()
        .map(|&n| match a.family {
            FamilyKind::ParabolicDelay => {
                let p = predict_parabolic(n)?;
                let root = unstable_root(1, &family.mode(n)?)?;
                Ok(AsymptoteRow::new(n, p.x_pred, root.lambda, None))
            }
            FamilyKind::HyperbolicDelay => {
                let p = predict_hyperbolic(n)?;
                let root = unstable_root(2, &family.mode(n)?)?;
                Ok(AsymptoteRow::new(n, p.x_pred, root.lambda, None))
            }
            _ => {
                let index = delay_spectra::asymptotics::AdmissibleIndex::new(n)
                    .ok_or_else(|| Error::Domain(format!("n = {n} is not admissible")))?;
                let root = find_perturbed_root(&index)?;
                let y = root.lambda.im;
                let inside = y > n as f64 && y < (n + 1) as f64;
                Ok(AsymptoteRow::new(n, predict_perturbed(n)?, root.lambda, Some(inside)))
            }
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut csv = format!("{ASYMPTOTE_HEADER}\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.n,
            fmt_float(r.x_pred),
            fmt_float(r.x_found),
            fmt_float(r.ratio),
            fmt_float(r.abs_gap),
            fmt_float(r.y_found),
            r.in_bracket.map(|b| b.to_string()).unwrap_or_default()
        );
    }
    emit(&a.output, &csv, &to_json(&rows), stdout)?;
    Ok(EXIT_OK)
}

/// `constant:c`, `sinusoid:a,f,p` or `poly:c0,c1,...`.
pub fn parse_history(spec: &str) -> Result<HistoryKind, CliError> {
    let bad = || CliError::Usage(format!("bad history `{spec}`"));
    let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
    let vals: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match (kind, vals.as_slice()) {
        ("constant", [c]) => Ok(HistoryKind::Constant(*c)),
        ("sinusoid", [amplitude, frequency, phase]) => Ok(HistoryKind::Sinusoid {
            amplitude: *amplitude,
            frequency: *frequency,
            phase: *phase,
        }),
        ("poly", coeffs) if !coeffs.is_empty() => Ok(HistoryKind::Polynomial(coeffs.to_vec())),
        _ => Err(bad()),
    }
}

fn cmd_simulate(a: &SimulateArgs, config: &Config, stdout: &mut dyn Write) -> Result<i32, CliError> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be >= 1".into()));
    }
    let family = build_family(a.family, a.h, a.theta, config)?;
    let mode = family.mode(a.n)?;
    let t_end = config.resolve("t_end", a.t_end, CROSS_VALIDATION_DELAYS * family.h);
    let dt = config.resolve("dt", a.dt, family.h / CROSS_VALIDATION_STEPS_PER_DELAY as f64);
    let window_fraction = config.resolve("window_fraction", a.window_fraction, CROSS_VALIDATION_WINDOW);
    let rect = parse_box(&a.window)?;
    let history = HistorySpec {
        value: parse_history(&a.history)?,
        derivative: parse_history(&a.history_derivative)?,
    };

    let traj = simulate_mode(&family, &mode, &history, t_end, dt).map_err(|e| match e {
        Error::GridMismatch { .. } | Error::InvalidParameter(_) | Error::NonFiniteHistory => {
            CliError::Usage(e.to_string())
        }
        e => CliError::Numeric(e),
    })?;
    if let Some(path) = &a.out {
        let file = std::fs::File::create(path)?;
        traj.write_text(std::io::BufWriter::new(file))?;
    }
    let growth = estimate_growth(&traj, window_fraction)?;
    let abscissa = spectral_abscissa_window(&family, &mode, &rect)?;

    let mut text = String::new();
    let _ = writeln!(text, "family={}", family.kind);
    let _ = writeln!(text, "n={}", a.n);
    let _ = writeln!(text, "h={}", fmt_float(family.h));
    let _ = writeln!(text, "theta={}", fmt_float(family.theta));
    let _ = writeln!(text, "t_end={}", fmt_float(t_end));
    let _ = writeln!(text, "dt={}", fmt_float(dt));
    let _ = writeln!(text, "window_fraction={}", fmt_float(window_fraction));
    let _ = writeln!(text, "samples={}", traj.values.len());
    let _ = writeln!(
        text,
        "blow_up_index={}",
        traj.blow_up_index.map(|i| i.to_string()).unwrap_or_else(|| "none".into())
    );
    let _ = writeln!(text, "sigma_hat={}", fmt_float(growth.sigma_hat));
    let _ = writeln!(text, "r_squared={}", fmt_float(growth.r_squared));
    let _ = writeln!(text, "peaks_used={}", growth.peaks_used);
    let _ = writeln!(text, "reliable={}", growth.reliable());
    match abscissa {
        Some(x) => {
            let _ = writeln!(text, "abscissa={}", fmt_float(x));
            let rel = (growth.sigma_hat - x).abs() / x.abs().max(1.0);
            let _ = writeln!(text, "rel_error={}", fmt_float(rel));
        }
        None => {
            let _ = writeln!(text, "abscissa=none");
            let _ = writeln!(text, "rel_error=none");
        }
    }
    stdout.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_stablecheck(a: &StablecheckArgs, config: &Config, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let family = build_family(a.family, a.h, a.theta, config)?;
    let ns = a.modes.values()?;
    let rect = parse_box(&a.window)?;
    let samples = config.resolve("boundary_samples", None, delay_spectra::contour::DEFAULT_BOUNDARY_SAMPLES as f64);
    let samples = samples as usize;

    let counts: Vec<Result<i64, Error>> = ns
        .par_iter()
        .map(|&n| {
            let mode = family.mode(n)?;
            let contour = if a.disk {
                let w = log_form_center(&mode);
                Contour::circle(w, 0.5 * w.norm())?
            } else {
                Contour::rectangle(rect)
            };
            let (_, count) = winding_number_perturbed(&family, &mode, &contour.with_samples(samples)?)?;
            Ok(count)
        })
        .collect();
    let counts = counts.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut text = String::from("n,winding\n");
    for (n, c) in ns.iter().zip(&counts) {
        let _ = writeln!(text, "{n},{c}");
    }
    let empty = counts.iter().all(|&c| c == 0);
    let _ = writeln!(text, "verdict={}", if empty { "EMPTY" } else { "NONEMPTY" });
    stdout.write_all(text.as_bytes())?;
    Ok(if empty { EXIT_OK } else { EXIT_CERTIFICATION })
}
