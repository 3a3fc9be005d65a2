//! Flag parsing helpers and the `key=value` config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use delay_spectra::Rect;

use crate::CliError;

/// `a:b` (inclusive, linear) or `a:b:log` (a, 10a, 100a, ... up to b).
pub fn parse_n_range(spec: &str) -> Result<Vec<u64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || CliError::Usage(format!("bad --n-range `{spec}`; expected a:b or a:b:log"));
    let (a, b, log) = match parts.as_slice() {
        [a, b] => (a, b, false),
        [a, b, "log"] => (a, b, true),
        _ => return Err(bad()),
    };
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    if !log {
        return Ok((a..=b).collect());
    }
    let mut out = Vec::new();
    let mut n = a;
    while n <= b {
        out.push(n);
        match n.checked_mul(10) {
            Some(next) => n = next,
            None => break,
        }
    }
    Ok(out)
}

pub fn parse_box(spec: &str) -> Result<Rect, CliError> {
    let vals: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("bad --box `{spec}`; expected x_min,x_max,y_min,y_max")))?;
    let [x0, x1, y0, y1] = vals[..] else {
        return Err(CliError::Usage(format!("--box needs four numbers, got `{spec}`")));
    };
    Rect::new(x0, x1, y0, y1).map_err(|e| CliError::Usage(e.to_string()))
}

/// Tolerances and numeric knobs a config file may preset.
pub const CONFIG_KEYS: [&str; 8] =
    ["tol", "boundary_samples", "margin_samples", "window_fraction", "dt", "t_end", "theta", "h"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, f64>,
    pub source: Option<PathBuf>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", lineno + 1)));
            }
            let value: f64 = value.trim().parse().map_err(|_| {
                CliError::Usage(format!("config line {}: `{}` is not a number", lineno + 1, value.trim()))
            })?;
            values.insert(key.to_string(), value);
        }
        Ok(Self { values, source: None })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.source = Some(path.to_path_buf());
        Ok(cfg)
    }

    /// Flag value if given, else config value, else `default`.
    pub fn resolve(&self, key: &str, flag: Option<f64>, default: f64) -> f64 {
        flag.or_else(|| self.values.get(key).copied()).unwrap_or(default)
    }
}
