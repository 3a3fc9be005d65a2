//! Method-of-steps integration of the modal delay ODEs
//!
//! ```text
//! parabolic-delay         T'  = -mu T(t-h)
//! stable-parabolic-delay  T'  = -mu (T(t) + T(t-h))
//! hyperbolic-delay        T'' = -mu T(t-h)
//! perturbed-hyperbolic    T'' = -mu (T(t) + T(t-h))
//! maxwell-cattaneo        T'' = -T' - mu T
//! ```
//!
//! Classical RK4 on a uniform grid with `h/dt` integer. The delayed value at stage
//! times between grid points comes from cubic Hermite interpolation of the stored
//! `(T, T')` pairs one delay back; on `[-h, 0]` the history is evaluated directly.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rootfinder::spectral_abscissa_window;
use crate::contour::Rect;
use crate::symbols::{FamilyKind, Mode, SymbolFamily};

pub const BLOW_UP: f64 = 1e300;
pub const MIN_STEPS_PER_DELAY: usize = 50;
pub const MAX_DELAYS: f64 = 200.0;
pub const MIN_PEAKS: usize = 10;
pub const RELIABLE_R_SQUARED: f64 = 0.9;

/// Span of `cross_validate` runs, in delays.
pub const CROSS_VALIDATION_DELAYS: f64 = 80.0;
pub const CROSS_VALIDATION_STEPS_PER_DELAY: usize = 100;
pub const CROSS_VALIDATION_WINDOW: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HistoryKind {
    Constant(f64),
    Sinusoid { amplitude: f64, frequency: f64, phase: f64 },
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
}

impl HistoryKind {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            HistoryKind::Constant(c) => *c,
            HistoryKind::Sinusoid { amplitude, frequency, phase } => {
                amplitude * (frequency * t + phase).sin()
            }
            HistoryKind::Polynomial(coeffs) => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        match self {
            HistoryKind::Constant(_) => 0.0,
            HistoryKind::Sinusoid { amplitude, frequency, phase } => {
                amplitude * frequency * (frequency * t + phase).cos()
            }
            HistoryKind::Polynomial(coeffs) => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + i as f64 * c),
        }
    }

    fn scaled(&self, factor: f64) -> HistoryKind {
        match self {
            HistoryKind::Constant(c) => HistoryKind::Constant(c * factor),
            HistoryKind::Sinusoid { amplitude, frequency, phase } => HistoryKind::Sinusoid {
                amplitude: amplitude * factor,
                frequency: *frequency,
                phase: *phase,
            },
            HistoryKind::Polynomial(c) => HistoryKind::Polynomial(c.iter().map(|v| v * factor).collect()),
        }
    }
}

/// Initial history of `T` on `[-h, 0]`, plus the history of `T'` used for the
/// initial velocity of second-order families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistorySpec {
    pub value: HistoryKind,
    pub derivative: HistoryKind,
}

impl HistorySpec {
    pub fn constant(c: f64) -> Self {
        Self { value: HistoryKind::Constant(c), derivative: HistoryKind::Constant(0.0) }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { value: self.value.scaled(factor), derivative: self.derivative.scaled(factor) }
    }

    fn check(&self, h: f64) -> Result<()> {
        let finite = (0..=64).all(|i| {
            let t = -h * f64::from(i) / 64.0;
            self.value.value(t).is_finite()
                && self.value.slope(t).is_finite()
                && self.derivative.value(t).is_finite()
        });
        if finite {
            Ok(())
        } else {
            Err(Error::NonFiniteHistory)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub family: FamilyKind,
    pub n: u64,
    pub h: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `T'` samples; present for second-order families.
    pub derivative_values: Option<Vec<f64>>,
    /// First step index whose value exceeded [`BLOW_UP`]; recording stopped there.
    pub blow_up_index: Option<usize>,
}

impl Trajectory {
    /// Whitespace-delimited `t value [derivative]` lines.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, (t, v)) in self.times.iter().zip(&self.values).enumerate() {
            match &self.derivative_values {
                Some(d) => writeln!(out, "{t:.17e} {v:.17e} {:.17e}", d[i])?,
                None => writeln!(out, "{t:.17e} {v:.17e}")?,
            }
        }
        Ok(())
    }
}

/// Delayed coupling. `Instantaneous` replaces `T(t-h)` by `T(t)`, collapsing the
/// delay ODE to an ordinary one; it exists for checking the integrator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    #[default]
    Delayed,
    Instantaneous,
}

pub fn simulate_mode(
    family: &SymbolFamily,
    mode: &Mode,
    history: &HistorySpec,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    simulate_mode_with(family, mode, history, t_end, dt, Coupling::Delayed)
}

pub fn simulate_mode_with(
    family: &SymbolFamily,
    mode: &Mode,
    history: &HistorySpec,
    t_end: f64,
    dt: f64,
    coupling: Coupling,
) -> Result<Trajectory> {
    let h = family.h;
    let ratio = h / dt;
    let m = ratio.round();
    if !(dt > 0.0) || (ratio - m).abs() > 1e-9 * ratio || (m as usize) < MIN_STEPS_PER_DELAY {
        return Err(Error::GridMismatch { h, dt });
    }
    let m = m as usize;
    if !(t_end > 0.0 && t_end <= MAX_DELAYS * h * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "t_end must lie in (0, {}], got {t_end}",
            MAX_DELAYS * h
        )));
    }
    history.check(h)?;

    let kind = family.kind;
    let mu = mode.mu;
    let steps = (t_end / dt).round() as usize;
    let second_order = kind.order() == 2;

    // y[i] = T(i dt); v[i] = T'(i dt)
    let mut y = Vec::with_capacity(steps + 1);
    let mut v = Vec::with_capacity(steps + 1);
    y.push(history.value.value(0.0));
    let v0 = if second_order { history.derivative.value(0.0) } else { 0.0 };
    v.push(v0);

    let delayed = |y: &[f64], v: &[f64], i: usize, frac: f64| -> f64 {
        // T at (i + frac) dt - h
        if i < m {
            return history.value.value((i as f64 + frac - m as f64) * dt);
        }
        let j = i - m;
        if frac == 0.0 {
            y[j]
        } else if frac == 1.0 {
            y[j + 1]
        } else {
            hermite(y[j], v[j], y[j + 1], v[j + 1], dt, frac)
        }
    };

    // right-hand side: returns (T', T'') for second order or (T', 0) for first order
    let rhs = |state: (f64, f64), d: f64| -> (f64, f64) {
        let (t_val, t_dot) = state;
        match kind {
            FamilyKind::ParabolicDelay => (-mu * d, 0.0),
            FamilyKind::StableParabolicDelay => (-mu * (t_val + d), 0.0),
            FamilyKind::HyperbolicDelay => (t_dot, -mu * d),
            FamilyKind::PerturbedHyperbolic => (t_dot, -mu * (t_val + d)),
            FamilyKind::MaxwellCattaneo => (t_dot, -t_dot - mu * t_val),
        }
    };

    let mut blow_up_index = None;
    // first-order families store T'(t_i) = f(t_i) for interpolation
    if !second_order {
        let d0 = match coupling {
            Coupling::Delayed => delayed(&y, &v, 0, 0.0),
            Coupling::Instantaneous => y[0],
        };
        v[0] = rhs((y[0], 0.0), d0).0;
    }

    for i in 0..steps {
        let (t_val, t_dot) = (y[i], if second_order { v[i] } else { 0.0 });
        let stage_delay = |frac: f64, stage_t: f64| -> f64 {
            match coupling {
                Coupling::Delayed => delayed(&y, &v, i, frac),
                Coupling::Instantaneous => stage_t,
            }
        };

        let k1 = rhs((t_val, t_dot), stage_delay(0.0, t_val));
        let s2 = (t_val + 0.5 * dt * k1.0, t_dot + 0.5 * dt * k1.1);
        let k2 = rhs(s2, stage_delay(0.5, s2.0));
        let s3 = (t_val + 0.5 * dt * k2.0, t_dot + 0.5 * dt * k2.1);
        let k3 = rhs(s3, stage_delay(0.5, s3.0));
        let s4 = (t_val + dt * k3.0, t_dot + dt * k3.1);
        let k4 = rhs(s4, stage_delay(1.0, s4.0));

        let next_val = t_val + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        let next_dot = t_dot + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);

        if !(next_val.abs() <= BLOW_UP && next_dot.abs() <= BLOW_UP) {
            blow_up_index = Some(i + 1);
            break;
        }
        y.push(next_val);
        if second_order {
            v.push(next_dot);
        } else {
            v.push(0.0);
            let d = match coupling {
                Coupling::Delayed => delayed(&y, &v, i + 1, 0.0),
                Coupling::Instantaneous => next_val,
            };
            let last = v.len() - 1;
            v[last] = rhs((next_val, 0.0), d).0;
        }
    }

    let times = (0..y.len()).map(|i| i as f64 * dt).collect();
    Ok(Trajectory {
        family: kind,
        n: mode.n,
        h,
        dt,
        times,
        values: y,
        derivative_values: second_order.then_some(v),
        blow_up_index,
    })
}

/// Cubic Hermite interpolant on `[0, dt]` evaluated at `frac * dt`.
fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, dt: f64, frac: f64) -> f64 {
    let s = frac;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub sigma_hat: f64,
    pub r_squared: f64,
    pub fit_window: (f64, f64),
    pub peaks_used: usize,
}

impl GrowthEstimate {
    pub fn reliable(&self) -> bool {
        self.r_squared >= RELIABLE_R_SQUARED
    }
}

/// Least-squares slope of `ln |peak|` against peak time over the trailing
/// `window_fraction` of the recorded span.
pub fn estimate_growth(traj: &Trajectory, window_fraction: f64) -> Result<GrowthEstimate> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "window_fraction must lie in (0, 1], got {window_fraction}"
        )));
    }
    let (Some(&t0), Some(&t1)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::TooFewPeaks { found: 0, required: MIN_PEAKS });
    };
    let start = t1 - window_fraction * (t1 - t0);

    let a: Vec<f64> = traj.values.iter().map(|v| v.abs()).collect();
    let mut peaks = Vec::new();
    for i in 1..a.len().saturating_sub(1) {
        if traj.times[i] < start {
            continue;
        }
        let (l, c, r) = (a[i - 1], a[i], a[i + 1]);
        if c > l && c >= r && c > 0.0 {
            // vertex of the parabola through the three samples
            let denom = l - 2.0 * c + r;
            let offset = if denom != 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
            let dt = traj.times[i + 1] - traj.times[i];
            let peak = c - 0.25 * (l - r) * offset;
            peaks.push((traj.times[i] + offset * dt, peak.max(c).ln()));
        }
    }
    if peaks.len() < MIN_PEAKS {
        return Err(Error::TooFewPeaks { found: peaks.len(), required: MIN_PEAKS });
    }

    let count = peaks.len() as f64;
    let mean_t = peaks.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = peaks.iter().map(|p| p.1).sum::<f64>() / count;
    let sxx: f64 = peaks.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = peaks.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let syy: f64 = peaks.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };

    Ok(GrowthEstimate {
        sigma_hat: slope,
        r_squared,
        fit_window: (start, t1),
        peaks_used: peaks.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub sigma_hat: f64,
    pub abscissa: Option<f64>,
    /// `|sigma_hat - abscissa| / max(1, |abscissa|)`; `None` without an abscissa.
    pub rel_error: Option<f64>,
    pub growth: GrowthEstimate,
}

/// Simulated growth rate against the largest real part of the roots in `rect`,
/// with history `T = 1` (and `T' = 0`) and `dt = h/100`.
pub fn cross_validate(family: &SymbolFamily, mode: &Mode, rect: &Rect) -> Result<CrossValidation> {
    cross_validate_with(family, mode, rect, family.h / CROSS_VALIDATION_STEPS_PER_DELAY as f64)
}

pub fn cross_validate_with(
    family: &SymbolFamily,
    mode: &Mode,
    rect: &Rect,
    dt: f64,
) -> Result<CrossValidation> {
    let traj = simulate_mode(
        family,
        mode,
        &HistorySpec::constant(1.0),
        CROSS_VALIDATION_DELAYS * family.h,
        dt,
    )?;
    let growth = estimate_growth(&traj, CROSS_VALIDATION_WINDOW)?;
    let abscissa = spectral_abscissa_window(family, mode, rect)?;
    let rel_error = abscissa.map(|a| (growth.sigma_hat - a).abs() / a.abs().max(1.0));
    Ok(CrossValidation { sigma_hat: growth.sigma_hat, abscissa, rel_error, growth })
}
