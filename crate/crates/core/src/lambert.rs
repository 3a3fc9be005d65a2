//! Real solutions of `x e^x = t` and `x^2 e^x = t` on `x >= 0`.
//!
//! For `t >= e` both are solved in logarithmic form (`x + ln x = ln t`,
//! `x + 2 ln x = ln t`), which never forms `e^x`. Newton steps are kept inside a
//! sign bracket and replaced by bisection whenever they leave it.

use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_ITERATIONS: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambertSolution {
    pub x: f64,
    pub t: f64,
    /// `|x^p e^x - t| / max(1, t)` in the original (non-log) form.
    pub residual: f64,
    pub iterations: u32,
}

/// Unique `x >= 0` with `x e^x = t`.
pub fn solve_xexp(t: f64) -> Result<LambertSolution> {
    solve(t, 1)
}

/// Unique `x >= 0` with `x^2 e^x = t`.
pub fn solve_x2exp(t: f64) -> Result<LambertSolution> {
    solve(t, 2)
}

/// Leading-order large-`t` behaviour of the `x e^x = t` root: `ln t - ln ln t`.
pub fn phi_asymptotic(t: f64) -> Result<f64> {
    if !(t > E) {
        return Err(Error::Domain(format!("phi_asymptotic needs t > e, got {t}")));
    }
    let lt = t.ln();
    Ok(lt - lt.ln())
}

fn solve(t: f64, power: i32) -> Result<LambertSolution> {
    if !t.is_finite() {
        return Err(Error::NonFinite(format!("Lambert argument t = {t}")));
    }
    if t < 0.0 {
        return Err(Error::Domain(format!("Lambert argument must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(LambertSolution { x: 0.0, t, residual: 0.0, iterations: 0 });
    }
    let p = f64::from(power);

    // g is increasing on the bracket; g(lo) <= 0 <= g(hi).
    let (mut lo, mut hi, g, dg): (f64, f64, Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>) =
        if t >= E {
            let lt = t.ln();
            (
                1.0,
                lt.max(1.0),
                Box::new(move |x: f64| x + p * x.ln() - lt),
                Box::new(move |x: f64| 1.0 + p / x),
            )
        } else {
            (
                0.0,
                1.0,
                Box::new(move |x: f64| x.powi(power) * x.exp() - t),
                Box::new(move |x: f64| (p * x.powi(power - 1) + x.powi(power)) * x.exp()),
            )
        };

    let mut x = if t > E * E {
        let lt = t.ln();
        (lt - p * lt.ln()).clamp(lo, hi)
    } else if power == 1 {
        t / (1.0 + t)
    } else {
        (t / (1.0 + t)).sqrt()
    };
    x = x.clamp(lo, hi);

    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let gx = g(x);
        if gx == 0.0 {
            break;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = dg(x);
        let newton = x - gx / slope;
        let next = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let converged = (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
        x = next;
        if converged || hi - lo <= f64::EPSILON * hi {
            break;
        }
    }

    let residual = (x.powi(power) * x.exp() - t).abs() / t.max(1.0);
    Ok(LambertSolution { x, t, residual, iterations })
}
