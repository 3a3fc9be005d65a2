//! Closed contours and argument-principle zero counting.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_BOUNDARY_SAMPLES: usize = 64;
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 256;

/// Relative guard band: the boundary must keep `|F| > GUARD * scale`.
pub const GUARD: f64 = 1e-8;

/// Maximum number of halvings of a single boundary segment.
const MAX_SEGMENT_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let all_finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !all_finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidParameter(format!(
                "rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}] has no interior"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re > self.x_min && z.re < self.x_max && z.im > self.y_min && z.im < self.y_max
    }

    /// Same center, half-widths multiplied by `factor`.
    pub fn dilate(&self, factor: f64) -> Rect {
        let c = self.center();
        let hw = 0.5 * self.width() * factor;
        let hh = 0.5 * self.height() * factor;
        Rect { x_min: c.re - hw, x_max: c.re + hw, y_min: c.im - hh, y_max: c.im + hh }
    }

    /// Split at fractions `fx`, `fy` of the width and height, returning
    /// (lower-left, lower-right, upper-left, upper-right).
    pub fn quadrisect(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.x_min + fx * self.width();
        let ym = self.y_min + fy * self.height();
        [
            Rect { x_max: xm, y_max: ym, ..*self },
            Rect { x_min: xm, y_max: ym, ..*self },
            Rect { x_max: xm, y_min: ym, ..*self },
            Rect { x_min: xm, y_min: ym, ..*self },
        ]
    }

    fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x_min, self.y_min),
            Complex64::new(self.x_max, self.y_min),
            Complex64::new(self.x_max, self.y_max),
            Complex64::new(self.x_min, self.y_max),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Rectangle(Rect),
    Circle { center: Complex64, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub shape: Shape,
    pub boundary_samples: usize,
}

impl Contour {
    pub fn rectangle(rect: Rect) -> Self {
        Self { shape: Shape::Rectangle(rect), boundary_samples: DEFAULT_BOUNDARY_SAMPLES }
    }

    pub fn circle(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || !(center.re.is_finite() && center.im.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "circle center {center} radius {radius} has no interior"
            )));
        }
        Ok(Self {
            shape: Shape::Circle { center, radius },
            boundary_samples: DEFAULT_BOUNDARY_SAMPLES,
        })
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self> {
        if samples < MIN_BOUNDARY_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "boundary_samples must be >= {MIN_BOUNDARY_SAMPLES}, got {samples}"
            )));
        }
        self.boundary_samples = samples;
        Ok(self)
    }

    pub fn dilate(&self, factor: f64) -> Self {
        let shape = match self.shape {
            Shape::Rectangle(r) => Shape::Rectangle(r.dilate(factor)),
            Shape::Circle { center, radius } => Shape::Circle { center, radius: radius * factor },
        };
        Self { shape, ..*self }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self.shape {
            Shape::Rectangle(r) => r.contains(z),
            Shape::Circle { center, radius } => (z - center).norm() < radius,
        }
    }

    /// Positively oriented boundary point at parameter `s` in `[0, 1)`.
    fn point(&self, s: f64) -> Complex64 {
        match self.shape {
            Shape::Circle { center, radius } => center + Complex64::from_polar(radius, TAU * s),
            Shape::Rectangle(r) => {
                let (w, h) = (r.width(), r.height());
                let mut d = s * r.perimeter();
                let c = r.corners();
                for (i, len) in [w, h, w, h].into_iter().enumerate() {
                    if d <= len {
                        let dir = (c[(i + 1) % 4] - c[i]) / len;
                        return c[i] + dir * d;
                    }
                    d -= len;
                }
                c[0]
            }
        }
    }

    /// Initial parameter grid: at least `boundary_samples` points, rectangle corners
    /// included, spacing no coarser than `max_spacing` along the boundary.
    fn initial_parameters(&self, max_spacing: f64) -> Vec<f64> {
        match self.shape {
            Shape::Circle { radius, .. } => {
                let by_length = (TAU * radius / max_spacing).ceil() as usize;
                let n = self.boundary_samples.max(by_length);
                (0..n).map(|i| i as f64 / n as f64).collect()
            }
            Shape::Rectangle(r) => {
                let p = r.perimeter();
                let mut params = Vec::new();
                let mut start = 0.0;
                for len in [r.width(), r.height(), r.width(), r.height()] {
                    let by_share = (self.boundary_samples as f64 * len / p).ceil() as usize;
                    let by_length = (len / max_spacing).ceil() as usize;
                    let n = by_share.max(by_length).max(4);
                    for i in 0..n {
                        params.push((start + len * i as f64 / n as f64) / p);
                    }
                    start += len;
                }
                params
            }
        }
    }
}

/// Number of zeros of `f` inside `contour`, counted with multiplicity.
///
/// The boundary is tracked by summing principal phase increments of `f` between
/// consecutive samples; any segment whose increment reaches `pi/2` is halved until
/// none does. `scale(z)` sets the guard band `|f(z)| > GUARD * scale(z)`.
pub fn count_zeros<F, S>(f: F, scale: S, contour: &Contour, max_spacing: f64) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
    S: Fn(Complex64) -> f64,
{
    let sample = |s: f64| -> Result<(f64, Complex64)> {
        let z = contour.point(s);
        let v = f(z)?;
        let guard = GUARD * scale(z);
        let modulus = v.norm();
        if !(modulus > guard) {
            return Err(Error::BoundaryTooClose { at: z, modulus, guard });
        }
        Ok((s, v))
    };

    let params = contour.initial_parameters(max_spacing);
    let values: Vec<(f64, Complex64)> = params.iter().map(|&s| sample(s)).collect::<Result<_>>()?;

    let mut total = 0.0;
    for (i, &(s0, v0)) in values.iter().enumerate() {
        let (s1, v1) = if i + 1 < values.len() { values[i + 1] } else { (1.0, values[0].1) };
        // Explicit stack of (s_start, v_start, s_end, v_end, depth).
        let mut stack = vec![(s0, v0, s1, v1, 0u32)];
        while let Some((a, fa, b, fb, depth)) = stack.pop() {
            let step = (fb / fa).arg();
            if step.abs() < FRAC_PI_2 {
                total += step;
                continue;
            }
            if depth >= MAX_SEGMENT_DEPTH {
                let z = contour.point(0.5 * (a + b));
                return Err(Error::BoundaryTooClose {
                    at: z,
                    modulus: fa.norm().min(fb.norm()),
                    guard: GUARD * scale(z),
                });
            }
            let (m, fm) = sample(0.5 * (a + b))?;
            // Push the second half first so the first half is summed first.
            stack.push((m, fm, b, fb, depth + 1));
            stack.push((a, fa, m, fm, depth + 1));
        }
    }

    let turns = total / TAU;
    let count = turns.round();
    if (turns - count).abs() > 1e-6 {
        return Err(Error::NonFinite(format!("winding sum {turns} is not an integer")));
    }
    Ok(count as i64)
}

/// Principal logarithm with `arg` in `(-pi, pi)`; refuses points on the cut.
pub fn principal_ln(z: Complex64) -> Result<Complex64> {
    if z.re <= 0.0 && z.im.abs() <= 1e-12 {
        return Err(Error::BranchCut { at: z });
    }
    let arg = z.arg();
    debug_assert!(arg > -PI && arg <= PI);
    Ok(Complex64::new(z.norm().ln(), arg))
}
