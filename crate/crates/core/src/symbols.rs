//! Characteristic quasipolynomials of the modal equations.
//!
//! Each Dirichlet mode `sin(n x)` of the delayed heat/wave equations reduces to a
//! scalar delay ODE whose characteristic function is one of five families. The
//! Laplacian eigenvalue `n^2` is generalized to `mu = n^theta`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible `|Re(lambda) * h|` before `exp(-lambda h)` leaves double range.
pub const OVERFLOW_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `lambda + mu e^{-lambda h}`
    ParabolicDelay,
    /// `lambda^2 + mu e^{-lambda h}`
    HyperbolicDelay,
    /// `lambda^2 + mu (1 + e^{-lambda h})`
    PerturbedHyperbolic,
    /// `lambda + mu (1 + e^{-lambda h})`
    StableParabolicDelay,
    /// `lambda^2 + lambda + mu` (no delay term)
    MaxwellCattaneo,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 5] = [
        FamilyKind::ParabolicDelay,
        FamilyKind::HyperbolicDelay,
        FamilyKind::PerturbedHyperbolic,
        FamilyKind::StableParabolicDelay,
        FamilyKind::MaxwellCattaneo,
    ];

    pub fn token(self) -> &'static str {
        match self {
            FamilyKind::ParabolicDelay => "parabolic-delay",
            FamilyKind::HyperbolicDelay => "hyperbolic-delay",
            FamilyKind::PerturbedHyperbolic => "perturbed-hyperbolic",
            FamilyKind::StableParabolicDelay => "stable-parabolic-delay",
            FamilyKind::MaxwellCattaneo => "maxwell-cattaneo",
        }
    }

    /// Order of the modal ODE in time.
    pub fn order(self) -> usize {
        match self {
            FamilyKind::ParabolicDelay | FamilyKind::StableParabolicDelay => 1,
            _ => 2,
        }
    }

    pub fn has_delay(self) -> bool {
        self != FamilyKind::MaxwellCattaneo
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown family `{s}`")))
    }
}

/// A quasipolynomial family with its delay and coefficient exponent.
///
/// `h` is carried by `MaxwellCattaneo` for uniformity but never used there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolFamily {
    pub kind: FamilyKind,
    pub h: f64,
    pub theta: f64,
}

impl SymbolFamily {
    pub fn new(kind: FamilyKind, h: f64, theta: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidParameter(format!("delay h must be positive, got {h}")));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent theta must be positive, got {theta}"
            )));
        }
        Ok(Self { kind, h, theta })
    }

    /// The family with `h = 1`, `theta = 2`: the setting of all the asymptotic results.
    pub fn standard(kind: FamilyKind) -> Self {
        Self { kind, h: 1.0, theta: 2.0 }
    }

    pub fn mode(&self, n: u64) -> Result<Mode> {
        Mode::new(n, self.theta)
    }

    /// Quasipolynomial value `F_n(lambda)`.
    pub fn evaluate(&self, mode: &Mode, lambda: Complex64) -> Result<Complex64> {
        let mu = mode.mu;
        let value = match self.kind {
            FamilyKind::MaxwellCattaneo => lambda * lambda + lambda + mu,
            kind => {
                let e = self.delay_factor(lambda)?;
                match kind {
                    FamilyKind::ParabolicDelay => lambda + mu * e,
                    FamilyKind::HyperbolicDelay => lambda * lambda + mu * e,
                    FamilyKind::PerturbedHyperbolic => lambda * lambda + mu * (1.0 + e),
                    FamilyKind::StableParabolicDelay => lambda + mu * (1.0 + e),
                    FamilyKind::MaxwellCattaneo => unreachable!(),
                }
            }
        };
        finite(value, lambda)
    }

    /// `dF_n/dlambda`.
    pub fn derivative(&self, mode: &Mode, lambda: Complex64) -> Result<Complex64> {
        let mu = mode.mu;
        let value = match self.kind {
            FamilyKind::MaxwellCattaneo => 2.0 * lambda + 1.0,
            kind => {
                let de = -self.h * mu * self.delay_factor(lambda)?;
                match kind {
                    FamilyKind::ParabolicDelay | FamilyKind::StableParabolicDelay => 1.0 + de,
                    FamilyKind::HyperbolicDelay | FamilyKind::PerturbedHyperbolic => {
                        2.0 * lambda + de
                    }
                    FamilyKind::MaxwellCattaneo => unreachable!(),
                }
            }
        };
        finite(value, lambda)
    }

    /// Normalization used for relative residuals and contour guard bands.
    pub fn scale(&self, mode: &Mode, lambda: Complex64) -> f64 {
        lambda.norm_sqr() + mode.mu + 1.0
    }

    /// `|F_n(lambda)| / scale`.
    pub fn relative_residual(&self, mode: &Mode, lambda: Complex64) -> Result<f64> {
        Ok(self.evaluate(mode, lambda)?.norm() / self.scale(mode, lambda))
    }

    pub(crate) fn check_overflow(&self, lambda: Complex64) -> Result<()> {
        if !self.kind.has_delay() {
            return Ok(());
        }
        let scaled = (lambda.re * self.h).abs();
        if scaled > OVERFLOW_LIMIT || !scaled.is_finite() {
            return Err(Error::OverflowGuard { scaled, limit: OVERFLOW_LIMIT });
        }
        Ok(())
    }

    fn delay_factor(&self, lambda: Complex64) -> Result<Complex64> {
        self.check_overflow(lambda)?;
        Ok((-lambda * self.h).exp())
    }
}

fn finite(value: Complex64, lambda: Complex64) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(format!("symbol value at {lambda}")))
    }
}

/// Spatial mode index with its cached coefficient `mu = n^theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub n: u64,
    pub mu: f64,
}

impl Mode {
    pub fn new(n: u64, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("mode index n must be >= 1".into()));
        }
        let mu = (n as f64).powf(theta);
        if !mu.is_finite() {
            return Err(Error::NonFinite(format!("n^theta for n = {n}, theta = {theta}")));
        }
        Ok(Self { n, mu })
    }
}
