//! Leading-order predictions for the unstable root families and the exact
//! Maxwell-Cattaneo spectrum.
//!
//! All predictions assume `h = 1` and `mu = n^2`; outside that setting they are
//! only seeds.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::solve_xexp;
use crate::rootfinder::{newton_refine, Root, RootMethod, ROOT_RESIDUAL_BOUND};
use crate::symbols::{FamilyKind, Mode, SymbolFamily};

/// Lower bound on `cos n` for an admissible index.
pub const ADMISSIBLE_ALPHA: f64 = 0.25;
/// Upper bound on `cos(n + 1)` for an admissible index.
pub const ADMISSIBLE_NEXT_COS: f64 = -0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub family: SymbolFamily,
    pub n: u64,
    pub k: Option<i64>,
    pub x_pred: f64,
    pub y_pred: f64,
    pub order_note: String,
}

impl AsymptoticPrediction {
    pub fn seed(&self) -> Complex64 {
        Complex64::new(self.x_pred, self.y_pred)
    }
}

/// Parabolic delay family: `x ~ ln n^2 - ln ln n^2`, `y ~ pi (1 - 1/x)`.
pub fn predict_parabolic(n: u64) -> Result<AsymptoticPrediction> {
    if n < 2 {
        return Err(Error::Domain(format!("parabolic prediction needs n >= 2, got {n}")));
    }
    let l = ((n as f64) * (n as f64)).ln();
    let x = l - l.ln();
    Ok(AsymptoticPrediction {
        family: SymbolFamily::standard(FamilyKind::ParabolicDelay),
        n,
        k: None,
        x_pred: x,
        y_pred: PI * (1.0 - 1.0 / x),
        order_note: "dropped O(ln ln n^2 / ln n^2) in x; y from delta ~ pi/x".into(),
    })
}

/// Hyperbolic delay family through `eta = 2(ln(n/2) - ln ln(n/2))`,
/// `delta = 2 pi / (eta + 2)`, `x = 2 pi / delta - 2`, `y = pi - delta`.
pub fn predict_hyperbolic(n: u64) -> Result<AsymptoticPrediction> {
    if n < 6 {
        return Err(Error::Domain(format!("hyperbolic prediction needs n >= 6, got {n}")));
    }
    let l = (n as f64 / 2.0).ln();
    let eta = 2.0 * (l - l.ln());
    let delta = TAU / (eta + 2.0);
    Ok(AsymptoticPrediction {
        family: SymbolFamily::standard(FamilyKind::HyperbolicDelay),
        n,
        k: None,
        x_pred: TAU / delta - 2.0,
        y_pred: PI - delta,
        order_note: "dropped O(ln ln(n/2) / ln(n/2)) in eta; '+' branch t = (1 - cos y)/sin y only"
            .into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleIndex {
    pub n: u64,
    pub cos_n: f64,
    pub cos_n1: f64,
}

impl AdmissibleIndex {
    pub fn new(n: u64) -> Option<Self> {
        let cos_n = (n as f64).cos();
        let cos_n1 = (n as f64 + 1.0).cos();
        (cos_n > ADMISSIBLE_ALPHA && cos_n1 < ADMISSIBLE_NEXT_COS).then_some(Self { n, cos_n, cos_n1 })
    }
}

/// Admissible indices `n <= max_n` in ascending order.
pub fn admissible_indices(max_n: u64) -> Vec<AdmissibleIndex> {
    (1..=max_n).filter_map(AdmissibleIndex::new).collect()
}

/// `U_n(y) = Phi(n^2 sin y / 2y) + (y cos y - sqrt(y^2 - n^2 sin^2 y)) / sin y`,
/// where `Phi` inverts `x e^x`.
pub fn u_function(n: u64, y: f64) -> Result<f64> {
    let nf = n as f64;
    let (s, c) = y.sin_cos();
    if !(s > 0.0) {
        return Err(Error::Domain(format!("U_{n}({y}) needs sin y > 0, got {s}")));
    }
    let radicand = y * y - nf * nf * s * s;
    if radicand < 0.0 {
        return Err(Error::Domain(format!("U_{n}({y}): negative radicand {radicand}")));
    }
    let phi = solve_xexp(nf * nf * s / (2.0 * y))?.x;
    Ok(phi + (y * c - radicand.sqrt()) / s)
}

/// Perturbed hyperbolic root with `Im` in `(n, n+1)`: bisection on `U_n`, then
/// Newton on `lambda^2 + n^2 (1 + e^{-lambda})`.
pub fn find_perturbed_root(index: &AdmissibleIndex) -> Result<Root> {
    let n = index.n;
    let (mut lo, mut hi) = (n as f64, n as f64 + 1.0);
    let u_lo = u_function(n, lo)?;
    let u_hi = u_function(n, hi)?;
    if !(u_lo > 0.0 && u_hi < 0.0) {
        return Err(Error::NoBracket { n });
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if u_function(n, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let nf = n as f64;
    let x = solve_xexp(nf * nf * y.sin() / (2.0 * y))?.x;

    let family = SymbolFamily::standard(FamilyKind::PerturbedHyperbolic);
    let mode = family.mode(n)?;
    let (lambda, residual) = newton_refine(&family, &mode, Complex64::new(x, y), ROOT_RESIDUAL_BOUND)?;
    if !(lambda.im > nf && lambda.im < nf + 1.0) {
        return Err(Error::NoBracket { n });
    }
    Ok(Root {
        family,
        n,
        k: None,
        lambda,
        residual,
        method: RootMethod::NewtonRefined,
        certified: false,
        rouche_margin: None,
    })
}

/// Leading order of the perturbed hyperbolic family: `ln n - ln ln n`.
pub fn predict_perturbed(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("perturbed prediction needs n >= 3, got {n}")));
    }
    let l = (n as f64).ln();
    Ok(l - l.ln())
}

/// Exact roots of `lambda^2 + lambda + n^2`: `-1/2 +- i sqrt(4 n^2 - 1) / 2`.
pub fn mc_roots(n: u64) -> Result<(Complex64, Complex64)> {
    if n == 0 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    let nf = n as f64;
    let half_im = (4.0 * nf * nf - 1.0).sqrt() / 2.0;
    Ok((Complex64::new(-0.5, half_im), Complex64::new(-0.5, -half_im)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchSign {
    Plus,
    Minus,
}

/// Branch `k` of the parabolic delay spectrum at fixed `n`:
/// `x ~ ln n^2 - ln|pi/2 + 2 pi k| + 1/(2k)`, `y ~ +-(pi/2 + 2 pi k)`.
pub fn predict_branch(n: u64, k: i64, sign: BranchSign) -> Result<AsymptoticPrediction> {
    if k < 1 {
        return Err(Error::Domain(format!("branch index k must be >= 1, got {k}")));
    }
    let kf = k as f64;
    let nf = n as f64;
    let base = FRAC_PI_2 + TAU * kf;
    let x = (nf * nf).ln() - base.abs().ln() + PI / (TAU * kf);
    let y = match sign {
        BranchSign::Plus => base,
        BranchSign::Minus => -base,
    };
    Ok(AsymptoticPrediction {
        family: SymbolFamily::standard(FamilyKind::ParabolicDelay),
        n,
        k: Some(k),
        x_pred: x,
        y_pred: y,
        order_note: "dropped o(1/k) in x and O(ln k / k) in y; sign applied to Im only".into(),
    })
}

/// Newton on the prediction's own family, seeded at `(x_pred, y_pred)`.
pub fn refine_prediction(prediction: &AsymptoticPrediction, tol: f64) -> Result<Root> {
    let family = prediction.family;
    let mode: Mode = family.mode(prediction.n)?;
    let (lambda, residual) = newton_refine(&family, &mode, prediction.seed(), tol.min(ROOT_RESIDUAL_BOUND))?;
    Ok(Root {
        family,
        n: prediction.n,
        k: prediction.k,
        lambda,
        residual,
        method: RootMethod::NewtonRefined,
        certified: false,
        rouche_margin: None,
    })
}
