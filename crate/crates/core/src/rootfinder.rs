//! Root location in bounded regions and Rouche certification of the unstable root.
//!
//! Zeros are isolated by argument-principle counting over recursively quadrisected
//! rectangles; cells holding a single zero are polished by damped Newton.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{count_zeros, principal_ln, Contour, Rect, Shape};
use crate::error::{Error, Result};
use crate::symbols::{FamilyKind, Mode, SymbolFamily};

/// Residual bound every returned [`Root`] satisfies.
pub const ROOT_RESIDUAL_BOUND: f64 = 1e-9;
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_DEPTH: u32 = 40;
const PERTURBATION_BUDGET: usize = 8;
const DILATION: f64 = 1.01;
const NEWTON_MAX_ITER: usize = 60;
const MIN_MARGIN_SAMPLES: usize = 256;

/// Split fractions tried in order when a child boundary grazes a zero.
const SPLITS: [(f64, f64); 6] =
    [(0.5, 0.5), (0.5317, 0.4729), (0.4613, 0.5391), (0.5809, 0.4267), (0.4137, 0.5923), (0.6431, 0.3571)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    WindingSubdivision,
    NewtonRefined,
    CertifiedRouche,
    ClosedForm,
}

impl RootMethod {
    pub fn token(self) -> &'static str {
        match self {
            RootMethod::WindingSubdivision => "winding_subdivision",
            RootMethod::NewtonRefined => "newton_refined",
            RootMethod::CertifiedRouche => "certified_rouche",
            RootMethod::ClosedForm => "closed_form",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub family: SymbolFamily,
    pub n: u64,
    /// Branch index, when the root was seeded from a branch prediction.
    pub k: Option<i64>,
    pub lambda: Complex64,
    /// `|F_n(lambda)| / (|lambda|^2 + mu + 1)`.
    pub residual: f64,
    pub method: RootMethod,
    pub certified: bool,
    /// Present exactly when `certified` is true.
    pub rouche_margin: Option<f64>,
}

fn boundary_spacing(family: &SymbolFamily) -> f64 {
    if family.kind.has_delay() {
        0.25 / family.h
    } else {
        f64::INFINITY
    }
}

/// Zeros of the family's symbol inside `contour`, counted with multiplicity.
pub fn winding_number(family: &SymbolFamily, mode: &Mode, contour: &Contour) -> Result<i64> {
    count_zeros(
        |z| family.evaluate(mode, z),
        |z| family.scale(mode, z),
        contour,
        boundary_spacing(family),
    )
}

/// Winding number, dilating the contour by 1% up to eight times when a zero
/// sits in the guard band. Returns the contour actually used.
pub fn winding_number_perturbed(
    family: &SymbolFamily,
    mode: &Mode,
    contour: &Contour,
) -> Result<(Contour, i64)> {
    let mut current = *contour;
    let mut attempt = 0;
    loop {
        match winding_number(family, mode, &current) {
            Ok(count) => return Ok((current, count)),
            Err(Error::BoundaryTooClose { .. }) if attempt < PERTURBATION_BUDGET => {
                attempt += 1;
                current = current.dilate(DILATION);
            }
            Err(e) => return Err(e),
        }
    }
}

/// Damped Newton on the symbol from `seed` until the relative residual drops to `tol`.
pub fn newton_refine(
    family: &SymbolFamily,
    mode: &Mode,
    seed: Complex64,
    tol: f64,
) -> Result<(Complex64, f64)> {
    newton(
        |z| Ok((family.evaluate(mode, z)?, family.derivative(mode, z)?)),
        |z| family.scale(mode, z),
        seed,
        tol,
    )
}

fn newton<F, S>(f: F, scale: S, seed: Complex64, tol: f64) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Result<(Complex64, Complex64)>,
    S: Fn(Complex64) -> f64,
{
    let mut z = seed;
    let (mut fz, mut dfz) = f(z)?;
    let mut converged_steps = 0;
    for _ in 0..NEWTON_MAX_ITER {
        if fz.norm() / scale(z) <= tol {
            // One polishing step past the tolerance, kept only if it helps.
            converged_steps += 1;
            if converged_steps > 1 {
                break;
            }
        }
        if dfz.norm() == 0.0 {
            break;
        }
        let step = fz / dfz;
        let mut damping = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let candidate = z - step * damping;
            if let Ok((fc, dfc)) = f(candidate) {
                if fc.norm() < fz.norm() {
                    z = candidate;
                    fz = fc;
                    dfz = dfc;
                    accepted = true;
                    break;
                }
            }
            damping *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let residual = fz.norm() / scale(z);
    if residual <= tol && residual.is_finite() {
        Ok((z, residual))
    } else {
        Err(Error::NewtonFailed { seed, residual })
    }
}

/// Newton-refined root seeded at `seed`, packaged as a [`Root`].
pub fn refine_root(
    family: &SymbolFamily,
    mode: &Mode,
    seed: Complex64,
    tol: f64,
) -> Result<Root> {
    let (lambda, residual) = newton_refine(family, mode, seed, tol.min(ROOT_RESIDUAL_BOUND))?;
    Ok(Root {
        family: *family,
        n: mode.n,
        k: None,
        lambda,
        residual,
        method: RootMethod::NewtonRefined,
        certified: false,
        rouche_margin: None,
    })
}

/// All zeros inside `rect`, each refined to relative residual `tol`, sorted by (Re, Im).
pub fn find_roots(family: &SymbolFamily, mode: &Mode, rect: &Rect, tol: f64) -> Result<Vec<Root>> {
    let tol = tol.min(ROOT_RESIDUAL_BOUND);
    let (contour, total) = winding_number_perturbed(family, mode, &Contour::rectangle(*rect))?;
    let Shape::Rectangle(cell) = contour.shape else { unreachable!() };
    let mut found = Vec::with_capacity(total.max(0) as usize);
    isolate(family, mode, cell, total, 0, tol, &mut found)?;
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    debug_assert_eq!(found.len() as i64, total);
    Ok(found
        .into_iter()
        .map(|lambda| Root {
            family: *family,
            n: mode.n,
            k: None,
            lambda,
            residual: family.relative_residual(mode, lambda).unwrap_or(f64::INFINITY),
            method: RootMethod::WindingSubdivision,
            certified: false,
            rouche_margin: None,
        })
        .collect())
}

fn isolate(
    family: &SymbolFamily,
    mode: &Mode,
    cell: Rect,
    count: i64,
    depth: u32,
    tol: f64,
    found: &mut Vec<Complex64>,
) -> Result<()> {
    if count <= 0 {
        return Ok(());
    }
    if depth > MAX_DEPTH {
        return Err(Error::SubdivisionLimit { center: cell.center(), count });
    }
    if count == 1 {
        if let Ok((z, _)) = newton_refine(family, mode, cell.center(), tol) {
            if cell.contains(z) {
                found.push(z);
                return Ok(());
            }
        }
    }

    let mut last_err = None;
    'splits: for (fx, fy) in SPLITS {
        let children = cell.quadrisect(fx, fy);
        let mut counts = [0i64; 4];
        for (slot, child) in counts.iter_mut().zip(children.iter()) {
            match winding_number(family, mode, &Contour::rectangle(*child)) {
                Ok(c) => *slot = c,
                Err(e @ Error::BoundaryTooClose { .. }) => {
                    last_err = Some(e);
                    continue 'splits;
                }
                Err(e) => return Err(e),
            }
        }
        if counts.iter().sum::<i64>() != count {
            continue;
        }
        for (child, c) in children.iter().zip(counts) {
            isolate(family, mode, *child, c, depth + 1, tol, found)?;
        }
        return Ok(());
    }
    Err(last_err.unwrap_or(Error::SubdivisionLimit { center: cell.center(), count }))
}

/// Largest real part among the zeros in `rect`, or `None` when it holds none.
pub fn spectral_abscissa_window(
    family: &SymbolFamily,
    mode: &Mode,
    rect: &Rect,
) -> Result<Option<f64>> {
    let roots = find_roots(family, mode, rect, DEFAULT_TOL)?;
    Ok(roots.iter().map(|r| r.lambda.re).reduce(f64::max))
}

/// `w = ln(mu) + i pi`; for `mu = n^2` this is `2 ln n + i pi`.
pub fn log_form_center(mode: &Mode) -> Complex64 {
    Complex64::new(mode.mu.ln(), PI)
}

fn family_for(b: u8) -> Result<SymbolFamily> {
    match b {
        1 => Ok(SymbolFamily::standard(FamilyKind::ParabolicDelay)),
        2 => Ok(SymbolFamily::standard(FamilyKind::HyperbolicDelay)),
        _ => Err(Error::InvalidParameter(format!("b must be 1 or 2, got {b}"))),
    }
}

/// `min over |lambda - w| = |w|/2` of `|lambda - w| - |b ln lambda|` on `samples` points.
pub fn rouche_margin(b: u8, w: Complex64, samples: usize) -> Result<f64> {
    family_for(b)?;
    if samples < MIN_MARGIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "rouche_margin needs >= {MIN_MARGIN_SAMPLES} samples, got {samples}"
        )));
    }
    let radius = 0.5 * w.norm();
    let bf = f64::from(b);
    let mut margin = f64::INFINITY;
    for j in 0..samples {
        let phase = std::f64::consts::TAU * j as f64 / samples as f64;
        let lambda = w + Complex64::from_polar(radius, phase);
        let ln = principal_ln(lambda)?;
        margin = margin.min(radius - bf * ln.norm());
    }
    Ok(margin)
}

fn log_form(b: u8, w: Complex64) -> impl Fn(Complex64) -> Result<(Complex64, Complex64)> {
    let bf = f64::from(b);
    move |z| Ok((z + bf * principal_ln(z)? - w, 1.0 + bf / z))
}

/// Root of `lambda + b ln lambda = w` refined against the original symbol,
/// without the Rouche check. Returns the root and the certification disk.
pub fn log_form_root(b: u8, mode: &Mode) -> Result<(Root, Contour)> {
    let family = family_for(b)?;
    let w = log_form_center(mode);
    let disk = Contour::circle(w, 0.5 * w.norm())?;
    let g = log_form(b, w);
    let (log_root, _) = newton(&g, |z| z.norm() + 1.0, w, 1e-15)?;
    let (lambda, residual) = newton_refine(&family, mode, log_root, 1e-15)
        .or_else(|_| newton_refine(&family, mode, log_root, ROOT_RESIDUAL_BOUND))?;

    // The refined root must still solve the log form on the principal branch.
    let (gz, _) = g(lambda)?;
    if gz.norm() > 1e-8 * (lambda.norm() + 1.0) || !disk.contains(lambda) {
        return Err(Error::NewtonFailed { seed: log_root, residual });
    }
    let root = Root {
        family,
        n: mode.n,
        k: None,
        lambda,
        residual,
        method: RootMethod::NewtonRefined,
        certified: false,
        rouche_margin: None,
    };
    Ok((root, disk))
}

/// Certified unstable root for `b = 1` (parabolic) or `b = 2` (hyperbolic).
///
/// Certification requires a positive sampled Rouche margin on `|lambda - w| = |w|/2`
/// and a log-form winding count of exactly one on that circle.
pub fn certify_unstable(b: u8, mode: &Mode) -> Result<Root> {
    certify_unstable_with(b, mode, 4096)
}

pub fn certify_unstable_with(b: u8, mode: &Mode, samples: usize) -> Result<Root> {
    family_for(b)?;
    let w = log_form_center(mode);
    let margin = rouche_margin(b, w, samples)?;
    if !(margin > 0.0) {
        return Err(Error::MarginNonPositive { n: mode.n, margin });
    }
    let disk = Contour::circle(w, 0.5 * w.norm())?;
    let count = count_zeros(
        |z| Ok(log_form(b, w)(z)?.0),
        |z| z.norm() + 1.0,
        &disk,
        0.25,
    )?;
    if count != 1 {
        return Err(Error::WindingMismatch { count });
    }
    let (mut root, _) = log_form_root(b, mode)?;
    root.method = RootMethod::CertifiedRouche;
    root.certified = true;
    root.rouche_margin = Some(margin);
    Ok(root)
}
