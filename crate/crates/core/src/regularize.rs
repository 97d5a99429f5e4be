//! Smoothed Heaviside/Dirac pair, level-set initialization and the
//! distance-regularization term.
//!
//! The Heaviside is the arctan form `½(1 + (2/π)·atan(z/ε))` and the Dirac is
//! its exact derivative, a Cauchy density that stays positive everywhere.

use std::f64::consts::{FRAC_1_PI, PI};

use crate::error::{Error, Result};
use crate::field::{self, Mask, ScalarField};

pub const DEFAULT_EPSILON: f64 = 1.0;
pub const DEFAULT_C0: f64 = 2.0;

#[inline]
pub fn heaviside(z: f64, epsilon: f64) -> f64 {
    0.5 * (1.0 + (2.0 / PI) * (z / epsilon).atan())
}

#[inline]
pub fn dirac(z: f64, epsilon: f64) -> f64 {
    FRAC_1_PI * epsilon / (epsilon * epsilon + z * z)
}

/// Field version of [`heaviside`]; agrees with it to within rounding.
pub fn heaviside_field(phi: &ScalarField, epsilon: f64) -> ScalarField {
    let inv = 1.0 / epsilon;
    phi.map(|z| 0.5 + FRAC_1_PI * (z * inv).atan())
}

pub fn dirac_field(phi: &ScalarField, epsilon: f64) -> ScalarField {
    phi.map(|z| dirac(z, epsilon))
}

/// Region enclosed by the initial contour.
#[derive(Debug, Clone, PartialEq)]
pub enum ContourSpec {
    /// Disc of radius `r` centred at `(cx, cy)`; pixels at distance `<= r` are inside.
    Circle { cx: f64, cy: f64, r: f64 },
    /// Axis-aligned rectangle with inclusive pixel corners.
    Rect {
        x0: usize,
        y0: usize,
        x1: usize,
        y1: usize,
    },
    /// Explicit inside/outside mask.
    Mask(Mask),
}

impl ContourSpec {
    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        match self {
            ContourSpec::Circle { cx, cy, r } => {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(Error::Parameter(format!(
                        "circle radius must be positive, got {r}"
                    )));
                }
                let inside = |v: f64, n: usize| v.is_finite() && v >= 0.0 && v <= (n - 1) as f64;
                if !inside(*cx, width) || !inside(*cy, height) {
                    return Err(Error::Parameter(format!(
                        "circle centre ({cx}, {cy}) outside the {width}x{height} grid"
                    )));
                }
            }
            ContourSpec::Rect { x0, y0, x1, y1 } => {
                if x0 >= x1 || y0 >= y1 {
                    return Err(Error::Parameter(format!(
                        "rectangle corners must satisfy x0<x1, y0<y1, got ({x0},{y0})-({x1},{y1})"
                    )));
                }
                if *x1 >= width || *y1 >= height {
                    return Err(Error::Parameter(format!(
                        "rectangle ({x0},{y0})-({x1},{y1}) exceeds the {width}x{height} grid"
                    )));
                }
            }
            ContourSpec::Mask(m) => {
                if m.width() != width || m.height() != height {
                    return Err(Error::Parameter(format!(
                        "mask is {}x{}, image is {width}x{height}",
                        m.width(),
                        m.height()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rasterizes the region. Boundary pixels count as inside.
    pub fn to_mask(&self, width: usize, height: usize) -> Result<Mask> {
        self.validate(width, height)?;
        Ok(match self {
            ContourSpec::Circle { cx, cy, r } => Mask::from_fn(width, height, |x, y| {
                let (dx, dy) = (x as f64 - cx, y as f64 - cy);
                dx * dx + dy * dy <= r * r
            }),
            ContourSpec::Rect { x0, y0, x1, y1 } => Mask::from_fn(width, height, |x, y| {
                (*x0..=*x1).contains(&x) && (*y0..=*y1).contains(&y)
            }),
            ContourSpec::Mask(m) => m.clone(),
        })
    }
}

/// Binary level set: `+c0` inside the region, `-c0` outside.
pub fn init_phi(spec: &ContourSpec, width: usize, height: usize, c0: f64) -> Result<ScalarField> {
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(Error::Parameter(format!("c0 must be positive, got {c0}")));
    }
    let mask = spec.to_mask(width, height)?;
    Ok(ScalarField::new(
        width,
        height,
        mask.bits()
            .iter()
            .map(|&b| if b { c0 } else { -c0 })
            .collect(),
    )
    .expect("mask shape"))
}

/// `Δφ − div(∇φ/|∇φ|)`. Its weight is applied by the caller.
pub fn dist_reg_term(phi: &ScalarField, eta: f64) -> Result<ScalarField> {
    let lap = field::laplacian(phi)?;
    let k = field::curvature(phi, eta)?;
    Ok(lap.zip_map(&k, |a, b| a - b))
}
