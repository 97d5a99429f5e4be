//! Closed-form local fitting functions.
//!
//! Inside and outside the contour the image is approximated by the
//! Gaussian-weighted local averages
//!
//! ```text
//! u⁺ = K⊗(I·H) / K⊗H        u⁻ = K⊗(I·(1−H)) / K⊗(1−H)
//! ```
//!
//! The outside pair is rewritten as `(K⊗I − K⊗(I·H)) / (K⊗1 − K⊗H)`, so with
//! `K⊗I` and `K⊗1` cached once per image each refresh costs exactly two
//! convolutions.

use crate::error::{Error, Result};
use crate::field::{self, ScalarField};
use crate::kernel::GaussianKernel;

pub const DEFAULT_TAU: f64 = 1e-8;

/// Per-image convolutions that never change during an evolution.
#[derive(Debug, Clone)]
pub struct FitCache {
    pub kt_one: ScalarField,
    pub kt_image: ScalarField,
    pub tau: f64,
}

/// Computes `K⊗1` and `K⊗I`. Costs two convolutions.
pub fn precompute(image: &ScalarField, kernel: &GaussianKernel, tau: f64) -> Result<FitCache> {
    if tau.is_nan() || tau <= 0.0 {
        return Err(Error::Parameter(format!("tau must be positive, got {tau}")));
    }
    let ones = ScalarField::filled(image.width(), image.height(), 1.0);
    Ok(FitCache {
        kt_one: kernel.convolve(&ones),
        kt_image: kernel.convolve(image),
        tau,
    })
}

/// Inside/outside fitting functions for the given smoothed indicator `H(φ)`.
///
/// Where a denominator is at or below `tau` the fitting function falls back
/// to the image value, which zeroes the data residual at that pixel.
pub fn fit_pair(
    image: &ScalarField,
    h_phi: &ScalarField,
    kernel: &GaussianKernel,
    cache: &FitCache,
) -> Result<(ScalarField, ScalarField)> {
    image.check_same_shape(h_phi, "image vs H(phi)")?;
    image.check_same_shape(&cache.kt_one, "image vs fit cache")?;

    let weighted = image.zip_map(h_phi, |i, h| i * h);
    let num_in = kernel.convolve(&weighted);
    let den_in = kernel.convolve(h_phi);

    let n = image.len();
    let img = &image.values()[..n];
    let (a, b) = (&num_in.values()[..n], &den_in.values()[..n]);
    let (ki, k1) = (&cache.kt_image.values()[..n], &cache.kt_one.values()[..n]);
    let tau = cache.tau;
    let mut u_plus = vec![0.0; n];
    let mut u_minus = vec![0.0; n];
    for p in 0..n {
        let den_out = k1[p] - b[p];
        let inside = a[p] / b[p];
        let outside = (ki[p] - a[p]) / den_out;
        u_plus[p] = if b[p] > tau { inside } else { img[p] };
        u_minus[p] = if den_out > tau { outside } else { img[p] };
    }
    let (w, h) = (image.width(), image.height());
    Ok((
        ScalarField::new(w, h, u_plus).expect("shape"),
        ScalarField::new(w, h, u_minus).expect("shape"),
    ))
}

/// Gradients of both fitting functions.
#[derive(Debug, Clone, PartialEq)]
pub struct FitGradients {
    pub plus_x: ScalarField,
    pub plus_y: ScalarField,
    pub minus_x: ScalarField,
    pub minus_y: ScalarField,
}

pub fn fit_gradients(u_plus: &ScalarField, u_minus: &ScalarField) -> Result<FitGradients> {
    u_plus.check_same_shape(u_minus, "u+ vs u-")?;
    let (plus_x, plus_y) = field::gradient(u_plus)?;
    let (minus_x, minus_y) = field::gradient(u_minus)?;
    Ok(FitGradients {
        plus_x,
        plus_y,
        minus_x,
        minus_y,
    })
}
