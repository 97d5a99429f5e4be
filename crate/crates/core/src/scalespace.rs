//! Numerical check that running the heat equation `∂I/∂t = ΔI` for time `T`
//! is the same as blurring with a Gaussian of standard deviation `√(2T)`.
//!
//! Two flavours of Gaussian are offered for the comparison. The sampled
//! continuous Gaussian carries the spatial error of the 5-point stencil,
//! which partly cancels the forward-Euler time error near `dt_h = 1/6`; the
//! error is then not monotone in `dt_h`. The discrete Gaussian
//! `e^{-2T}·I_n(2T)` (modified Bessel weights) is the exact solution of the
//! spatially discretized equation, so against it only the time error
//! remains and it shrinks linearly with `dt_h`. Both have variance `2T`.

use crate::error::{Error, Result};
use crate::field::{self, ScalarField};
use crate::kernel::separable_convolve;

/// Largest stable step for the explicit 5-point scheme.
pub const MAX_HEAT_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OracleKernel {
    /// Bessel-function weights, exact for the semi-discrete heat equation.
    #[default]
    Discrete,
    /// Samples of the continuous Gaussian density.
    Sampled,
}

/// `f + dt_h·Δf`.
pub fn heat_step(f: &ScalarField, dt_h: f64) -> Result<ScalarField> {
    if dt_h > MAX_HEAT_STEP {
        return Err(Error::Stability { dt: dt_h });
    }
    if dt_h.is_nan() || dt_h <= 0.0 {
        return Err(Error::Parameter(format!(
            "heat step must be positive, got {dt_h}"
        )));
    }
    let lap = field::laplacian(f)?;
    Ok(f.zip_map(&lap, |v, l| v + dt_h * l))
}

/// Evolves `f` for `round(total / dt_h)` heat steps.
pub fn diffuse(f: &ScalarField, total: f64, dt_h: f64) -> Result<ScalarField> {
    let steps = step_count(total, dt_h)?;
    let mut u = f.clone();
    for _ in 0..steps {
        u = heat_step(&u, dt_h)?;
    }
    Ok(u)
}

fn step_count(total: f64, dt_h: f64) -> Result<usize> {
    if dt_h > MAX_HEAT_STEP {
        return Err(Error::Stability { dt: dt_h });
    }
    if dt_h.is_nan() || dt_h <= 0.0 || !(total.is_finite() && total >= 0.0) {
        return Err(Error::Parameter(format!(
            "need T >= 0 and dt_h > 0, got T={total}, dt_h={dt_h}"
        )));
    }
    Ok((total / dt_h).round() as usize)
}

/// 1-D weights of a Gaussian with variance `2T`, truncated at radius
/// `⌈4√(2T)⌉` and renormalized.
pub fn oracle_weights(total: f64, flavour: OracleKernel) -> Vec<f64> {
    if total <= 0.0 {
        return vec![1.0];
    }
    let sigma = (2.0 * total).sqrt();
    let radius = (4.0 * sigma).ceil() as usize;
    let half: Vec<f64> = (0..=radius)
        .map(|n| match flavour {
            OracleKernel::Discrete => scaled_bessel_i(n, 2.0 * total),
            OracleKernel::Sampled => (-((n * n) as f64) / (2.0 * sigma * sigma)).exp(),
        })
        .collect();
    let mut weights: Vec<f64> = half[1..].iter().rev().chain(half.iter()).copied().collect();
    let sum: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= sum);
    weights
}

/// `e^{-x}·I_n(x)` from the power series of the modified Bessel function.
fn scaled_bessel_i(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum * (-x).exp()
}

/// Relative L2 distance `‖diffused − blurred‖ / ‖I0‖` between heat-equation
/// evolution and Gaussian blurring, using the discrete Gaussian.
pub fn verify_scalespace(i0: &ScalarField, total: f64, dt_h: f64) -> Result<f64> {
    verify_scalespace_with(i0, total, dt_h, OracleKernel::Discrete)
}

pub fn verify_scalespace_with(
    i0: &ScalarField,
    total: f64,
    dt_h: f64,
    flavour: OracleKernel,
) -> Result<f64> {
    let evolved = diffuse(i0, total, dt_h)?;
    let blurred = separable_convolve(i0, &oracle_weights(total, flavour));
    let norm = i0.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let diff = evolved.zip_map(&blurred, |a, b| a - b);
    Ok(diff.l2_norm() / norm)
}
