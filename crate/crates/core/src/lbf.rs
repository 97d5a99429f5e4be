//! Local binary fitting baseline.
//!
//! Uses the same fitting functions, curvature and distance regularization as
//! [`crate::evolve`], but replaces the pointwise data force with the
//! kernel-weighted fitting energy
//!
//! ```text
//! λ1·e1 − λ2·e2 = (λ1−λ2)·I²·(K⊗1) − 2I·K⊗(λ1u⁺ − λ2u⁻) + K⊗(λ1u⁺² − λ2u⁻²)
//! ```
//!
//! whose two φ-dependent convolutions are paid on every iteration on top of
//! the two spent refreshing `u±`.

use crate::error::{Error, Result};
use crate::evolve::{self, EvolveState, Params, RunResult};
use crate::field::ScalarField;
use crate::fitting::FitCache;
use crate::kernel::GaussianKernel;
use crate::regularize::ContourSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbfParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl Default for LbfParams {
    fn default() -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 1.0,
        }
    }
}

impl LbfParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `λ1·e1 − λ2·e2` in its expanded form. Costs two convolutions.
pub fn lbf_data_term(
    image: &ScalarField,
    u_plus: &ScalarField,
    u_minus: &ScalarField,
    kernel: &GaussianKernel,
    cache: &FitCache,
    lp: &LbfParams,
) -> Result<ScalarField> {
    image.check_same_shape(u_plus, "image vs u+")?;
    image.check_same_shape(u_minus, "image vs u-")?;
    image.check_same_shape(&cache.kt_one, "image vs fit cache")?;
    let (l1, l2) = (lp.lambda1, lp.lambda2);

    let linear = kernel.convolve(&u_plus.zip_map(u_minus, |p, m| l1 * p - l2 * m));
    let quadratic = kernel.convolve(&u_plus.zip_map(u_minus, |p, m| l1 * p * p - l2 * m * m));

    let out: Vec<f64> = image
        .values()
        .iter()
        .zip(cache.kt_one.values())
        .zip(linear.values().iter().zip(quadratic.values()))
        .map(|((&i, &k1), (&lin, &quad))| (l1 - l2) * i * i * k1 - 2.0 * i * lin + quad)
        .collect();
    Ok(ScalarField::new(image.width(), image.height(), out).expect("shape"))
}

/// One LBF step. Consumes four convolutions.
pub fn lbf_step(
    state: &mut EvolveState,
    image: &ScalarField,
    kernel: &GaussianKernel,
    cache: &FitCache,
    params: &Params,
    lp: &LbfParams,
) -> Result<()> {
    evolve::step_with(state, image, kernel, cache, params, |up, um| {
        let e = lbf_data_term(image, up, um, kernel, cache, lp)?;
        Ok(e.map(|v| -v))
    })
}

/// LBF counterpart of [`evolve::run`], with the same stopping rule.
pub fn lbf_run(
    image: &ScalarField,
    spec: &ContourSpec,
    params: &Params,
    lp: &LbfParams,
) -> Result<RunResult> {
    lp.validate()?;
    let mut stepper = |s: &mut EvolveState, i: &ScalarField, k: &GaussianKernel, c: &FitCache| {
        lbf_step(s, i, k, c, params, lp)
    };
    evolve::drive(image, spec, params, &mut stepper)
}
