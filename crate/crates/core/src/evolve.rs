//! Explicit time stepping of the single level-set equation
//!
//! ```text
//! ∂φ/∂t = α(Δφ − κ) + δ(φ)[ν·κ − (u⁺−I)² − μ|∇u⁺|² + (u⁻−I)² + μ|∇u⁻|²]
//! ```
//!
//! with `κ = div(∇φ/|∇φ|)` and `u±` refreshed from the current `φ` at the
//! start of every step. There is no re-initialization; the `α` term keeps
//! `φ` close to a distance function on its own.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::{self, Mask, ScalarField};
use crate::fitting::{self, FitCache};
use crate::kernel::GaussianKernel;
use crate::regularize::{self, ContourSpec};

/// Evolution constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    /// Distance-regularization weight.
    pub alpha: f64,
    /// Length (curvature) weight.
    pub nu: f64,
    /// Weight on the smoothness of the fitting functions.
    pub mu: f64,
    pub dt: f64,
    /// Gaussian scale of the fitting kernel.
    pub t: f64,
    /// Width of the smoothed Heaviside/Dirac pair.
    pub epsilon: f64,
    /// Magnitude of the binary initial level set.
    pub c0: f64,
    /// Denominator guard for the fitting functions.
    pub tau: f64,
    /// Gradient-magnitude floor in the curvature.
    pub eta: f64,
    pub max_iters: usize,
    /// Stop once the fraction of pixels changing sign stays below this...
    pub tol: f64,
    /// ...for this many consecutive iterations.
    pub patience: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            alpha: 0.02,
            nu: 0.001 * 255.0 * 255.0,
            mu: 0.02,
            dt: 0.025,
            t: 1.5,
            epsilon: regularize::DEFAULT_EPSILON,
            c0: regularize::DEFAULT_C0,
            tau: fitting::DEFAULT_TAU,
            eta: field::DEFAULT_ETA,
            max_iters: 1000,
            tol: 1e-4,
            patience: 10,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("nu", self.nu),
            ("mu", self.mu),
            ("dt", self.dt),
            ("t", self.t),
            ("epsilon", self.epsilon),
            ("c0", self.c0),
            ("tau", self.tau),
            ("eta", self.eta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::Parameter(format!(
                "tol must be non-negative, got {}",
                self.tol
            )));
        }
        if self.patience == 0 {
            return Err(Error::Parameter("patience must be at least 1".into()));
        }
        Ok(())
    }
}

/// Evolving level set plus the fitting functions last used to move it.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolveState {
    pub phi: ScalarField,
    pub u_plus: ScalarField,
    pub u_minus: ScalarField,
    pub iteration: usize,
    /// Convolutions spent by steps so far (excludes the per-image precompute).
    pub convolutions_this_run: u64,
    pub wall_ms_per_iter: f64,
}

impl EvolveState {
    /// Fresh state. The fitting functions start as copies of the image.
    pub fn new(phi: ScalarField, image: &ScalarField) -> Result<Self> {
        phi.check_same_shape(image, "phi vs image")?;
        Ok(Self {
            phi,
            u_plus: image.clone(),
            u_minus: image.clone(),
            iteration: 0,
            convolutions_this_run: 0,
            wall_ms_per_iter: 0.0,
        })
    }
}

/// One row of per-iteration instrumentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub iteration: usize,
    pub sign_change_frac: f64,
    /// Cumulative convolutions, precompute included.
    pub convolutions: u64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Sign changes stayed below `tol` for `patience` iterations.
    Converged,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub initial_phi: ScalarField,
    pub phi: ScalarField,
    pub u_plus: ScalarField,
    pub u_minus: ScalarField,
    pub initial_mask: Mask,
    /// `{x : φ(x) > 0}` of the final level set.
    pub mask: Mask,
    pub iterations: usize,
    /// Time spent inside step calls only, in seconds.
    pub total_seconds: f64,
    /// Every convolution of the run, including the two cached per image.
    pub total_convolutions: u64,
    pub metrics: Vec<MetricsRow>,
    pub stop_reason: StopReason,
}

impl RunResult {
    pub fn seconds_per_iteration(&self) -> f64 {
        if self.iterations == 0 {
            0.0
        } else {
            self.total_seconds / self.iterations as f64
        }
    }
}

/// Pointwise `−(u⁺−I)² − μ|∇u⁺|² + (u⁻−I)² + μ|∇u⁻|²`.
pub fn data_term(
    image: &ScalarField,
    u_plus: &ScalarField,
    u_minus: &ScalarField,
    mu: f64,
) -> Result<ScalarField> {
    image.check_same_shape(u_plus, "image vs u+")?;
    image.check_same_shape(u_minus, "image vs u-")?;
    if image.width() < 3 || image.height() < 3 {
        return Err(Error::Dimension(format!(
            "data term needs at least 3x3, got {}x{}",
            image.width(),
            image.height()
        )));
    }
    let mut out: Vec<f64> = image
        .values()
        .iter()
        .zip(u_plus.values().iter().zip(u_minus.values()))
        .map(|(&i, (&up, &um))| {
            let (rin, rout) = (up - i, um - i);
            rout * rout - rin * rin
        })
        .collect();
    field::add_weighted_grad_sq(u_plus, -mu, &mut out);
    field::add_weighted_grad_sq(u_minus, mu, &mut out);
    Ok(ScalarField::new(image.width(), image.height(), out).expect("shape"))
}

/// Advances `φ` by one explicit Euler step driven by `region_force`, which
/// receives the refreshed fitting functions and returns the data force
/// multiplying `δ(φ)` next to `ν·κ`.
pub(crate) fn step_with(
    state: &mut EvolveState,
    image: &ScalarField,
    kernel: &GaussianKernel,
    cache: &FitCache,
    params: &Params,
    region_force: impl FnOnce(&ScalarField, &ScalarField) -> Result<ScalarField>,
) -> Result<()> {
    state.phi.check_same_shape(image, "phi vs image")?;
    let started = Instant::now();
    let before = kernel.conv_count();

    let h_phi = regularize::heaviside_field(&state.phi, params.epsilon);
    let (u_plus, u_minus) = fitting::fit_pair(image, &h_phi, kernel, cache)?;
    let force = region_force(&u_plus, &u_minus)?;

    let lap = field::laplacian(&state.phi)?;
    let kappa = field::curvature(&state.phi, params.eta)?;
    let n = image.len();
    let phi = &state.phi.values()[..n];
    let (lap, kappa, force) = (
        &lap.values()[..n],
        &kappa.values()[..n],
        &force.values()[..n],
    );
    let (alpha, nu, dt, eps) = (params.alpha, params.nu, params.dt, params.epsilon);
    let mut next = vec![0.0; n];
    let mut finite = true;
    for p in 0..n {
        let reg = alpha * (lap[p] - kappa[p]);
        let region = regularize::dirac(phi[p], eps) * (nu * kappa[p] + force[p]);
        next[p] = phi[p] + dt * (reg + region);
        finite &= next[p].is_finite();
    }

    let iteration = state.iteration + 1;
    if !finite {
        return Err(Error::Blowup { iteration });
    }
    state.phi = ScalarField::new(image.width(), image.height(), next).expect("shape");
    state.u_plus = u_plus;
    state.u_minus = u_minus;
    state.iteration = iteration;
    state.convolutions_this_run += kernel.conv_count() - before;
    state.wall_ms_per_iter = started.elapsed().as_secs_f64() * 1e3;
    Ok(())
}

/// One step of the closed-form fitting model. Consumes two convolutions.
pub fn step(
    state: &mut EvolveState,
    image: &ScalarField,
    kernel: &GaussianKernel,
    cache: &FitCache,
    params: &Params,
) -> Result<()> {
    step_with(state, image, kernel, cache, params, |up, um| {
        data_term(image, up, um, params.mu)
    })
}

pub(crate) type Stepper<'a> =
    dyn FnMut(&mut EvolveState, &ScalarField, &GaussianKernel, &FitCache) -> Result<()> + 'a;

/// Shared driver: initialize, precompute, then step until the sign pattern
/// of `φ` settles or `max_iters` is hit.
pub(crate) fn drive(
    image: &ScalarField,
    spec: &ContourSpec,
    params: &Params,
    stepper: &mut Stepper<'_>,
) -> Result<RunResult> {
    params.validate()?;
    let (w, h) = (image.width(), image.height());
    let initial_phi = regularize::init_phi(spec, w, h, params.c0)?;
    let kernel = GaussianKernel::new(params.t)?;
    let cache = fitting::precompute(image, &kernel, params.tau)?;

    let mut state = EvolveState::new(initial_phi.clone(), image)?;
    let mut metrics = Vec::new();
    let mut total_seconds = 0.0;
    let mut calm = 0usize;
    let mut stop_reason = StopReason::MaxIters;
    let n = image.len() as f64;

    while state.iteration < params.max_iters {
        let before: Vec<bool> = state.phi.values().iter().map(|&v| v > 0.0).collect();
        stepper(&mut state, image, &kernel, &cache)?;
        total_seconds += state.wall_ms_per_iter / 1e3;

        let flipped = before
            .iter()
            .zip(state.phi.values())
            .filter(|(&was, &now)| was != (now > 0.0))
            .count();
        let frac = flipped as f64 / n;
        metrics.push(MetricsRow {
            iteration: state.iteration,
            sign_change_frac: frac,
            convolutions: kernel.conv_count(),
            wall_ms: state.wall_ms_per_iter,
        });

        calm = if frac < params.tol { calm + 1 } else { 0 };
        if calm >= params.patience {
            stop_reason = StopReason::Converged;
            break;
        }
    }

    Ok(RunResult {
        initial_mask: initial_phi.positive_mask(),
        initial_phi,
        mask: state.phi.positive_mask(),
        phi: state.phi,
        u_plus: state.u_plus,
        u_minus: state.u_minus,
        iterations: state.iteration,
        total_seconds,
        total_convolutions: kernel.conv_count(),
        metrics,
        stop_reason,
    })
}

/// Segments `image` starting from `spec`.
pub fn run(image: &ScalarField, spec: &ContourSpec, params: &Params) -> Result<RunResult> {
    let mut stepper = |s: &mut EvolveState, i: &ScalarField, k: &GaussianKernel, c: &FitCache| {
        step(s, i, k, c, params)
    };
    drive(image, spec, params, &mut stepper)
}

/// Dice overlap `2|a∩b| / (|a|+|b|)`; 1 when both masks are empty.
pub fn dice(a: &Mask, b: &Mask) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::Dimension(format!(
            "dice on {}x{} vs {}x{} masks",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let both = a
        .bits()
        .iter()
        .zip(b.bits())
        .filter(|(&p, &q)| p && q)
        .count();
    let total = a.count() + b.count();
    if total == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * both as f64 / total as f64)
}

/// Mean of `||∇φ| − 1|` over the pixels with `|φ| < band`; `None` if the band
/// is empty.
pub fn distance_deviation(phi: &ScalarField, band: f64) -> Result<Option<f64>> {
    let (gx, gy) = field::gradient(phi)?;
    let mut total = 0.0;
    let mut count = 0usize;
    for p in 0..phi.len() {
        if phi.values()[p].abs() < band {
            let g = gx.values()[p].hypot(gy.values()[p]);
            total += (g - 1.0).abs();
            count += 1;
        }
    }
    Ok((count > 0).then(|| total / count as f64))
}
