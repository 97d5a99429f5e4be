//! Seeded synthetic test images.
//!
//! Segmentation fixtures are 128×128 two-region images: an elliptical object
//! on a darker background, plus additive Gaussian noise. The inhomogeneous
//! variant multiplies the clean image by a horizontal illumination ramp that
//! runs linearly from 0.5 at the left edge to 1.5 at the right edge before the
//! noise is added, so the right-hand background ends up brighter than the
//! left-hand part of the object. Values are clamped to `[0, 255]`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::field::{Mask, ScalarField};
use crate::kernel::separable_convolve;
use crate::regularize::ContourSpec;

pub const FIXTURE_SIZE: usize = 128;
pub const BACKGROUND: f64 = 70.0;
pub const OBJECT: f64 = 130.0;
pub const NOISE_SIGMA: f64 = 4.0;
pub const FIXTURE_SEED: u64 = 2017;

/// Object geometry: ellipse centre and semi-axes, in pixels.
const CENTRE: (f64, f64) = (64.0, 64.0);
const SEMI_AXES: (f64, f64) = (34.0, 26.0);

/// A synthetic image with its ground truth and the initial contour used by
/// the tests.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub image: ScalarField,
    pub truth: Mask,
    pub init: ContourSpec,
}

fn truth_mask() -> Mask {
    let (cx, cy) = CENTRE;
    let (a, b) = SEMI_AXES;
    Mask::from_fn(FIXTURE_SIZE, FIXTURE_SIZE, |x, y| {
        let (dx, dy) = ((x as f64 - cx) / a, (y as f64 - cy) / b);
        dx * dx + dy * dy <= 1.0
    })
}

fn default_init() -> ContourSpec {
    ContourSpec::Circle {
        cx: CENTRE.0,
        cy: CENTRE.1,
        r: 30.0,
    }
}

fn render(truth: &Mask, gain: impl Fn(usize) -> f64, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, NOISE_SIGMA).expect("valid sigma");
    ScalarField::from_fn(FIXTURE_SIZE, FIXTURE_SIZE, |x, y| {
        let base = if truth.get(x, y) { OBJECT } else { BACKGROUND };
        (base * gain(x) + noise.sample(&mut rng)).clamp(0.0, 255.0)
    })
}

/// Piecewise-constant object/background image.
pub fn two_region(seed: u64) -> Fixture {
    let truth = truth_mask();
    Fixture {
        name: "two_region",
        image: render(&truth, |_| 1.0, seed),
        truth,
        init: default_init(),
    }
}

/// `two_region` under a 0.5×–1.5× left-to-right illumination ramp.
pub fn inhomogeneous(seed: u64) -> Fixture {
    let truth = truth_mask();
    let last = (FIXTURE_SIZE - 1) as f64;
    Fixture {
        name: "inhomogeneous",
        image: render(&truth, |x| 0.5 + x as f64 / last, seed),
        truth,
        init: default_init(),
    }
}

/// Both segmentation fixtures at the default seed.
pub fn bundled() -> Vec<Fixture> {
    vec![two_region(FIXTURE_SEED), inhomogeneous(FIXTURE_SEED)]
}

/// White noise blurred with a σ=3 Gaussian, then tapered by a centred
/// Gaussian window of σ=n/8 so almost no energy reaches the border. Values
/// are scaled to a peak magnitude of 100.
pub fn smooth_random_field(n: usize, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let noise = ScalarField::from_fn(n, n, |_, _| normal.sample(&mut rng));
    let blur: Vec<f64> = {
        let raw: Vec<f64> = (-12i32..=12)
            .map(|i| (-(i * i) as f64 / 18.0).exp())
            .collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / s).collect()
    };
    let smooth = separable_convolve(&noise, &blur);
    let c = (n as f64 - 1.0) / 2.0;
    let win_sigma = n as f64 / 8.0;
    let tapered = ScalarField::from_fn(n, n, |x, y| {
        let r2 = (x as f64 - c).powi(2) + (y as f64 - c).powi(2);
        smooth.get(x, y) * (-r2 / (2.0 * win_sigma * win_sigma)).exp()
    });
    let peak = tapered.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    tapered.map(|v| 100.0 * v / peak)
}

/// The 64×64 field used by the scale-space acceptance check.
pub fn scalespace_fixture() -> ScalarField {
    smooth_random_field(64, 7)
}
