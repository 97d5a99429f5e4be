//! Truncated Gaussian masks and separable convolution.
//!
//! The mask side `m` is the smallest odd integer strictly greater than `4t`,
//! and the truncated weights are renormalized so the 2-D mask sums to one.
//! Every call to [`GaussianKernel::convolve`] bumps a counter so callers can
//! assert how many convolutions an algorithm actually performs.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Smallest odd integer strictly greater than `4t`.
pub fn kernel_size(t: f64) -> Result<usize> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Parameter(format!(
            "kernel scale must be positive and finite, got {t}"
        )));
    }
    let four_t = 4.0 * t;
    let mut m = four_t.floor() as usize + 1;
    if m % 2 == 0 {
        m += 1;
    }
    Ok(m)
}

#[derive(Debug)]
pub struct GaussianKernel {
    t: f64,
    weights: Vec<f64>,
    convolutions: AtomicU64,
}

impl GaussianKernel {
    pub fn new(t: f64) -> Result<Self> {
        let m = kernel_size(t)?;
        let r = (m / 2) as f64;
        let raw: Vec<f64> = (0..m)
            .map(|i| {
                let x = i as f64 - r;
                (-x * x / (2.0 * t * t)).exp()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        // Force exact symmetry; the two halves can differ in the last ulp after division.
        for i in 0..m / 2 {
            weights[m - 1 - i] = weights[i];
        }
        Ok(Self {
            t,
            weights,
            convolutions: AtomicU64::new(0),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Mask side length.
    pub fn size(&self) -> usize {
        self.weights.len()
    }

    pub fn radius(&self) -> usize {
        self.weights.len() / 2
    }

    pub fn weights_1d(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of the 2-D mask at offset `(dx, dy)` from the centre.
    pub fn weight_2d(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius() as isize;
        self.weights[(dx + r) as usize] * self.weights[(dy + r) as usize]
    }

    /// Sum of the outer-product mask.
    pub fn mask_sum(&self) -> f64 {
        let s: f64 = self.weights.iter().sum();
        let r = self.radius() as isize;
        let mut total = 0.0;
        for dy in -r..=r {
            for dx in -r..=r {
                total += self.weight_2d(dx, dy);
            }
        }
        debug_assert!((total - s * s).abs() < 1e-12);
        total
    }

    /// Number of convolutions performed since construction or the last reset.
    pub fn conv_count(&self) -> u64 {
        self.convolutions.load(Ordering::Relaxed)
    }

    pub fn reset_count(&self) {
        self.convolutions.store(0, Ordering::Relaxed);
    }

    /// Separable convolution with replicate-edge padding: a horizontal pass
    /// followed by a vertical pass.
    pub fn convolve(&self, f: &ScalarField) -> ScalarField {
        self.convolutions.fetch_add(1, Ordering::Relaxed);
        separable_convolve(f, &self.weights)
    }
}

/// Convolves rows then columns with the odd-length 1-D `weights`, padding by
/// edge replication. Does not touch any counter.
pub fn separable_convolve(f: &ScalarField, weights: &[f64]) -> ScalarField {
    assert!(weights.len() % 2 == 1, "weights must have odd length");
    let (w, h) = (f.width(), f.height());
    let r = weights.len() / 2;
    let src = f.values();

    let mut padded = vec![0.0; w + 2 * r];
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        padded[..r].fill(row[0]);
        padded[r..r + w].copy_from_slice(row);
        padded[r + w..].fill(row[w - 1]);
        let out = &mut tmp[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            *o = weights
                .iter()
                .zip(&padded[x..x + 2 * r + 1])
                .map(|(k, v)| k * v)
                .sum();
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        for (k, &wk) in weights.iter().enumerate() {
            let sy = (y + k).saturating_sub(r).min(h - 1);
            let row = &tmp[sy * w..(sy + 1) * w];
            for (d, s) in dst.iter_mut().zip(row) {
                *d += wk * s;
            }
        }
    }
    ScalarField::new(w, h, out).expect("shape preserved")
}
