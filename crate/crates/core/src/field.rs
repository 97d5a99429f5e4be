//! Scalar grids and the finite-difference operators shared by every stage of
//! the evolution.
//!
//! All stencils use unit grid spacing and replicate-edge (zero-flux) boundary
//! handling: a sample outside the grid takes the value of the nearest edge
//! pixel. Under that rule the central difference at a border pixel reduces to
//! a one-sided difference with half weight, which is what the level-set
//! literature usually calls the Neumann condition.

use crate::error::{Error, Result};

/// Default floor for `|∇f|` inside [`curvature`].
pub const DEFAULT_ETA: f64 = 1e-10;

/// A 2-D grid of `f64` values stored row-major, origin top-left.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "field must be non-empty, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::Dimension(format!(
                "{} values cannot fill a {width}x{height} grid",
                values.len()
            )));
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "field must be non-empty");
        Self {
            width,
            height,
            values: vec![value; width * height],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    /// Builds a field by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "field must be non-empty");
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            values,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.values[y * self.width + x] = value;
    }

    /// Value at `(x, y)` with coordinates clamped into the grid.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.values[cy * self.width + cx]
    }

    pub fn same_shape(&self, other: &ScalarField) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn check_same_shape(&self, other: &ScalarField, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{what}: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two equally shaped fields.
    ///
    /// Panics on a shape mismatch; public entry points validate shapes first.
    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert!(self.same_shape(other), "zip_map on mismatched fields");
        ScalarField {
            width: self.width,
            height: self.height,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Euclidean norm of the value vector.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest absolute pointwise difference.
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        assert!(self.same_shape(other), "max_abs_diff on mismatched fields");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Pixels where the value is strictly positive.
    pub fn positive_mask(&self) -> Mask {
        Mask {
            width: self.width,
            height: self.height,
            bits: self.values.iter().map(|&v| v > 0.0).collect(),
        }
    }
}

/// A binary image of the same grid layout as [`ScalarField`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(Error::Dimension(format!(
                "{} mask bits cannot fill a {width}x{height} grid",
                bits.len()
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self::from_fn(width, height, |_, _| false)
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(width > 0 && height > 0, "mask must be non-empty");
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Mask pixels with at least one 4-neighbour outside the mask. Neighbours
    /// beyond the grid edge count as outside.
    pub fn boundary(&self) -> Mask {
        let (w, h) = (self.width, self.height);
        Mask::from_fn(w, h, |x, y| {
            if !self.get(x, y) {
                return false;
            }
            let outside = |nx: isize, ny: isize| {
                nx < 0
                    || ny < 0
                    || nx >= w as isize
                    || ny >= h as isize
                    || !self.get(nx as usize, ny as usize)
            };
            let (x, y) = (x as isize, y as isize);
            outside(x - 1, y) || outside(x + 1, y) || outside(x, y - 1) || outside(x, y + 1)
        })
    }
}

fn check_stencil_size(f: &ScalarField) -> Result<()> {
    if f.width < 3 || f.height < 3 {
        return Err(Error::Dimension(format!(
            "finite-difference stencils need at least 3x3, got {}x{}",
            f.width, f.height
        )));
    }
    Ok(())
}

/// Row indices `(above, below)` for row `y` under replicate padding.
#[inline]
fn neighbour_rows(y: usize, h: usize) -> (usize, usize) {
    (y.saturating_sub(1), (y + 1).min(h - 1))
}

/// `out[x] = scale·(row[x+1] − row[x−1])` with replicated ends; `row.len() >= 2`.
#[inline]
fn central_x(row: &[f64], out: &mut [f64], scale: f64) {
    let w = row.len();
    out[0] = scale * (row[1] - row[0]);
    out[w - 1] = scale * (row[w - 1] - row[w - 2]);
    for ((o, r), l) in out[1..w - 1].iter_mut().zip(&row[2..]).zip(&row[..w - 2]) {
        *o = scale * (r - l);
    }
}

/// Central-difference gradient `(∂f/∂x, ∂f/∂y)`.
pub fn gradient(f: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    check_stencil_size(f)?;
    Ok(gradient_unchecked(f))
}

pub(crate) fn gradient_unchecked(f: &ScalarField) -> (ScalarField, ScalarField) {
    let (w, h) = (f.width, f.height);
    let v = &f.values;
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        let (up, down) = neighbour_rows(y, h);
        central_x(&v[y * w..(y + 1) * w], &mut gx[y * w..(y + 1) * w], 0.5);
        for ((o, d), u) in gy[y * w..(y + 1) * w]
            .iter_mut()
            .zip(&v[down * w..(down + 1) * w])
            .zip(&v[up * w..(up + 1) * w])
        {
            *o = 0.5 * (d - u);
        }
    }
    (
        ScalarField {
            width: w,
            height: h,
            values: gx,
        },
        ScalarField {
            width: w,
            height: h,
            values: gy,
        },
    )
}

/// `out[i] += weight·|∇f|²` at every pixel, without materializing the gradient.
pub(crate) fn add_weighted_grad_sq(f: &ScalarField, weight: f64, out: &mut [f64]) {
    let (w, h) = (f.width, f.height);
    let v = &f.values;
    let mut gx = vec![0.0; w];
    for y in 0..h {
        let (up, down) = neighbour_rows(y, h);
        central_x(&v[y * w..(y + 1) * w], &mut gx, 0.5);
        for (((o, gx), d), u) in out[y * w..(y + 1) * w]
            .iter_mut()
            .zip(&gx)
            .zip(&v[down * w..(down + 1) * w])
            .zip(&v[up * w..(up + 1) * w])
        {
            let gy = 0.5 * (d - u);
            *o += weight * (gx * gx + gy * gy);
        }
    }
}

/// Five-point Laplacian.
pub fn laplacian(f: &ScalarField) -> Result<ScalarField> {
    check_stencil_size(f)?;
    Ok(laplacian_unchecked(f))
}

pub(crate) fn laplacian_unchecked(f: &ScalarField) -> ScalarField {
    let (w, h) = (f.width, f.height);
    let v = &f.values;
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let (up, down) = neighbour_rows(y, h);
        let row = &v[y * w..(y + 1) * w];
        let above = &v[up * w..(up + 1) * w];
        let below = &v[down * w..(down + 1) * w];
        let o = &mut out[y * w..(y + 1) * w];
        o[0] = row[0] + row[1] + above[0] + below[0] - 4.0 * row[0];
        o[w - 1] = row[w - 2] + row[w - 1] + above[w - 1] + below[w - 1] - 4.0 * row[w - 1];
        for ((((o, l), r), c), (a, b)) in o[1..w - 1]
            .iter_mut()
            .zip(&row[..w - 2])
            .zip(&row[2..])
            .zip(&row[1..w - 1])
            .zip(above[1..w - 1].iter().zip(&below[1..w - 1]))
        {
            *o = l + r + a + b - 4.0 * c;
        }
    }
    ScalarField {
        width: w,
        height: h,
        values: out,
    }
}

/// Divergence of the unit normal, `div(∇f / max(|∇f|, eta))`.
pub fn curvature(f: &ScalarField, eta: f64) -> Result<ScalarField> {
    check_stencil_size(f)?;
    if eta.is_nan() || eta <= 0.0 {
        return Err(Error::Parameter(format!("eta must be positive, got {eta}")));
    }
    Ok(curvature_unchecked(f, eta))
}

pub(crate) fn curvature_unchecked(f: &ScalarField, eta: f64) -> ScalarField {
    let (w, h) = (f.width, f.height);
    let v = &f.values;
    let mut nx = vec![0.0; w * h];
    let mut ny = vec![0.0; w * h];
    for y in 0..h {
        let (up, down) = neighbour_rows(y, h);
        let row = y * w..(y + 1) * w;
        let (rx, ry) = (&mut nx[row.clone()], &mut ny[row]);
        central_x(&v[y * w..(y + 1) * w], rx, 0.5);
        for ((o, d), u) in ry
            .iter_mut()
            .zip(&v[down * w..(down + 1) * w])
            .zip(&v[up * w..(up + 1) * w])
        {
            *o = 0.5 * (d - u);
        }
        for (a, b) in rx.iter_mut().zip(ry.iter_mut()) {
            let inv = 1.0 / (*a * *a + *b * *b).sqrt().max(eta);
            *a *= inv;
            *b *= inv;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let (up, down) = neighbour_rows(y, h);
        let o = &mut out[y * w..(y + 1) * w];
        central_x(&nx[y * w..(y + 1) * w], o, 0.5);
        for ((o, d), u) in o
            .iter_mut()
            .zip(&ny[down * w..(down + 1) * w])
            .zip(&ny[up * w..(up + 1) * w])
        {
            *o += 0.5 * (d - u);
        }
    }
    ScalarField {
        width: w,
        height: h,
        values: out,
    }
}
