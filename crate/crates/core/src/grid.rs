//! Uniform one-dimensional grids and their tensor products.
//!
//! Linear indices follow column-stacking order: axis 0 varies fastest, so
//! `(i_0, ..., i_{d-1})` maps to `i_0 + n_0 * (i_1 + n_1 * (...))`.

use crate::error::{Error, Result};

/// `n` uniformly spaced points on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points, got {n}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "bad interval [{x_min}, {x_max}]"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// `n` points on `[0, 1]`.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(0.0, 1.0, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

/// Cartesian product of `d` uniform axes.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorGrid {
    axes: Vec<Grid1D>,
}

impl TensorGrid {
    pub fn new(axes: Vec<Grid1D>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid(
                "tensor grid needs at least one axis".into(),
            ));
        }
        Ok(Self { axes })
    }

    /// Unit-interval axes with the given point counts.
    pub fn unit(sizes: &[usize]) -> Result<Self> {
        Self::new(
            sizes
                .iter()
                .map(|&n| Grid1D::unit(n))
                .collect::<Result<_>>()?,
        )
    }

    pub fn axes(&self) -> &[Grid1D] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(Grid1D::len).collect()
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(Grid1D::len).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn to_multi(&self, mut linear: usize) -> Vec<usize> {
        debug_assert!(linear < self.len());
        self.axes
            .iter()
            .map(|a| {
                let i = linear % a.len();
                linear /= a.len();
                i
            })
            .collect()
    }

    pub fn to_linear(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dim());
        self.axes
            .iter()
            .zip(multi)
            .rev()
            .fold(0, |acc, (a, &i)| acc * a.len() + i)
    }
}

/// Piecewise-linear interpolation of `values` sampled at strictly increasing
/// `points` onto `target`.
pub fn resample_to_grid(points: &[f64], values: &[f64], target: &Grid1D) -> Result<Vec<f64>> {
    if points.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    if points.len() < 2 {
        return Err(Error::InvalidGrid("need at least two source points".into()));
    }
    if points
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::InvalidGrid(
            "source points must be strictly increasing".into(),
        ));
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    for t in [target.x_min(), target.x_max()] {
        if t < lo || t > hi {
            return Err(Error::OutOfRange {
                point: t,
                min: lo,
                max: hi,
            });
        }
    }

    // Both sequences are sorted, so a single forward sweep suffices.
    let mut seg = 0;
    let out = (0..target.len())
        .map(|i| {
            let t = target.point(i);
            while seg + 2 < points.len() && points[seg + 1] < t {
                seg += 1;
            }
            let (x0, x1) = (points[seg], points[seg + 1]);
            let w = ((t - x0) / (x1 - x0)).clamp(0.0, 1.0);
            values[seg] + w * (values[seg + 1] - values[seg])
        })
        .collect();
    Ok(out)
}
