//! Quadratic Wasserstein distance in one dimension through the cumulative
//! distribution and its generalized inverse.

use crate::error::Result;
use crate::grid::Grid1D;
use crate::operator::check_len;
use crate::simplex::ProbabilityVector;

/// `F_i = sum_{j <= i} f_j` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Cdf {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Prefix sums of `f`, accumulated with compensation.
pub fn cdf(f: &ProbabilityVector, grid: &Grid1D) -> Result<Cdf> {
    check_len(grid.len(), f.len())?;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let values = f
        .as_slice()
        .iter()
        .map(|&v| {
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
            sum + comp
        })
        .collect();
    Ok(Cdf {
        grid: *grid,
        values,
    })
}

/// Smallest grid coordinate `y_j` with `G_j >= t`, found by binary search.
///
/// Plateaus of `G` resolve to their left edge. Values of `t` above the last
/// entry (rounding) map to the last point.
pub fn inverse_cdf(g: &Cdf, t: f64) -> f64 {
    let j = g.values.partition_point(|&v| v < t);
    g.grid.point(j.min(g.values.len() - 1))
}

/// `sqrt(dx * sum_i |x_i - G^{-1}(F(x_i))|^2 f_i)`.
///
/// The grid spacing `dx` is part of the quadrature weight, so the value is
/// `sqrt(dx)` times the discrete-measure distance for matching supports.
pub fn w2_1d(f: &ProbabilityVector, g: &ProbabilityVector, grid: &Grid1D) -> Result<f64> {
    check_len(grid.len(), g.len())?;
    let big_f = cdf(f, grid)?;
    let big_g = cdf(g, grid)?;
    let sum: f64 = f
        .as_slice()
        .iter()
        .zip(big_f.values())
        .enumerate()
        .filter(|(_, (&fi, _))| fi > 0.0)
        .map(|(i, (&fi, &t))| {
            let d = grid.point(i) - inverse_cdf(&big_g, t);
            d * d * fi
        })
        .sum();
    Ok((grid.spacing() * sum).sqrt())
}
