use ndarray::Array2;

use crate::error::{Error, Result};

/// A square linear map applied without exposing its entries.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>>;
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

impl LinearOperator for Array2<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.ncols(), x.len())?;
        Ok(self
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.nrows(), x.len())?;
        let mut y = vec![0.0; self.ncols()];
        for (row, &xi) in self.rows().into_iter().zip(x) {
            for (yj, a) in y.iter_mut().zip(row) {
                *yj += a * xi;
            }
        }
        Ok(y)
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).apply(x)
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).apply_transpose(x)
    }
}
