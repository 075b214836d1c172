use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` accepted for a probability vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Compensated (Neumaier) summation.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A nonnegative vector whose entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    values: Vec<f64>,
}

impl ProbabilityVector {
    /// Validates `values` as a point of the probability simplex.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotProbability("empty vector".into()));
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::NotProbability(format!("entry {i} is {v}")));
        }
        let sum = compensated_sum(&values);
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotProbability(format!(
                "entries sum to {sum:.17}, not 1"
            )));
        }
        Ok(Self { values })
    }

    /// Divides nonnegative `values` by their total mass.
    pub fn normalized(values: &[f64]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NotProbability(
                "cannot normalize a vector with negative or non-finite entries".into(),
            ));
        }
        let mass = compensated_sum(values);
        if mass <= 0.0 {
            return Err(Error::NotProbability("zero total mass".into()));
        }
        Self::new(values.iter().map(|v| v / mass).collect())
    }

    /// The uniform distribution on `n` points.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for ProbabilityVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
