use crate::error::{Error, Result, SignPart};
use crate::grid::TensorGrid;
use crate::simplex::{compensated_sum, ProbabilityVector};

/// Parts whose mass is at or below this are treated as absent.
pub const ZERO_MASS: f64 = 1e-14;

/// Real-valued samples of arbitrary sign on a tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSignal {
    values: Vec<f64>,
    grid: TensorGrid,
}

impl SignedSignal {
    pub fn new(values: Vec<f64>, grid: TensorGrid) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "signal entry {i} is not finite"
            )));
        }
        Ok(Self { values, grid })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Sign-split and independently normalized parts of a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSignal {
    pub pos: ProbabilityVector,
    pub neg: ProbabilityVector,
    pub pos_mass: f64,
    pub neg_mass: f64,
}

/// Normalized part of one sign, with its mass before normalization.
pub fn signed_part(sig: &SignedSignal, part: SignPart) -> Result<(ProbabilityVector, f64)> {
    let raw: Vec<f64> = match part {
        SignPart::Positive => sig.values.iter().map(|v| v.max(0.0)).collect(),
        SignPart::Negative => sig.values.iter().map(|v| (-v).max(0.0)).collect(),
    };
    let mass = compensated_sum(&raw);
    if mass <= ZERO_MASS {
        return Err(Error::ZeroMassPart { part, mass });
    }
    Ok((ProbabilityVector::normalized(&raw)?, mass))
}

/// Splits `sig` into `max(sig, 0)` and `max(-sig, 0)`, each normalized to
/// unit mass. Both parts must carry mass.
pub fn split_and_normalize(sig: &SignedSignal) -> Result<SplitSignal> {
    let (pos, pos_mass) = signed_part(sig, SignPart::Positive)?;
    let (neg, neg_mass) = signed_part(sig, SignPart::Negative)?;
    Ok(SplitSignal {
        pos,
        neg,
        pos_mass,
        neg_mass,
    })
}
