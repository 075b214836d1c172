//! One-dimensional costs `c(x, y) = |x - y|^p` and the regularized kernels
//! `exp(-lambda c)` and `c exp(-lambda c)` built from them.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cost1D {
    SquaredDistance,
    PowerDistance(f64),
}

impl Cost1D {
    /// Cost `|x - y|^p`; `p = 2` maps to [`Cost1D::SquaredDistance`].
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cost exponent must be >= 1, got {p}"
            )));
        }
        Ok(if p == 2.0 {
            Cost1D::SquaredDistance
        } else {
            Cost1D::PowerDistance(p)
        })
    }

    pub fn exponent(&self) -> f64 {
        match *self {
            Cost1D::SquaredDistance => 2.0,
            Cost1D::PowerDistance(p) => p,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let t = (x - y).abs();
        match *self {
            Cost1D::SquaredDistance => t * t,
            Cost1D::PowerDistance(p) => t.powf(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelVariant {
    /// `exp(-lambda c)`
    Kappa,
    /// `c exp(-lambda c)`
    KappaHat,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedKernel {
    pub cost: Cost1D,
    pub lambda: f64,
    pub variant: KernelVariant,
}

impl RegularizedKernel {
    pub fn new(cost: Cost1D, lambda: f64, variant: KernelVariant) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            cost,
            lambda,
            variant,
        })
    }

    pub fn kappa(cost: Cost1D, lambda: f64) -> Result<Self> {
        Self::new(cost, lambda, KernelVariant::Kappa)
    }

    pub fn kappa_hat(cost: Cost1D, lambda: f64) -> Result<Self> {
        Self::new(cost, lambda, KernelVariant::KappaHat)
    }

    /// Kernel value; underflow to zero is not an error here.
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let c = self.cost.eval(x, y);
        let k = (-self.lambda * c).exp();
        match self.variant {
            KernelVariant::Kappa => k,
            KernelVariant::KappaHat => c * k,
        }
    }
}

/// Constants of the derivative bound
/// `|d^m/dx^m k(x, y)| <= c0 m! alpha^m m^beta |x - y|^(-m - s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessParams {
    pub c0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub s: f64,
}

impl SmoothnessParams {
    pub fn new(c0: f64, alpha: f64, beta: f64, s: f64) -> Result<Self> {
        if !(alpha > 0.0 && c0 > 0.0) || ![c0, alpha, beta, s].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smoothness needs c0 > 0 and alpha > 0, got c0={c0} alpha={alpha}"
            )));
        }
        Ok(Self { c0, alpha, beta, s })
    }

    /// Default admissibility parameter `2 / alpha`.
    pub fn default_eta0(&self) -> f64 {
        2.0 / self.alpha
    }
}

/// Built-in smoothness constants; only the quadratic cost has them.
pub fn default_smoothness(kernel: &RegularizedKernel) -> Result<SmoothnessParams> {
    match kernel.cost {
        Cost1D::SquaredDistance => Ok(SmoothnessParams {
            c0: 1.0,
            alpha: 2.0,
            beta: 0.0,
            s: 0.0,
        }),
        Cost1D::PowerDistance(p) => Err(Error::UnknownSmoothness(p)),
    }
}
