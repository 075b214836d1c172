use crate::error::{Error, Result};
use crate::kernels::SmoothnessParams;

/// Largest rank ever requested from the a-priori rule.
pub const MAX_RANK: usize = 4096;

/// Smallest `r >= 1` with `c (alpha eta / 4)^r <= eps_tol / n_k`, i.e.
/// `ceil(log(eps_tol / (c n_k)) / log(alpha eta / 4))` clamped to 1.
pub fn optimal_rank(eps_tol: f64, n_k: usize, c: f64, alpha: f64, eta: f64) -> Result<usize> {
    if !(eps_tol > 0.0 && c > 0.0 && alpha > 0.0 && eta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "optimal_rank needs eps_tol, c, alpha > 0 and eta >= 0 \
             (got {eps_tol}, {c}, {alpha}, {eta})"
        )));
    }
    let q = alpha * eta / 4.0;
    if q >= 1.0 {
        return Err(Error::DivergentRank(q));
    }
    if q == 0.0 {
        return Ok(1);
    }
    let r = ((eps_tol / (c * n_k as f64)).ln() / q.ln()).ceil();
    Ok(if r.is_nan() || r < 1.0 {
        1
    } else {
        (r as usize).min(MAX_RANK)
    })
}

/// Rank for one admissible block. The bound constant is
/// `c0 r^beta dist^(-s)`; with `beta = 0` this is [`optimal_rank`] with
/// `c = c0 dist^(-s)`, otherwise the smallest `r` is searched directly.
pub fn block_rank(
    smoothness: &SmoothnessParams,
    eps_tol: f64,
    n_k: usize,
    eta: f64,
    dist: f64,
) -> Result<usize> {
    let c = smoothness.c0
        * if smoothness.s == 0.0 {
            1.0
        } else {
            dist.powf(-smoothness.s)
        };
    let start = optimal_rank(eps_tol, n_k, c, smoothness.alpha, eta)?;
    if smoothness.beta == 0.0 || eta == 0.0 {
        return Ok(start);
    }
    let q = smoothness.alpha * eta / 4.0;
    let target = eps_tol / n_k as f64;
    let bound = |r: usize| c * (r as f64).powf(smoothness.beta) * q.powi(r as i32);
    // for beta > 0 the factor r^beta is >= 1, so the beta = 0 rank is a
    // lower bound on the answer
    let mut r = if smoothness.beta > 0.0 { start } else { 1 };
    while r < MAX_RANK && bound(r) > target {
        r += 1;
    }
    Ok(r)
}
