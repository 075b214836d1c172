//! Kronecker structure of the d-dimensional kernels.
//!
//! With an additively separable cost `C = C^(d) (+) ... (+) C^(1)` (all-ones
//! Kronecker sum), the kernel `Q = exp(-lambda C)` factors as
//! `Q^(d) x ... x Q^(1)` and `Q_hat = C . Q` as a sum of `d` such products.
//! Factor `k` of a [`FactorList`] acts on grid axis `k`, axis 0 fastest, in
//! line with the linearization of [`crate::grid::TensorGrid`].

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, TensorGrid};
use crate::hmatrix::{build_hmatrix, HMatrix, HParams};
use crate::kernels::{Cost1D, RegularizedKernel};
use crate::operator::{check_len, LinearOperator};

/// One square Kronecker factor.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    Hier(HMatrix),
    /// Explicit matrix, used by oracles and small problems.
    Dense(Array2<f64>),
}

impl Factor {
    pub fn n(&self) -> usize {
        match self {
            Factor::Hier(h) => h.n(),
            Factor::Dense(a) => a.nrows(),
        }
    }

    /// Overwrites `y` with the factor (or its transpose) applied to `x`.
    fn apply_into(&self, x: &[f64], y: &mut [f64], transpose: bool) {
        match self {
            Factor::Hier(h) => h.matvec_into(x, y, transpose),
            Factor::Dense(a) => {
                let n = a.ncols();
                let data = a.as_slice().expect("dense factors are row-major");
                if transpose {
                    y.fill(0.0);
                    for (row, &xi) in data.chunks_exact(n).zip(x) {
                        for (o, v) in y.iter_mut().zip(row) {
                            *o += v * xi;
                        }
                    }
                } else {
                    for (row, o) in data.chunks_exact(n).zip(y.iter_mut()) {
                        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
                    }
                }
            }
        }
    }
}

impl LinearOperator for Factor {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y, false);
        Ok(y)
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n(), x.len())?;
        let mut y = vec![0.0; x.len()];
        self.apply_into(x, &mut y, true);
        Ok(y)
    }
}

/// Factors `A^(1), ..., A^(d)` of `A^(d) x ... x A^(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorList {
    factors: Vec<Factor>,
}

impl FactorList {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("factor list is empty".into()));
        }
        for f in &factors {
            if let Factor::Dense(a) = f {
                if a.nrows() != a.ncols() {
                    return Err(Error::InvalidParameter(format!(
                        "factor is {}x{}, not square",
                        a.nrows(),
                        a.ncols()
                    )));
                }
            }
        }
        Ok(Self { factors })
    }

    pub fn dense(factors: Vec<Array2<f64>>) -> Result<Self> {
        Self::new(factors.into_iter().map(Factor::Dense).collect())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn d(&self) -> usize {
        self.factors.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.factors.iter().map(Factor::n).collect()
    }

    /// `prod n_k`
    pub fn n(&self) -> usize {
        self.factors.iter().map(Factor::n).product()
    }
}

/// Applies the Kronecker product of `factors` (last factor outermost) by one
/// sweep per axis, from the slowest axis to the fastest.
fn kron_apply(factors: &[&Factor], w: &[f64], transpose: bool) -> Vec<f64> {
    let sizes: Vec<usize> = factors.iter().map(|f| f.n()).collect();
    let n = w.len();
    let mut cur = w.to_vec();
    let mut next = vec![0.0; n];
    let max_nk = sizes.iter().copied().max().unwrap_or(0);
    let mut fin = vec![0.0; max_nk];
    let mut fout = vec![0.0; max_nk];

    for axis in (0..factors.len()).rev() {
        let nk = sizes[axis];
        let stride: usize = sizes[..axis].iter().product();
        let outer = n / (stride * nk);
        let factor = factors[axis];
        if stride == 1 {
            for (src, dst) in cur.chunks_exact(nk).zip(next.chunks_exact_mut(nk)) {
                factor.apply_into(src, dst, transpose);
            }
        } else {
            let (fin, fout) = (&mut fin[..nk], &mut fout[..nk]);
            for b in 0..outer {
                let base = b * stride * nk;
                for a in 0..stride {
                    for (j, v) in fin.iter_mut().enumerate() {
                        *v = cur[base + a + j * stride];
                    }
                    factor.apply_into(fin, fout, transpose);
                    for (j, v) in fout.iter().enumerate() {
                        next[base + a + j * stride] = *v;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `(A^(d) x ... x A^(1)) w`, or the product of the transposed factors.
pub fn kron_matvec(factors: &FactorList, w: &[f64], use_transpose: bool) -> Result<Vec<f64>> {
    check_len(factors.n(), w.len())?;
    let refs: Vec<&Factor> = factors.factors.iter().collect();
    Ok(kron_apply(&refs, w, use_transpose))
}

/// `Q z` for `Q = Q^(d) x ... x Q^(1)`.
pub fn mvm1(q: &FactorList, z: &[f64]) -> Result<Vec<f64>> {
    kron_matvec(q, z, false)
}

fn check_pair(q: &FactorList, q_hat: &FactorList) -> Result<()> {
    check_len(q.d(), q_hat.d())?;
    for (a, b) in q.factors.iter().zip(&q_hat.factors) {
        check_len(a.n(), b.n())?;
    }
    Ok(())
}

/// `Q_hat z = sum_k (A_k^(d) x ... x A_k^(1)) z` with `A_k^(m) = Q_hat^(m)`
/// when `m = k` and `Q^(m)` otherwise.
pub fn mvm2(q: &FactorList, q_hat: &FactorList, z: &[f64]) -> Result<Vec<f64>> {
    mvm2_impl(q, q_hat, z, false)
}

fn mvm2_impl(q: &FactorList, q_hat: &FactorList, z: &[f64], transpose: bool) -> Result<Vec<f64>> {
    check_pair(q, q_hat)?;
    check_len(q.n(), z.len())?;
    let mut out = vec![0.0; z.len()];
    for k in 0..q.d() {
        let refs: Vec<&Factor> = (0..q.d())
            .map(|m| {
                if m == k {
                    &q_hat.factors[m]
                } else {
                    &q.factors[m]
                }
            })
            .collect();
        for (o, v) in out.iter_mut().zip(kron_apply(&refs, z, transpose)) {
            *o += v;
        }
    }
    Ok(out)
}

/// Dense Kronecker product `A x B`.
pub fn kron_dense(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (p, q) = (a.nrows(), b.nrows());
    let (pc, qc) = (a.ncols(), b.ncols());
    Array2::from_shape_fn((p * q, pc * qc), |(i, j)| {
        a[[i / q, j / qc]] * b[[i % q, j % qc]]
    })
}

/// All-ones Kronecker sum `A (+) B = A x J_q + J_p x B`.
pub fn allones_kron_sum(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let q = b.nrows();
    let n = a.nrows() * q;
    Array2::from_shape_fn((n, n), |(i, j)| a[[i / q, j / q]] + b[[i % q, j % q]])
}

/// `A^(d) x ... x A^(1)` assembled densely.
pub fn kron_chain(factors: &[Array2<f64>]) -> Array2<f64> {
    let (last, rest) = factors.split_last().expect("at least one factor");
    rest.iter()
        .rev()
        .fold(last.clone(), |acc, f| kron_dense(&acc, f))
}

/// `C^(d) (+) ... (+) C^(1)` assembled densely.
pub fn kron_sum_chain(factors: &[Array2<f64>]) -> Array2<f64> {
    let (last, rest) = factors.split_last().expect("at least one factor");
    rest.iter()
        .rev()
        .fold(last.clone(), |acc, f| allones_kron_sum(&acc, f))
}

/// Checks `exp[C^(d) (+) ... (+) C^(1)] = exp[C^(d)] x ... x exp[C^(1)]`
/// entrywise to `1e-12` (relative to the entry size).
pub fn entrywise_exp_kron_sum_check(c_factors: &[Array2<f64>]) -> bool {
    if c_factors.is_empty() {
        return false;
    }
    let lhs = kron_sum_chain(c_factors).mapv(f64::exp);
    let exps: Vec<Array2<f64>> = c_factors.iter().map(|c| c.mapv(f64::exp)).collect();
    let rhs = kron_chain(&exps);
    lhs.shape() == rhs.shape()
        && lhs
            .iter()
            .zip(rhs.iter())
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
}

/// `[c(x_i, x_j)]` on one axis.
pub fn cost_matrix(cost: &Cost1D, axis: &Grid1D) -> Array2<f64> {
    let n = axis.len();
    Array2::from_shape_fn((n, n), |(i, j)| cost.eval(axis.point(i), axis.point(j)))
}

/// The `2d` kernel factors `Q^(k)` and `Q_hat^(k)` of a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFactorSet {
    pub q: FactorList,
    pub q_hat: FactorList,
}

impl KernelFactorSet {
    pub fn new(q: FactorList, q_hat: FactorList) -> Result<Self> {
        check_pair(&q, &q_hat)?;
        Ok(Self { q, q_hat })
    }

    /// H-matrix factors on every axis of `grid`.
    pub fn hierarchical(
        grid: &TensorGrid,
        cost: Cost1D,
        lambda: f64,
        params: &HParams,
    ) -> Result<Self> {
        let kappa = RegularizedKernel::kappa(cost, lambda)?;
        let kappa_hat = RegularizedKernel::kappa_hat(cost, lambda)?;
        let mut q = Vec::with_capacity(grid.dim());
        let mut q_hat = Vec::with_capacity(grid.dim());
        for axis in grid.axes() {
            q.push(Factor::Hier(build_hmatrix(&kappa, axis, axis, params)?));
            q_hat.push(Factor::Hier(build_hmatrix(&kappa_hat, axis, axis, params)?));
        }
        Self::new(FactorList::new(q)?, FactorList::new(q_hat)?)
    }

    /// Exact dense factors on every axis of `grid`.
    pub fn dense(grid: &TensorGrid, cost: Cost1D, lambda: f64) -> Result<Self> {
        let kappa = RegularizedKernel::kappa(cost, lambda)?;
        let kappa_hat = RegularizedKernel::kappa_hat(cost, lambda)?;
        let build = |k: &RegularizedKernel| -> Result<FactorList> {
            FactorList::dense(
                grid.axes()
                    .iter()
                    .map(|a| {
                        Array2::from_shape_fn((a.len(), a.len()), |(i, j)| {
                            k.eval(a.point(i), a.point(j))
                        })
                    })
                    .collect(),
            )
        };
        Self::new(build(&kappa)?, build(&kappa_hat)?)
    }

    pub fn n(&self) -> usize {
        self.q.n()
    }

    pub fn mvm1(&self, z: &[f64]) -> Result<Vec<f64>> {
        mvm1(&self.q, z)
    }

    pub fn mvm2(&self, z: &[f64]) -> Result<Vec<f64>> {
        mvm2(&self.q, &self.q_hat, z)
    }

    /// `Q` as a linear operator.
    pub fn q_operator(&self) -> KronOperator<'_> {
        KronOperator {
            set: self,
            hat: false,
        }
    }

    /// `Q_hat` as a linear operator.
    pub fn q_hat_operator(&self) -> KronOperator<'_> {
        KronOperator {
            set: self,
            hat: true,
        }
    }
}

/// Borrowed view of `Q` or `Q_hat` from a [`KernelFactorSet`].
#[derive(Debug, Clone, Copy)]
pub struct KronOperator<'a> {
    set: &'a KernelFactorSet,
    hat: bool,
}

impl LinearOperator for KronOperator<'_> {
    fn dim(&self) -> usize {
        self.set.n()
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.hat {
            mvm2_impl(&self.set.q, &self.set.q_hat, x, false)
        } else {
            kron_matvec(&self.set.q, x, false)
        }
    }

    fn apply_transpose(&self, x: &[f64]) -> Result<Vec<f64>> {
        if self.hat {
            mvm2_impl(&self.set.q, &self.set.q_hat, x, true)
        } else {
            kron_matvec(&self.set.q, x, true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
        Array2::from_shape_fn((n, n), |_| rng.gen_range(-1.0..1.0))
    }

    /// `A (+) B` from the index formula `A[i2, j2] + B[i1, j1]`.
    fn kron_sum_oracle(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
        let (p, q) = (a.nrows(), b.nrows());
        let mut out = Array2::zeros((p * q, p * q));
        for i2 in 0..p {
            for i1 in 0..q {
                for j2 in 0..p {
                    for j1 in 0..q {
                        out[[i2 * q + i1, j2 * q + j1]] = a[[i2, j2]] + b[[i1, j1]];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn kron_sum_of_scalars() {
        let s = allones_kron_sum(&array![[2.0]], &array![[3.5]]);
        assert_eq!(s, array![[5.5]]);
    }

    #[test]
    fn kron_sum_with_zero_summand() {
        let b = array![[1.0, 2.0], [3.0, 4.0]];
        let j2 = Array2::ones((2, 2));
        assert_eq!(
            allones_kron_sum(&Array2::zeros((2, 2)), &b),
            kron_dense(&j2, &b)
        );
    }

    #[test]
    fn kron_sum_matches_index_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 3);
        let b = random_matrix(&mut rng, 4);
        assert_eq!(allones_kron_sum(&a, &b), kron_sum_oracle(&a, &b));
    }

    #[test]
    fn kron_sum_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let (a, b, c) = (
                random_matrix(&mut rng, 2),
                random_matrix(&mut rng, 2),
                random_matrix(&mut rng, 2),
            );
            let left = allones_kron_sum(&allones_kron_sum(&a, &b), &c);
            let right = allones_kron_sum(&a, &allones_kron_sum(&b, &c));
            for (x, y) in left.iter().zip(right.iter()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn half_swap_permutation() {
        let id = array![[1.0, 0.0], [0.0, 1.0]];
        let swap = array![[0.0, 1.0], [1.0, 0.0]];
        let list = FactorList::dense(vec![id, swap]).unwrap();
        assert_eq!(
            kron_matvec(&list, &[1.0, 2.0, 3.0, 4.0], false).unwrap(),
            vec![3.0, 4.0, 1.0, 2.0]
        );
    }

    #[test]
    fn single_factor_is_plain_matvec() {
        let a = array![[1.0, 2.0], [3.0, 4.0]];
        let list = FactorList::dense(vec![a.clone()]).unwrap();
        assert_eq!(
            kron_matvec(&list, &[1.0, -1.0], false).unwrap(),
            a.apply(&[1.0, -1.0]).unwrap()
        );
    }

    #[test]
    fn three_factors_match_assembled_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let fs: Vec<Array2<f64>> = (0..3).map(|_| random_matrix(&mut rng, 4)).collect();
        let big = kron_chain(&fs);
        let list = FactorList::dense(fs).unwrap();
        let w: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for t in [false, true] {
            let fast = kron_matvec(&list, &w, t).unwrap();
            let slow = if t {
                big.apply_transpose(&w)
            } else {
                big.apply(&w)
            }
            .unwrap();
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn identity_factors_are_identity() {
        let list = FactorList::dense(vec![Array2::eye(3), Array2::eye(2), Array2::eye(4)]).unwrap();
        let w: Vec<f64> = (0..24).map(|i| i as f64 * 0.5 - 3.0).collect();
        assert_eq!(kron_matvec(&list, &w, false).unwrap(), w);
    }

    #[test]
    fn length_mismatch() {
        let list = FactorList::dense(vec![Array2::eye(3), Array2::eye(2)]).unwrap();
        assert!(matches!(
            kron_matvec(&list, &[0.0; 5], false),
            Err(Error::LengthMismatch {
                expected: 6,
                got: 5
            })
        ));
    }

    #[test]
    fn exp_identity_holds_for_allones_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fs = vec![random_matrix(&mut rng, 2), random_matrix(&mut rng, 2)];
        assert!(entrywise_exp_kron_sum_check(&fs));
        assert!(entrywise_exp_kron_sum_check(&vec![
            Array2::zeros((2, 2));
            3
        ]));
    }

    #[test]
    fn exp_identity_fails_for_standard_kron_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (a, b) = (random_matrix(&mut rng, 2), random_matrix(&mut rng, 2));
        let standard = kron_dense(&a, &Array2::eye(2)) + kron_dense(&Array2::eye(2), &b);
        let lhs = standard.mapv(f64::exp);
        let rhs = kron_dense(&a.mapv(f64::exp), &b.mapv(f64::exp));
        assert!(lhs
            .iter()
            .zip(rhs.iter())
            .any(|(x, y)| (x - y).abs() > 1e-3));
    }

    #[test]
    fn mvm2_matches_entrywise_product_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let lambda = 3.0;
        let cs: Vec<Array2<f64>> = (0..2)
            .map(|_| {
                let m = random_matrix(&mut rng, 3).mapv(f64::abs);
                &m + &m.t()
            })
            .collect();
        let qs: Vec<Array2<f64>> = cs.iter().map(|c| c.mapv(|v| (-lambda * v).exp())).collect();
        let qhats: Vec<Array2<f64>> = cs.iter().zip(&qs).map(|(c, q)| c * q).collect();
        let oracle = kron_sum_chain(&cs) * kron_chain(&qs);
        let q = FactorList::dense(qs).unwrap();
        let qh = FactorList::dense(qhats).unwrap();
        let z: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let fast = mvm2(&q, &qh, &z).unwrap();
        for (a, b) in fast.iter().zip(oracle.apply(&z).unwrap()) {
            assert!((a - b).abs() <= 1e-12);
        }
        assert_eq!(mvm2(&q, &qh, &[0.0; 9]).unwrap(), vec![0.0; 9]);
    }

    #[test]
    fn mvm1_of_all_ones_factors() {
        let list = FactorList::dense(vec![Array2::ones((4, 4)), Array2::ones((3, 3))]).unwrap();
        assert_eq!(mvm1(&list, &[1.0; 12]).unwrap(), vec![12.0; 12]);
    }

    #[test]
    fn hierarchical_mvm1_close_to_dense() {
        let grid = TensorGrid::unit(&[64, 64]).unwrap();
        let k = RegularizedKernel::kappa(Cost1D::SquaredDistance, 5.0).unwrap();
        let params =
            HParams::new(0.01, crate::kernels::default_smoothness(&k).unwrap()).with_n_min(16);
        let hier =
            KernelFactorSet::hierarchical(&grid, Cost1D::SquaredDistance, 5.0, &params).unwrap();
        let dense = KernelFactorSet::dense(&grid, Cost1D::SquaredDistance, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (fast, slow) in [
            (hier.mvm1(&z).unwrap(), dense.mvm1(&z).unwrap()),
            (hier.mvm2(&z).unwrap(), dense.mvm2(&z).unwrap()),
        ] {
            let diff: Vec<f64> = fast.iter().zip(&slow).map(|(a, b)| a - b).collect();
            assert!(
                norm(&diff) <= 2.0 * 0.01 * norm(&slow),
                "{}",
                norm(&diff) / norm(&slow)
            );
        }
    }
}
