//! Projection of sampled kernels onto step kernels, and second-kind
//! Fredholm equations solved through the block representation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::indexing::{check_sizes, checked_pow, pow, Digits, DimSubset};
use crate::linalg::C64;
use crate::operator::{StepFunction, StepOperator, MAX_TERM_ENTRIES};
use crate::representation::operator_solve;

/// Kernels `A_α(k, x_α)` sampled at the midpoints of a uniform grid of
/// `resolution` cells per axis.
///
/// The samples of term `α` are indexed by `rank(k) · resolution^|α| + rank(x_α)`
/// with the usual mixed-radix ranks (radix `resolution`).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledKernel {
    n_dims: usize,
    resolution: usize,
    terms: BTreeMap<DimSubset, Vec<C64>>,
}

impl SampledKernel {
    pub fn new(n_dims: usize, resolution: usize) -> Result<Self> {
        check_sizes(n_dims, resolution)?;
        Ok(Self {
            n_dims,
            resolution,
            terms: BTreeMap::new(),
        })
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn terms(&self) -> impl Iterator<Item = (DimSubset, &[C64])> {
        self.terms.iter().map(|(a, v)| (*a, v.as_slice()))
    }

    pub fn set_term(&mut self, alpha: DimSubset, values: Vec<C64>) -> Result<()> {
        if !alpha.is_subset_of(DimSubset::full(self.n_dims)?) {
            return Err(Error::SupportMismatch(format!(
                "subset {alpha:?} is not contained in 1..={}",
                self.n_dims
            )));
        }
        let len = checked_pow(self.resolution, self.n_dims + alpha.len())
            .filter(|&l| l <= MAX_TERM_ENTRIES)
            .ok_or_else(|| Error::SizeGuard(format!("sampled term {alpha:?} too large")))?;
        if values.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "sampled term {alpha:?} has {} values, expected {len}",
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Structure(format!(
                "sampled term {alpha:?} contains non-finite values"
            )));
        }
        self.terms.insert(alpha, values);
        Ok(())
    }

    /// Samples `kernel(k, x_α)` for term `alpha`; `x_α` lists the integration
    /// coordinates in increasing dimension order.
    pub fn sample_term(
        &mut self,
        alpha: DimSubset,
        mut kernel: impl FnMut(&[f64], &[f64]) -> C64,
    ) -> Result<()> {
        let n = self.n_dims;
        let res = self.resolution;
        let width = checked_pow(res, alpha.len()).unwrap_or(usize::MAX);
        let len = pow(res, n).saturating_mul(width);
        if len > MAX_TERM_ENTRIES {
            return Err(Error::SizeGuard(format!(
                "sampled term {alpha:?} too large"
            )));
        }
        let digits = Digits::new(n, res);
        let mid = |d: usize| (d as f64 + 0.5) / res as f64;
        let mut kd = vec![0; n];
        let mut xd = vec![0; alpha.len()];
        let mut k = vec![0.0; n];
        let mut x = vec![0.0; alpha.len()];
        let mut values = Vec::with_capacity(len);
        for k_rank in 0..pow(res, n) {
            digits.split(k_rank, &mut kd);
            for (kj, &d) in k.iter_mut().zip(&kd) {
                *kj = mid(d);
            }
            for x_rank in 0..width {
                let mut r = x_rank;
                for slot in xd.iter_mut().rev() {
                    *slot = r % res;
                    r /= res;
                }
                for (xj, &d) in x.iter_mut().zip(&xd) {
                    *xj = mid(d);
                }
                values.push(kernel(&k, &x));
            }
        }
        self.set_term(alpha, values)
    }

    /// Projects onto a `p`-step kernel: `a_α(i, m)` is the cell mean of the
    /// samples in cell `(i, m)` divided by `p^|α|`.
    pub fn project(&self, p: usize) -> Result<StepOperator> {
        project_kernel(self, p)
    }
}

pub fn project_kernel(kernel: &SampledKernel, p: usize) -> Result<StepOperator> {
    let n = kernel.n_dims;
    let res = kernel.resolution;
    if p == 0 || !res.is_multiple_of(p) {
        return Err(Error::ResolutionMismatch(format!(
            "sampling resolution {res} is not a multiple of p = {p}"
        )));
    }
    let sub = res / p;
    let mut op = StepOperator::zero(n, p)?;
    for (&alpha, values) in &kernel.terms {
        let full_len = n + alpha.len();
        let fine = Digits::new(full_len, res);
        let coarse = Digits::new(full_len, p);
        let mut d = vec![0; full_len];
        let mut sums = vec![C64::new(0.0, 0.0); op.term_len(alpha)];
        for (rank, v) in values.iter().enumerate() {
            fine.split(rank, &mut d);
            d.iter_mut().for_each(|x| *x /= sub);
            sums[coarse.full_rank(&d)] += v;
        }
        let samples_per_cell = pow(sub, full_len) as f64;
        let norm = samples_per_cell * pow(p, alpha.len()) as f64;
        sums.iter_mut().for_each(|s| *s /= norm);
        op.set_term(alpha, sums)?;
    }
    Ok(op)
}

/// A right-hand side sampled at the midpoints of a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    n_dims: usize,
    resolution: usize,
    values: Vec<C64>,
}

impl SampledFunction {
    pub fn new(n_dims: usize, resolution: usize, values: Vec<C64>) -> Result<Self> {
        check_sizes(n_dims, resolution)?;
        if values.len() != pow(resolution, n_dims) {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a grid of {} cells",
                values.len(),
                pow(resolution, n_dims)
            )));
        }
        Ok(Self {
            n_dims,
            resolution,
            values,
        })
    }

    pub fn from_fn(n_dims: usize, resolution: usize, f: impl FnMut(&[f64]) -> C64) -> Result<Self> {
        let u = StepFunction::from_fn(n_dims, resolution, 1, f)?;
        Self::new(n_dims, resolution, u.into_values())
    }

    /// Cell means on the `p`-grid.
    pub fn project(&self, p: usize) -> Result<StepFunction> {
        let res = self.resolution;
        if p == 0 || !res.is_multiple_of(p) {
            return Err(Error::ResolutionMismatch(format!(
                "sampling resolution {res} is not a multiple of p = {p}"
            )));
        }
        let n = self.n_dims;
        let sub = res / p;
        let fine = Digits::new(n, res);
        let coarse = Digits::new(n, p);
        let mut d = vec![0; n];
        let mut sums = vec![C64::new(0.0, 0.0); pow(p, n)];
        for (rank, v) in self.values.iter().enumerate() {
            fine.split(rank, &mut d);
            d.iter_mut().for_each(|x| *x /= sub);
            sums[coarse.full_rank(&d)] += v;
        }
        let per_cell = pow(sub, n) as f64;
        sums.iter_mut().for_each(|s| *s /= per_cell);
        StepFunction::new(n, p, 1, sums)
    }
}

#[derive(Clone, Debug)]
pub struct FredholmSolution {
    pub solution: StepFunction,
    /// `‖(I + λK_p) u − f_p‖_{L²}` for the projected system.
    pub residual: f64,
    /// `‖u − u_exact‖_{L²}` when an exact solution was supplied.
    pub error: Option<f64>,
}

/// Known solution `u(k)` to measure the L² error against.
pub type ExactSolution<'a> = &'a dyn Fn(&[f64]) -> C64;

/// Solves `u + λ ∫ K(k, x) u(x) dx = f` with `K` and `f` projected onto
/// `p`-step functions.
pub fn fredholm_solve(
    kernel: &SampledKernel,
    rhs: &SampledFunction,
    lambda: C64,
    p: usize,
    exact: Option<ExactSolution<'_>>,
) -> Result<FredholmSolution> {
    if kernel.n_dims != rhs.n_dims {
        return Err(Error::ShapeMismatch(format!(
            "kernel over {} dimensions, right-hand side over {}",
            kernel.n_dims, rhs.n_dims
        )));
    }
    let n = kernel.n_dims;
    let projected = project_kernel(kernel, p)?;
    let op = StepOperator::identity(n, p)?.add(&projected.scale(lambda))?;
    let f = rhs.project(p)?;
    let solution = operator_solve(&op, &f)?;
    let residual = op.apply(&solution)?.l2_distance(&f)?;
    let error = exact.map(|g| l2_error(&solution, g));
    Ok(FredholmSolution {
        solution,
        residual,
        error,
    })
}

const GAUSS_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// `‖u − g‖_{L²([0,1)^N)}` by 5-point Gauss–Legendre quadrature in every cell.
pub fn l2_error(u: &StepFunction, g: &dyn Fn(&[f64]) -> C64) -> f64 {
    let n = u.n_dims();
    let res = u.resolution();
    let h = 1.0 / res as f64;
    let digits = Digits::new(n, res);
    let nodes = pow(GAUSS_NODES.len(), n);
    let mut d = vec![0; n];
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    for (rank, &v) in u.values().iter().enumerate() {
        digits.split(rank, &mut d);
        for node in 0..nodes {
            let mut r = node;
            let mut w = 1.0;
            for j in (0..n).rev() {
                let k = r % GAUSS_NODES.len();
                r /= GAUSS_NODES.len();
                x[j] = (d[j] as f64 + 0.5 + 0.5 * GAUSS_NODES[k]) * h;
                w *= 0.5 * h * GAUSS_WEIGHTS[k];
            }
            total += w * (v - g(&x)).norm_sqr();
        }
    }
    total.sqrt()
}
