//! Operators with piecewise constant kernels and the step functions they act on.
//!
//! An operator is stored through its coefficients `a_α(i, m)`: for every
//! subset `α` of integrated dimensions a dense array indexed by
//! `rank(i) · p^|α| + rank(m)` with `i ∈ P_η`, `m ∈ P_α`. The kernel cell value
//! is `p^|α| · a_α(i, m)`; that factor only appears when kernels are
//! materialized or applied.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::indexing::{check_sizes, checked_pow, pow, Digits, DimSubset, MultiIndex};
use crate::linalg::C64;

/// Default absolute tolerance for coefficientwise operator comparison.
pub const EQ_TOLERANCE: f64 = 1e-12;

/// Largest coefficient array stored for a single subset.
pub const MAX_TERM_ENTRIES: usize = 1 << 26;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// An element of the operator algebra for fixed `N` and `p`.
#[derive(Clone)]
pub struct StepOperator {
    n_dims: usize,
    p: usize,
    terms: BTreeMap<DimSubset, Vec<C64>>,
}

impl StepOperator {
    pub fn zero(n_dims: usize, p: usize) -> Result<Self> {
        check_sizes(n_dims, p)?;
        Ok(Self {
            n_dims,
            p,
            terms: BTreeMap::new(),
        })
    }

    pub fn identity(n_dims: usize, p: usize) -> Result<Self> {
        Self::scalar(n_dims, p, ONE)
    }

    /// `c · I`.
    pub fn scalar(n_dims: usize, p: usize, c: C64) -> Result<Self> {
        let mut op = Self::zero(n_dims, p)?;
        let cells = op.cells();
        op.terms.insert(DimSubset::EMPTY, vec![c; cells]);
        Ok(op)
    }

    /// Builds an operator from `(α, coefficients)` pairs.
    pub fn from_terms(
        n_dims: usize,
        p: usize,
        terms: impl IntoIterator<Item = (DimSubset, Vec<C64>)>,
    ) -> Result<Self> {
        let mut op = Self::zero(n_dims, p)?;
        for (alpha, coeffs) in terms {
            if op.terms.contains_key(&alpha) {
                return Err(Error::Structure(format!("duplicate term for {alpha:?}")));
            }
            op.set_term(alpha, coeffs)?;
        }
        Ok(op)
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of grid cells `p^N`.
    pub fn cells(&self) -> usize {
        pow(self.p, self.n_dims)
    }

    pub fn full_set(&self) -> DimSubset {
        DimSubset::full(self.n_dims).expect("guarded")
    }

    /// Expected coefficient array length for subset `alpha`.
    pub fn term_len(&self, alpha: DimSubset) -> usize {
        self.cells() * pow(self.p, alpha.len())
    }

    /// Stored terms in canonical subset order.
    pub fn terms(&self) -> impl Iterator<Item = (DimSubset, &[C64])> {
        self.terms.iter().map(|(a, c)| (*a, c.as_slice()))
    }

    pub fn term(&self, alpha: DimSubset) -> Option<&[C64]> {
        self.terms.get(&alpha).map(Vec::as_slice)
    }

    /// Replaces the coefficient family of `alpha`.
    pub fn set_term(&mut self, alpha: DimSubset, coeffs: Vec<C64>) -> Result<()> {
        if !alpha.is_subset_of(self.full_set()) {
            return Err(Error::SupportMismatch(format!(
                "subset {alpha:?} is not contained in 1..={}",
                self.n_dims
            )));
        }
        let len = checked_pow(self.p, self.n_dims + alpha.len())
            .filter(|&l| l <= MAX_TERM_ENTRIES)
            .ok_or_else(|| {
                Error::SizeGuard(format!(
                    "coefficient array for {alpha:?} exceeds {MAX_TERM_ENTRIES} entries"
                ))
            })?;
        if coeffs.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "term {alpha:?} has {} coefficients, expected {len}",
                coeffs.len()
            )));
        }
        self.terms.insert(alpha, coeffs);
        Ok(())
    }

    fn term_mut(&mut self, alpha: DimSubset) -> Result<&mut Vec<C64>> {
        if !self.terms.contains_key(&alpha) {
            let len = self.term_len(alpha);
            self.set_term(alpha, vec![ZERO; len])?;
        }
        Ok(self.terms.get_mut(&alpha).unwrap())
    }

    fn check_pair(&self, alpha: DimSubset, i: &MultiIndex, m: &MultiIndex) -> Result<()> {
        if i.p() != self.p || m.p() != self.p {
            return Err(Error::ShapeMismatch(
                "multi-index p differs from operator p".into(),
            ));
        }
        if i.support() != self.full_set() {
            return Err(Error::SupportMismatch(format!(
                "row index must be supported on all dimensions, got {:?}",
                i.support()
            )));
        }
        if m.support() != alpha {
            return Err(Error::SupportMismatch(format!(
                "column index supported on {:?}, expected {alpha:?}",
                m.support()
            )));
        }
        Ok(())
    }

    /// The coefficient `a_α(i, m)`; absent terms read as zero.
    pub fn coefficient(&self, alpha: DimSubset, i: &MultiIndex, m: &MultiIndex) -> Result<C64> {
        self.check_pair(alpha, i, m)?;
        Ok(self.coefficient_by_rank(alpha, i.rank(), m.rank()))
    }

    pub fn coefficient_by_rank(&self, alpha: DimSubset, i_rank: usize, m_rank: usize) -> C64 {
        self.terms
            .get(&alpha)
            .map_or(ZERO, |c| c[i_rank * pow(self.p, alpha.len()) + m_rank])
    }

    pub fn set_coefficient(
        &mut self,
        alpha: DimSubset,
        i: &MultiIndex,
        m: &MultiIndex,
        value: C64,
    ) -> Result<()> {
        self.check_pair(alpha, i, m)?;
        let width = pow(self.p, alpha.len());
        self.term_mut(alpha)?[i.rank() * width + m.rank()] = value;
        Ok(())
    }

    /// Multiplication by `χ_i(k_j)`.
    pub fn generator_multiplier(i: usize, j: usize, n_dims: usize, p: usize) -> Result<Self> {
        let mut op = Self::zero(n_dims, p)?;
        check_generator(i, j, n_dims, p)?;
        let digits = Digits::new(n_dims, p);
        let mut d = vec![0; n_dims];
        let coeffs = (0..op.cells())
            .map(|r| {
                digits.split(r, &mut d);
                if d[j - 1] == i - 1 {
                    ONE
                } else {
                    ZERO
                }
            })
            .collect();
        op.set_term(DimSubset::EMPTY, coeffs)?;
        Ok(op)
    }

    /// `p ∫ χ_i(x_j) · dx_j`.
    pub fn generator_integrator(i: usize, j: usize, n_dims: usize, p: usize) -> Result<Self> {
        let mut op = Self::zero(n_dims, p)?;
        check_generator(i, j, n_dims, p)?;
        let alpha = DimSubset::from_dims(&[j], n_dims)?;
        let coeffs = (0..op.cells())
            .flat_map(|_| (0..p).map(|m| if m == i - 1 { ONE } else { ZERO }))
            .collect();
        op.set_term(alpha, coeffs)?;
        Ok(op)
    }

    /// The standard basis element `C_α(i, m)`: the single coefficient `a_α(i, m) = 1`.
    pub fn c_basis(
        alpha: DimSubset,
        i: &MultiIndex,
        m: &MultiIndex,
        n_dims: usize,
    ) -> Result<Self> {
        let mut op = Self::zero(n_dims, i.p())?;
        op.set_coefficient(alpha, i, m, ONE)?;
        Ok(op)
    }

    /// The block basis element
    /// `D_α(i, m) = C_α(i, m) ∏_{j∉α} (1 − B_{i_j j})`, expanded in the standard
    /// basis as `Σ_{γ ⊆ ᾱ} (−1)^{|γ|} C_{α∪γ}(i, m ⋄ i_γ)`.
    pub fn d_basis(
        alpha: DimSubset,
        i: &MultiIndex,
        m: &MultiIndex,
        n_dims: usize,
    ) -> Result<Self> {
        let mut op = Self::zero(n_dims, i.p())?;
        op.check_pair(alpha, i, m)?;
        for gamma in alpha.complement(n_dims).subsets() {
            let sign = if gamma.len() % 2 == 0 { ONE } else { -ONE };
            let col = m.diamond(&i.restrict(gamma)?)?;
            let target = alpha.union(gamma);
            let prev = op.coefficient(target, i, &col)?;
            op.set_coefficient(target, i, &col, prev + sign)?;
        }
        Ok(op)
    }

    fn check_same_shape(&self, other: &StepOperator) -> Result<()> {
        if self.n_dims != other.n_dims || self.p != other.p {
            return Err(Error::ShapeMismatch(format!(
                "operators over (N={}, p={}) and (N={}, p={})",
                self.n_dims, self.p, other.n_dims, other.p
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &StepOperator) -> Result<StepOperator> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (alpha, coeffs) in &other.terms {
            let dst = out.term_mut(*alpha)?;
            for (d, s) in dst.iter_mut().zip(coeffs) {
                *d += s;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &StepOperator) -> Result<StepOperator> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, lambda: C64) -> StepOperator {
        let mut out = self.clone();
        for coeffs in out.terms.values_mut() {
            coeffs.iter_mut().for_each(|c| *c *= lambda);
        }
        out
    }

    /// The product `self ∘ other` ("apply `other` first"), computed directly
    /// in the standard basis:
    ///
    /// `C_α(i,m) · C_β(p,r) = δ(i_ᾱ, p_ᾱ) δ(m, p_α) C_{α∪β}(i, m_{α∖β} ⋄ r_β)`.
    pub fn compose(&self, other: &StepOperator) -> Result<StepOperator> {
        self.check_same_shape(other)?;
        let n = self.n_dims;
        let p = self.p;
        let digits = Digits::new(n, p);
        let mut out = StepOperator::zero(n, p)?;
        let mut i_d = vec![0; n];
        let mut w = vec![0; n];

        for (&alpha, a) in &self.terms {
            let wa = pow(p, alpha.len());
            for (&beta, b) in &other.terms {
                let wb = pow(p, beta.len());
                let gamma = alpha.union(beta);
                let wg = pow(p, gamma.len());
                let dst = out.term_mut(gamma)?;
                for i_rank in 0..self.cells() {
                    digits.split(i_rank, &mut i_d);
                    for m_rank in 0..wa {
                        let av = a[i_rank * wa + m_rank];
                        if av == ZERO {
                            continue;
                        }
                        w.copy_from_slice(&i_d);
                        digits.scatter(m_rank, alpha, &mut w);
                        let p_rank = digits.full_rank(&w);
                        let brow = &b[p_rank * wb..(p_rank + 1) * wb];
                        for (r_rank, &bv) in brow.iter().enumerate() {
                            if bv == ZERO {
                                continue;
                            }
                            digits.scatter(r_rank, beta, &mut w);
                            let col = digits.rank_on(&w, gamma);
                            dst[i_rank * wg + col] += av * bv;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact action on a step function refined `q` times per cell:
    /// `(Au)(g) = Σ_α q^{−|α|} Σ_{g'_α} a_α(cell(g), cell(g'_α)) u(g_ᾱ ⋄ g'_α)`.
    pub fn apply(&self, u: &StepFunction) -> Result<StepFunction> {
        if u.n_dims != self.n_dims || u.p != self.p {
            return Err(Error::ShapeMismatch(format!(
                "function over (N={}, p={}) for operator over (N={}, p={})",
                u.n_dims, u.p, self.n_dims, self.p
            )));
        }
        let n = self.n_dims;
        let p = self.p;
        let q = u.q;
        let res = p * q;
        let fine = Digits::new(n, res);
        let coarse = Digits::new(n, p);
        let weights: Vec<usize> = (0..n).map(|j| pow(res, n - 1 - j)).collect();
        let mut out = vec![ZERO; u.values.len()];
        let mut g = vec![0; n];
        let mut cells = vec![0; n];

        for (&alpha, a) in &self.terms {
            let wa = pow(p, alpha.len());
            let factor = 1.0 / (q as f64).powi(alpha.len() as i32);
            let rest = alpha.complement(n);
            // (column rank, fine-grid offset) for each integration point g'_α
            let points: Vec<(usize, usize)> = (0..pow(res, alpha.len()))
                .map(|r| {
                    let mut gd = vec![0; n];
                    fine.scatter(r, alpha, &mut gd);
                    let cd: Vec<usize> = gd.iter().map(|x| x / q).collect();
                    let offset = alpha.positions().map(|j| gd[j] * weights[j]).sum();
                    (coarse.rank_on(&cd, alpha), offset)
                })
                .collect();
            for (g_rank, slot) in out.iter_mut().enumerate() {
                fine.split(g_rank, &mut g);
                for (c, x) in cells.iter_mut().zip(&g) {
                    *c = x / q;
                }
                let i_rank = coarse.full_rank(&cells);
                let base: usize = rest.positions().map(|j| g[j] * weights[j]).sum();
                let row = &a[i_rank * wa..(i_rank + 1) * wa];
                let acc: C64 = points
                    .iter()
                    .map(|&(m_rank, off)| row[m_rank] * u.values[base + off])
                    .sum();
                *slot += acc * factor;
            }
        }
        StepFunction::new(n, p, q, out)
    }

    /// Largest coefficientwise distance, absent terms reading as zero.
    pub fn max_abs_diff(&self, other: &StepOperator) -> Result<f64> {
        self.check_same_shape(other)?;
        let mut worst: f64 = 0.0;
        let keys: std::collections::BTreeSet<DimSubset> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        for alpha in keys {
            let len = self.term_len(alpha);
            for k in 0..len {
                let a = self.terms.get(&alpha).map_or(ZERO, |c| c[k]);
                let b = other.terms.get(&alpha).map_or(ZERO, |c| c[k]);
                worst = worst.max((a - b).norm());
            }
        }
        Ok(worst)
    }

    /// Coefficientwise comparison within absolute tolerance `tol`.
    pub fn approx_eq(&self, other: &StepOperator, tol: f64) -> bool {
        self.max_abs_diff(other).is_ok_and(|d| d <= tol)
    }

    /// Drops terms whose coefficients are all exactly zero.
    pub fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.iter().any(|&v| v != ZERO));
        self
    }
}

/// Exact equality of all coefficients; absent terms equal explicit zeros.
impl PartialEq for StepOperator {
    fn eq(&self, other: &Self) -> bool {
        self.max_abs_diff(other).is_ok_and(|d| d == 0.0)
    }
}

impl fmt::Debug for StepOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("StepOperator");
        s.field("n_dims", &self.n_dims).field("p", &self.p);
        for (alpha, c) in &self.terms {
            s.field(&format!("a{alpha:?}"), c);
        }
        s.finish()
    }
}

fn check_generator(i: usize, j: usize, n_dims: usize, p: usize) -> Result<()> {
    if i == 0 || i > p {
        return Err(Error::IndexOutOfRange {
            what: "step index",
            value: i,
            max: p,
        });
    }
    if j == 0 || j > n_dims {
        return Err(Error::IndexOutOfRange {
            what: "dimension",
            value: j,
            max: n_dims,
        });
    }
    Ok(())
}

/// A function on `[0,1)^N` that is constant on each cell of the uniform
/// `(p·q)`-grid. Values are indexed by the grid rank (radix `p·q`).
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    n_dims: usize,
    p: usize,
    q: usize,
    values: Vec<C64>,
}

impl StepFunction {
    pub fn new(n_dims: usize, p: usize, q: usize, values: Vec<C64>) -> Result<Self> {
        check_sizes(n_dims, p)?;
        if q == 0 {
            return Err(Error::SizeGuard("refinement q must be at least 1".into()));
        }
        let len = checked_pow(p * q, n_dims)
            .ok_or_else(|| Error::SizeGuard(format!("(pq)^N = ({p}·{q})^{n_dims} overflows")))?;
        if values.len() != len {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a grid of {len} cells",
                values.len()
            )));
        }
        Ok(Self {
            n_dims,
            p,
            q,
            values,
        })
    }

    pub fn constant(n_dims: usize, p: usize, q: usize, c: C64) -> Result<Self> {
        let len = checked_pow(p * q, n_dims).unwrap_or(usize::MAX);
        if len > crate::indexing::MAX_CELLS {
            return Err(Error::SizeGuard(format!("grid of {len} cells")));
        }
        Self::new(n_dims, p, q, vec![c; len])
    }

    /// Samples `f` at cell midpoints.
    pub fn from_fn(
        n_dims: usize,
        p: usize,
        q: usize,
        mut f: impl FnMut(&[f64]) -> C64,
    ) -> Result<Self> {
        let res = p * q;
        let len = checked_pow(res, n_dims).unwrap_or(usize::MAX);
        if len > crate::indexing::MAX_CELLS {
            return Err(Error::SizeGuard(format!("grid of {len} cells")));
        }
        let digits = Digits::new(n_dims, res);
        let mut d = vec![0; n_dims];
        let mut x = vec![0.0; n_dims];
        let values = (0..len)
            .map(|r| {
                digits.split(r, &mut d);
                for (xj, &dj) in x.iter_mut().zip(&d) {
                    *xj = (dj as f64 + 0.5) / res as f64;
                }
                f(&x)
            })
            .collect();
        Self::new(n_dims, p, q, values)
    }

    /// Indicator of the grid cell with the given rank.
    pub fn indicator(n_dims: usize, p: usize, q: usize, cell: usize) -> Result<Self> {
        let mut u = Self::constant(n_dims, p, q, ZERO)?;
        let len = u.values.len();
        *u.values.get_mut(cell).ok_or(Error::RankOutOfRange {
            rank: cell,
            count: len,
        })? = ONE;
        Ok(u)
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Cells per axis, `p·q`.
    pub fn resolution(&self) -> usize {
        self.p * self.q
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// The same function on a grid `factor` times finer per axis.
    pub fn refine(&self, factor: usize) -> Result<StepFunction> {
        if factor == 0 {
            return Err(Error::SizeGuard(
                "refinement factor must be positive".into(),
            ));
        }
        let n = self.n_dims;
        let res = self.resolution();
        let fine_res = res * factor;
        let coarse = Digits::new(n, res);
        let fine = Digits::new(n, fine_res);
        let len = checked_pow(fine_res, n).unwrap_or(usize::MAX);
        if len > crate::indexing::MAX_CELLS {
            return Err(Error::SizeGuard(format!("grid of {len} cells")));
        }
        let mut d = vec![0; n];
        let values = (0..len)
            .map(|r| {
                fine.split(r, &mut d);
                d.iter_mut().for_each(|x| *x /= factor);
                self.values[coarse.full_rank(&d)]
            })
            .collect();
        StepFunction::new(n, self.p, self.q * factor, values)
    }

    pub fn add(&self, other: &StepFunction) -> Result<StepFunction> {
        if (self.n_dims, self.p, self.q) != (other.n_dims, other.p, other.q) {
            return Err(Error::ShapeMismatch(
                "step functions on different grids".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        StepFunction::new(self.n_dims, self.p, self.q, values)
    }

    pub fn scale(&self, lambda: C64) -> StepFunction {
        StepFunction {
            values: self.values.iter().map(|v| v * lambda).collect(),
            ..self.clone()
        }
    }

    /// `‖u‖_{L²([0,1)^N)}`.
    pub fn l2_norm(&self) -> f64 {
        let vol = 1.0 / self.values.len() as f64;
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * vol).sqrt()
    }

    /// `‖self − other‖_{L²}`; both functions must share the grid.
    pub fn l2_distance(&self, other: &StepFunction) -> Result<f64> {
        if (self.n_dims, self.p, self.q) != (other.n_dims, other.p, other.q) {
            return Err(Error::ShapeMismatch(
                "step functions on different grids".into(),
            ));
        }
        let vol = 1.0 / self.values.len() as f64;
        Ok((self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            * vol)
            .sqrt())
    }

    pub fn max_abs_diff(&self, other: &StepFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
