//! Brute-force ground truth.
//!
//! Functions constant on the cells of the `(p·q)`-grid form an invariant
//! subspace of every operator in the algebra, and on it the operator acts
//! exactly as a `(pq)^N × (pq)^N` matrix. The matrix is assembled column by
//! column through [`StepOperator::apply`] and never through the block
//! representation, so it can check that path independently.
//!
//! The spectrum of that matrix is the multiset union of the block spectra,
//! each eigenvalue of `B_α(i)` repeated `(q−1)^{N−|α|}` times (with
//! `0⁰ = 1`): along every dimension outside `α` a block acts on the
//! `(q−1)`-dimensional space of zero-mean fluctuations inside one cell.

use crate::error::{Error, Result};
use crate::indexing::{checked_pow, pow};
use crate::linalg::{self, canonical_cmp, CMatrix, C64};
use crate::operator::{StepFunction, StepOperator};
use crate::representation::sigma;
use crate::spectral::{self, det_is_nonzero};

/// Largest dense oracle dimension `(pq)^N`.
pub const MAX_DENSE_DIM: usize = 4096;

/// Default eigenvalue matching tolerance, relative to `1 + |λ|`.
pub const MATCH_TOLERANCE: f64 = 1e-7;

/// The operator restricted to `(pq)`-step functions.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub n_dims: usize,
    pub p: usize,
    pub q: usize,
    pub matrix: CMatrix,
}

pub fn build_dense(a: &StepOperator, q: usize) -> Result<DenseOperator> {
    let n = a.n_dims();
    let p = a.p();
    let dim = checked_pow(p * q, n)
        .filter(|&d| d <= MAX_DENSE_DIM && q >= 1)
        .ok_or_else(|| {
            Error::SizeGuard(format!(
                "dense oracle of dimension ({p}·{q})^{n} exceeds {MAX_DENSE_DIM}"
            ))
        })?;
    let mut matrix = CMatrix::zeros(dim);
    for col in 0..dim {
        let e = StepFunction::indicator(n, p, q, col)?;
        for (row, v) in a.apply(&e)?.into_values().into_iter().enumerate() {
            matrix[(row, col)] = v;
        }
    }
    Ok(DenseOperator {
        n_dims: n,
        p,
        q,
        matrix,
    })
}

/// `(q−1)^{N−|α|}` with `0⁰ = 1`.
pub fn multiplicity(n_dims: usize, subset_len: usize, q: usize) -> usize {
    pow(q - 1, n_dims - subset_len)
}

/// Block eigenvalues repeated with their dense-oracle multiplicity, sorted canonically.
pub fn predicted_spectrum(a: &StepOperator, q: usize) -> Result<Vec<C64>> {
    let report = spectral::spectrum(a)?;
    let mut out = Vec::new();
    for e in report.entries() {
        let k = multiplicity(a.n_dims(), e.source.subset.len(), q);
        out.extend(std::iter::repeat_n(e.value, k));
    }
    out.sort_by(canonical_cmp);
    Ok(out)
}

/// Result of a greedy multiset comparison.
#[derive(Clone, Debug, Default)]
pub struct MultisetMatch {
    pub unmatched_left: Vec<C64>,
    pub unmatched_right: Vec<C64>,
    /// Largest distance among matched pairs.
    pub max_distance: f64,
}

impl MultisetMatch {
    pub fn is_match(&self) -> bool {
        self.unmatched_left.is_empty() && self.unmatched_right.is_empty()
    }
}

/// Pairs each element of `left` (canonical order) with its nearest unused
/// element of `right`, accepting pairs within `tol · (1 + |λ|)`.
pub fn match_multisets(left: &[C64], right: &[C64], tol: f64) -> MultisetMatch {
    let mut l = left.to_vec();
    l.sort_by(canonical_cmp);
    let mut used = vec![false; right.len()];
    let mut out = MultisetMatch::default();
    for x in l {
        let best = right
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((k, d)) if d <= tol * (1.0 + x.norm()) => {
                used[k] = true;
                out.max_distance = out.max_distance.max(d);
            }
            _ => out.unmatched_left.push(x),
        }
    }
    out.unmatched_right = right
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|(y, _)| *y)
        .collect();
    out
}

#[derive(Clone, Debug)]
pub struct SpectrumCheck {
    pub q: usize,
    /// Eigenvalues of the dense oracle matrix.
    pub oracle: Vec<C64>,
    /// Block eigenvalues with multiplicity.
    pub predicted: Vec<C64>,
    pub matching: MultisetMatch,
}

impl SpectrumCheck {
    pub fn passed(&self) -> bool {
        self.oracle.len() == self.predicted.len() && self.matching.is_match()
    }
}

pub fn oracle_spectrum_check(a: &StepOperator, q: usize, tol: f64) -> Result<SpectrumCheck> {
    let dense = build_dense(a, q)?;
    let oracle = linalg::eigvals(&dense.matrix)?;
    let predicted = predicted_spectrum(a, q)?;
    let matching = match_multisets(&oracle, &predicted, tol);
    Ok(SpectrumCheck {
        q,
        oracle,
        predicted,
        matching,
    })
}

/// Three independent invertibility verdicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvertibilityCheck {
    /// No block is singular under the LU pivot threshold.
    pub blocks: bool,
    /// Every component of the determinant tuple is nonzero.
    pub determinants: bool,
    /// The dense oracle matrix at `q = 2` is nonsingular.
    pub dense: bool,
}

impl InvertibilityCheck {
    pub fn agree(&self) -> bool {
        self.blocks == self.determinants && self.determinants == self.dense
    }
}

pub fn oracle_invertibility_check(a: &StepOperator) -> Result<InvertibilityCheck> {
    let blocks = spectral::is_invertible(a).is_invertible();
    let determinants = sigma(a).blocks().all(|(_, b)| det_is_nonzero(b));
    let dense = !linalg::lu_factor(&build_dense(a, 2)?.matrix).is_singular();
    Ok(InvertibilityCheck {
        blocks,
        determinants,
        dense,
    })
}
