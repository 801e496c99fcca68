//! Spectrum, multidimensional trace and determinant, invertibility.

use crate::error::{Error, Result};
use crate::indexing::DimSubset;
use crate::linalg::{self, canonical_cmp, C64};
use crate::operator::StepOperator;
use crate::representation::{sigma, BlockKey, Representation};

/// Relative threshold under which a determinant counts as zero:
/// `|det B| ≤ DET_THRESHOLD · ∏_k ‖row_k(B)‖₂` (Hadamard's bound).
pub const DET_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumLabel {
    /// Eigenvalue of the full-subset block `B_η`.
    Discrete,
    /// Eigenvalue of any other block.
    Essential,
}

impl SpectrumLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumLabel::Discrete => "discrete",
            SpectrumLabel::Essential => "essential",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub value: C64,
    pub source: BlockKey,
    pub label: SpectrumLabel,
}

/// Eigenvalues of every block with their provenance.
///
/// Entries are sorted by eigenvalue in canonical order; equal eigenvalues keep
/// the canonical block order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    n_dims: usize,
    p: usize,
    entries: Vec<SpectrumEntry>,
}

impl SpectrumReport {
    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    /// All eigenvalues in canonical order.
    pub fn values(&self) -> Vec<C64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn discrete(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries
            .iter()
            .filter(|e| e.label == SpectrumLabel::Discrete)
    }

    pub fn essential(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.entries
            .iter()
            .filter(|e| e.label == SpectrumLabel::Essential)
    }
}

pub fn spectrum(a: &StepOperator) -> Result<SpectrumReport> {
    spectrum_of(&sigma(a))
}

pub fn spectrum_of(rep: &Representation) -> Result<SpectrumReport> {
    let full = DimSubset::full(rep.n_dims())?;
    let mut entries = Vec::new();
    for (key, block) in rep.blocks() {
        let values = linalg::eigvals(block).map_err(|e| Error::BlockEigen {
            subset: key.subset.dims(),
            index: key.multi_index(rep.n_dims(), rep.p()).entries().to_vec(),
            source: Box::new(e),
        })?;
        let label = if key.subset == full {
            SpectrumLabel::Discrete
        } else {
            SpectrumLabel::Essential
        };
        entries.extend(values.into_iter().map(|value| SpectrumEntry {
            value,
            source: key,
            label,
        }));
    }
    entries.sort_by(|a, b| canonical_cmp(&a.value, &b.value));
    Ok(SpectrumReport {
        n_dims: rep.n_dims(),
        p: rep.p(),
        entries,
    })
}

/// One complex number per block, `(p+1)^N` in total, in canonical block order.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceDetTuple {
    n_dims: usize,
    p: usize,
    keys: Vec<BlockKey>,
    components: Vec<C64>,
}

impl TraceDetTuple {
    fn from_blocks(rep: &Representation, f: impl Fn(&linalg::CMatrix) -> C64) -> Self {
        let (keys, components) = rep.blocks().map(|(k, b)| (k, f(b))).unzip();
        Self {
            n_dims: rep.n_dims(),
            p: rep.p(),
            keys,
            components,
        }
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[C64] {
        &self.components
    }

    pub fn iter(&self) -> impl Iterator<Item = (BlockKey, C64)> + '_ {
        self.keys
            .iter()
            .copied()
            .zip(self.components.iter().copied())
    }

    pub fn get(&self, subset: DimSubset, index: usize) -> Option<C64> {
        self.iter()
            .find(|(k, _)| k.subset == subset && k.index == index)
            .map(|(_, v)| v)
    }

    /// Largest componentwise distance.
    pub fn max_abs_diff(&self, other: &TraceDetTuple) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `τ(A)`: blockwise traces.
pub fn trace_tuple(a: &StepOperator) -> TraceDetTuple {
    TraceDetTuple::from_blocks(&sigma(a), |b| b.trace())
}

/// `π(A)`: blockwise determinants.
pub fn det_tuple(a: &StepOperator) -> TraceDetTuple {
    TraceDetTuple::from_blocks(&sigma(a), linalg::det)
}

/// Whether a block determinant is nonzero relative to Hadamard's bound.
pub fn det_is_nonzero(block: &linalg::CMatrix) -> bool {
    let bound: f64 = (0..block.dim())
        .map(|r| {
            block
                .row(r)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .product();
    linalg::det(block).norm() > DET_THRESHOLD * bound
}

#[derive(Clone, Debug, PartialEq)]
pub enum Invertibility {
    Invertible,
    Singular {
        block: BlockKey,
        /// Entries of the block's multi-index over the complement subset.
        index: Vec<usize>,
        /// Eigenvalue of the block closest to zero, when the eigensolver succeeds.
        smallest_eigenvalue: Option<C64>,
    },
}

impl Invertibility {
    pub fn is_invertible(&self) -> bool {
        matches!(self, Invertibility::Invertible)
    }
}

/// An operator is invertible iff no block is singular under the LU pivot threshold.
pub fn is_invertible(a: &StepOperator) -> Invertibility {
    let rep = sigma(a);
    for (key, block) in rep.blocks() {
        if linalg::lu_factor(block).is_singular() {
            let smallest = linalg::eigvals(block)
                .ok()
                .and_then(|v| v.into_iter().min_by(|x, y| x.norm().total_cmp(&y.norm())));
            return Invertibility::Singular {
                block: key,
                index: key.multi_index(rep.n_dims(), rep.p()).entries().to_vec(),
                smallest_eigenvalue: smallest,
            };
        }
    }
    Invertibility::Invertible
}
