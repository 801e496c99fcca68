//! Dimension subsets, multi-indices and their canonical orderings.
//!
//! Dimensions are numbered `1..=N` at every public boundary; internally a
//! subset is a bitmask in which dimension `d` occupies bit `d - 1`.
//!
//! Every linear layout in the crate (coefficient arrays, blocks, grids,
//! files) uses the same mixed-radix rule: the smallest dimension is the most
//! significant digit.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of dimensions.
pub const MAX_DIMS: usize = 16;

/// Largest supported number of grid cells `p^N`.
pub const MAX_CELLS: usize = 1 << 20;

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    base.checked_pow(u32::try_from(exp).ok()?)
}

pub(crate) fn pow(base: usize, exp: usize) -> usize {
    checked_pow(base, exp).expect("size already guarded")
}

/// Validates `N` and `p` against the desk-scale size guard.
pub fn check_sizes(n_dims: usize, p: usize) -> Result<()> {
    if n_dims == 0 || n_dims > MAX_DIMS {
        return Err(Error::SizeGuard(format!(
            "number of dimensions {n_dims} outside 1..={MAX_DIMS}"
        )));
    }
    if p == 0 {
        return Err(Error::SizeGuard("p must be at least 1".into()));
    }
    match checked_pow(p, n_dims) {
        Some(cells) if cells <= MAX_CELLS => Ok(()),
        _ => Err(Error::SizeGuard(format!(
            "p^N = {p}^{n_dims} exceeds {MAX_CELLS} cells"
        ))),
    }
}

/// A subset of the dimension set `{1, ..., N}`.
///
/// The total order is the canonical one: by cardinality, then by bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DimSubset {
    bits: u16,
}

impl DimSubset {
    pub const EMPTY: DimSubset = DimSubset { bits: 0 };

    /// The full set `{1, ..., n}`.
    pub fn full(n_dims: usize) -> Result<Self> {
        if n_dims > MAX_DIMS {
            return Err(Error::SizeGuard(format!(
                "number of dimensions {n_dims} exceeds {MAX_DIMS}"
            )));
        }
        Ok(Self {
            bits: ((1u32 << n_dims) - 1) as u16,
        })
    }

    /// Builds a subset from 1-based dimension numbers, each in `1..=n_dims`.
    pub fn from_dims(dims: &[usize], n_dims: usize) -> Result<Self> {
        let mut bits = 0u16;
        for &d in dims {
            if d == 0 || d > n_dims || d > MAX_DIMS {
                return Err(Error::IndexOutOfRange {
                    what: "dimension",
                    value: d,
                    max: n_dims,
                });
            }
            bits |= 1 << (d - 1);
        }
        Ok(Self { bits })
    }

    /// Builds a subset from a raw bitmask; only the low `n_dims` bits may be set.
    pub fn from_bits(bits: u16, n_dims: usize) -> Result<Self> {
        let full = Self::full(n_dims)?;
        if bits & !full.bits != 0 {
            return Err(Error::SupportMismatch(format!(
                "bitmask {bits:#b} has bits beyond dimension {n_dims}"
            )));
        }
        Ok(Self { bits })
    }

    pub(crate) fn from_bits_unchecked(bits: u16) -> Self {
        Self { bits }
    }

    pub fn bits(self) -> u16 {
        self.bits
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    /// Whether the 1-based dimension `dim` belongs to the subset.
    pub fn contains(self, dim: usize) -> bool {
        (1..=MAX_DIMS).contains(&dim) && self.bits & (1 << (dim - 1)) != 0
    }

    /// 1-based dimensions in increasing order.
    pub fn dims(self) -> Vec<usize> {
        self.positions().map(|b| b + 1).collect()
    }

    /// 0-based bit positions in increasing order.
    pub(crate) fn positions(self) -> impl Iterator<Item = usize> {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let pos = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(pos)
        })
    }

    pub fn complement(self, n_dims: usize) -> Self {
        let full = ((1u32 << n_dims) - 1) as u16;
        Self {
            bits: full & !self.bits,
        }
    }

    pub fn union(self, other: Self) -> Self {
        Self {
            bits: self.bits | other.bits,
        }
    }

    pub fn intersection(self, other: Self) -> Self {
        Self {
            bits: self.bits & other.bits,
        }
    }

    pub fn difference(self, other: Self) -> Self {
        Self {
            bits: self.bits & !other.bits,
        }
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.bits & other.bits == 0
    }

    /// All subsets of `self`, in increasing bitmask order (starting with the
    /// empty set).
    pub fn subsets(self) -> impl Iterator<Item = DimSubset> {
        let mask = self.bits;
        let mut next = Some(0u16);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == mask {
                None
            } else {
                Some(cur.wrapping_sub(mask) & mask)
            };
            Some(DimSubset { bits: cur })
        })
    }
}

impl Ord for DimSubset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then(self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for DimSubset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for DimSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, d) in self.dims().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

/// All subsets of `{1, ..., n_dims}` in canonical order: by cardinality,
/// then by bitmask value.
pub fn enumerate_subsets(n_dims: usize) -> Vec<DimSubset> {
    assert!(n_dims <= MAX_DIMS, "at most {MAX_DIMS} dimensions");
    let mut all: Vec<DimSubset> = (0..(1u32 << n_dims))
        .map(|b| DimSubset::from_bits_unchecked(b as u16))
        .collect();
    all.sort();
    all
}

/// A multi-index `m ∈ P_α`: one entry in `1..=p` per dimension of `α`,
/// stored in increasing dimension order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    p: usize,
    support: DimSubset,
    entries: Vec<usize>,
}

impl MultiIndex {
    pub fn new(p: usize, support: DimSubset, entries: Vec<usize>) -> Result<Self> {
        if entries.len() != support.len() {
            return Err(Error::SupportMismatch(format!(
                "{} entries for support {support:?}",
                entries.len()
            )));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e == 0 || e > p) {
            return Err(Error::IndexOutOfRange {
                what: "multi-index entry",
                value: bad,
                max: p,
            });
        }
        Ok(Self {
            p,
            support,
            entries,
        })
    }

    /// The unique element of `P_∅`.
    pub fn empty(p: usize) -> Self {
        Self {
            p,
            support: DimSubset::EMPTY,
            entries: Vec::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn support(&self) -> DimSubset {
        self.support
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Entry at the 1-based dimension `dim`, if supported.
    pub fn get(&self, dim: usize) -> Option<usize> {
        if !self.support.contains(dim) {
            return None;
        }
        let k = self.support.dims().iter().position(|&d| d == dim)?;
        Some(self.entries[k])
    }

    /// Merges two multi-indices with disjoint supports.
    pub fn diamond(&self, other: &MultiIndex) -> Result<MultiIndex> {
        if !self.support.is_disjoint(other.support) {
            return Err(Error::InvalidMerge {
                left: self.support.dims(),
                right: other.support.dims(),
            });
        }
        if self.p != other.p {
            return Err(Error::ShapeMismatch(format!(
                "cannot merge multi-indices with p = {} and p = {}",
                self.p, other.p
            )));
        }
        let support = self.support.union(other.support);
        let mut left = self
            .support
            .dims()
            .into_iter()
            .zip(&self.entries)
            .peekable();
        let mut right = other
            .support
            .dims()
            .into_iter()
            .zip(&other.entries)
            .peekable();
        let mut entries = Vec::with_capacity(support.len());
        loop {
            let take_left = match (left.peek(), right.peek()) {
                (Some(l), Some(r)) => l.0 < r.0,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            let (_, &e) = if take_left { left.next() } else { right.next() }.unwrap();
            entries.push(e);
        }
        Ok(MultiIndex {
            p: self.p,
            support,
            entries,
        })
    }

    /// The components at the dimensions of `subset`.
    pub fn restrict(&self, subset: DimSubset) -> Result<MultiIndex> {
        if !subset.is_subset_of(self.support) {
            return Err(Error::InvalidRestriction {
                subset: subset.dims(),
                support: self.support.dims(),
            });
        }
        let entries = self
            .support
            .dims()
            .into_iter()
            .zip(&self.entries)
            .filter(|(d, _)| subset.contains(*d))
            .map(|(_, &e)| e)
            .collect();
        Ok(MultiIndex {
            p: self.p,
            support: subset,
            entries,
        })
    }

    /// Mixed-radix rank in `0..p^|α|`; the first entry is the most significant digit.
    pub fn rank(&self) -> usize {
        self.entries
            .iter()
            .fold(0, |acc, &e| acc * self.p + (e - 1))
    }

    /// Inverse of [`MultiIndex::rank`].
    pub fn unrank(support: DimSubset, rank: usize, p: usize) -> Result<MultiIndex> {
        let count = checked_pow(p, support.len()).unwrap_or(usize::MAX);
        if rank >= count {
            return Err(Error::RankOutOfRange { rank, count });
        }
        let mut entries = vec![0; support.len()];
        let mut r = rank;
        for slot in entries.iter_mut().rev() {
            *slot = r % p + 1;
            r /= p;
        }
        Ok(MultiIndex {
            p,
            support,
            entries,
        })
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{:?}", self.entries, self.support)
    }
}

/// All multi-indices over `support`, ordered by rank.
pub fn enumerate_indices(support: DimSubset, p: usize) -> Vec<MultiIndex> {
    let count = pow(p, support.len());
    (0..count)
        .map(|r| MultiIndex::unrank(support, r, p).expect("rank in range"))
        .collect()
}

/// Digit arithmetic on ranks of full multi-indices `i ∈ P_η`.
///
/// A full rank is decomposed into one 0-based digit per dimension; ranks of
/// restrictions and merges are then recomputed from those digits.
#[derive(Clone, Debug)]
pub(crate) struct Digits {
    n_dims: usize,
    radix: usize,
}

impl Digits {
    pub fn new(n_dims: usize, radix: usize) -> Self {
        Self { n_dims, radix }
    }

    /// 0-based digits of a full rank, indexed by 0-based dimension.
    pub fn split(&self, mut rank: usize, out: &mut [usize]) {
        for slot in out[..self.n_dims].iter_mut().rev() {
            *slot = rank % self.radix;
            rank /= self.radix;
        }
    }

    /// Rank of the digits restricted to `subset`.
    pub fn rank_on(&self, digits: &[usize], subset: DimSubset) -> usize {
        subset
            .positions()
            .fold(0, |acc, pos| acc * self.radix + digits[pos])
    }

    /// Writes the digits of a rank over `subset` into `digits` at the subset's positions.
    pub fn scatter(&self, mut rank: usize, subset: DimSubset, digits: &mut [usize]) {
        let positions: Vec<usize> = subset.positions().collect();
        for &pos in positions.iter().rev() {
            digits[pos] = rank % self.radix;
            rank /= self.radix;
        }
    }

    /// Full rank of a digit vector.
    pub fn full_rank(&self, digits: &[usize]) -> usize {
        digits[..self.n_dims]
            .iter()
            .fold(0, |acc, &d| acc * self.radix + d)
    }
}
