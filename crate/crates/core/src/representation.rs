//! The block representation of the operator algebra.
//!
//! [`sigma`] sends an operator to the family of matrices `B_α(i)`, one for
//! every subset `α ⊆ {1..N}` and every `i ∈ P_ᾱ`, with entries
//!
//! ```text
//! B_α(i)[rank m][rank n] = b_α(i ⋄ m, n),
//! b_α(i, m) = Σ_{β ⊆ α} δ(i_{α∖β}, m_{α∖β}) a_β(i, m_β).
//! ```
//!
//! The map is an algebra isomorphism onto `∏_α (ℂ^{p^|α| × p^|α|})^{p^{N−|α|}}`,
//! so products, inverses and exponentials can be taken block by block and
//! pulled back with [`sigma_inverse`], which undoes the subset sum by
//! inclusion–exclusion.

use crate::error::{Error, Result};
use crate::indexing::{check_sizes, enumerate_subsets, pow, Digits, DimSubset, MultiIndex};
use crate::linalg::{self, CMatrix, C64};
use crate::operator::{StepFunction, StepOperator};

/// Position of a block: the subset `α` and the rank of `i ∈ P_ᾱ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockKey {
    pub subset: DimSubset,
    pub index: usize,
}

impl BlockKey {
    /// The multi-index `i ∈ P_ᾱ` this key refers to.
    pub fn multi_index(&self, n_dims: usize, p: usize) -> MultiIndex {
        MultiIndex::unrank(self.subset.complement(n_dims), self.index, p)
            .expect("block index in range")
    }
}

/// All block positions in canonical order: subsets canonically, then `rank(i)`.
pub fn block_keys(n_dims: usize, p: usize) -> Vec<BlockKey> {
    enumerate_subsets(n_dims)
        .into_iter()
        .flat_map(|subset| {
            (0..pow(p, n_dims - subset.len())).map(move |index| BlockKey { subset, index })
        })
        .collect()
}

/// First block position of each subset, indexed by bitmask.
fn subset_offsets(n_dims: usize, p: usize) -> Vec<usize> {
    let mut offsets = vec![0; 1 << n_dims];
    let mut start = 0;
    for subset in enumerate_subsets(n_dims) {
        offsets[subset.bits() as usize] = start;
        start += pow(p, n_dims - subset.len());
    }
    offsets
}

/// The image `σ(A)`: a complete family of blocks in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    n_dims: usize,
    p: usize,
    keys: Vec<BlockKey>,
    blocks: Vec<CMatrix>,
    /// first block position of each subset, indexed by bitmask
    offsets: Vec<usize>,
}

impl Representation {
    /// Builds a representation from blocks listed in canonical order.
    pub fn new(n_dims: usize, p: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        check_sizes(n_dims, p)?;
        let keys = block_keys(n_dims, p);
        if blocks.len() != keys.len() {
            return Err(Error::Structure(format!(
                "{} blocks given, a complete representation has {}",
                blocks.len(),
                keys.len()
            )));
        }
        for (key, block) in keys.iter().zip(&blocks) {
            let want = pow(p, key.subset.len());
            if block.dim() != want {
                return Err(Error::ShapeMismatch(format!(
                    "block {:?}[{}] has dimension {}, expected {want}",
                    key.subset,
                    key.index,
                    block.dim()
                )));
            }
        }
        let offsets = subset_offsets(n_dims, p);
        Ok(Self {
            n_dims,
            p,
            keys,
            blocks,
            offsets,
        })
    }

    /// Builds a representation from keyed blocks in any order; every block
    /// position must appear exactly once.
    pub fn from_keyed(
        n_dims: usize,
        p: usize,
        entries: impl IntoIterator<Item = (BlockKey, CMatrix)>,
    ) -> Result<Self> {
        check_sizes(n_dims, p)?;
        let keys = block_keys(n_dims, p);
        let mut slots: Vec<Option<CMatrix>> = vec![None; keys.len()];
        let offsets = subset_offsets(n_dims, p);
        for (key, block) in entries {
            if !key.subset.is_subset_of(DimSubset::full(n_dims)?)
                || key.index >= pow(p, n_dims - key.subset.len())
            {
                return Err(Error::Structure(format!(
                    "block position {:?}[{}] does not exist",
                    key.subset, key.index
                )));
            }
            let pos = offsets[key.subset.bits() as usize] + key.index;
            if slots[pos].replace(block).is_some() {
                return Err(Error::Structure(format!(
                    "duplicate block {:?}[{}]",
                    key.subset, key.index
                )));
            }
        }
        let blocks = slots
            .into_iter()
            .zip(&keys)
            .map(|(b, k)| {
                b.ok_or_else(|| {
                    Error::Structure(format!("missing block {:?}[{}]", k.subset, k.index))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_dims, p, blocks)
    }

    pub fn n_dims(&self) -> usize {
        self.n_dims
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks with their positions, in canonical order.
    pub fn blocks(&self) -> impl Iterator<Item = (BlockKey, &CMatrix)> {
        self.keys.iter().copied().zip(&self.blocks)
    }

    pub fn block(&self, subset: DimSubset, index: usize) -> &CMatrix {
        &self.blocks[self.offsets[subset.bits() as usize] + index]
    }

    fn map_blocks(&self, f: impl FnMut(&CMatrix) -> Result<CMatrix>) -> Result<Representation> {
        let blocks = self.blocks.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Representation {
            blocks,
            ..self.clone()
        })
    }

    fn zip_blocks(
        &self,
        other: &Representation,
        mut f: impl FnMut(&CMatrix, &CMatrix) -> Result<CMatrix>,
    ) -> Result<Representation> {
        if self.n_dims != other.n_dims || self.p != other.p {
            return Err(Error::ShapeMismatch(format!(
                "representations over (N={}, p={}) and (N={}, p={})",
                self.n_dims, self.p, other.n_dims, other.p
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| f(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Representation {
            blocks,
            ..self.clone()
        })
    }

    /// Blockwise matrix product.
    pub fn multiply(&self, other: &Representation) -> Result<Representation> {
        self.zip_blocks(other, |a, b| a.matmul(b))
    }

    pub fn add(&self, other: &Representation) -> Result<Representation> {
        self.zip_blocks(other, |a, b| a.add(b))
    }

    pub fn scale(&self, lambda: C64) -> Representation {
        self.map_blocks(|a| Ok(a.scale(lambda)))
            .expect("infallible")
    }

    /// Blockwise inverse; fails with the position of the first singular block.
    pub fn inverse(&self) -> Result<Representation> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (key, block) in self.blocks() {
            let inv = linalg::inverse(block).map_err(|_| self.singular_block(key))?;
            blocks.push(inv);
        }
        Ok(Representation {
            blocks,
            ..self.clone()
        })
    }

    /// Blockwise matrix exponential.
    pub fn exp(&self) -> Result<Representation> {
        self.map_blocks(linalg::expm)
    }

    pub(crate) fn singular_block(&self, key: BlockKey) -> Error {
        Error::SingularBlock {
            subset: key.subset.dims(),
            index: key.multi_index(self.n_dims, self.p).entries().to_vec(),
        }
    }

    /// Largest entrywise distance over all blocks.
    pub fn max_abs_diff(&self, other: &Representation) -> Result<f64> {
        if self.n_dims != other.n_dims || self.p != other.p {
            return Err(Error::ShapeMismatch(
                "representations of different shape".into(),
            ));
        }
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max))
    }
}

pub fn rep_multiply(r: &Representation, s: &Representation) -> Result<Representation> {
    r.multiply(s)
}

pub fn rep_add(r: &Representation, s: &Representation) -> Result<Representation> {
    r.add(s)
}

pub fn rep_scale(lambda: C64, r: &Representation) -> Representation {
    r.scale(lambda)
}

pub fn rep_inverse(r: &Representation) -> Result<Representation> {
    r.inverse()
}

/// The isomorphism `σ`.
pub fn sigma(a: &StepOperator) -> Representation {
    let n = a.n_dims();
    let p = a.p();
    let digits = Digits::new(n, p);
    let mut w = vec![0; n];
    let mut col = vec![0; n];
    let mut blocks = Vec::new();

    for alpha in enumerate_subsets(n) {
        let rest = alpha.complement(n);
        let dim = pow(p, alpha.len());
        let subsets: Vec<DimSubset> = alpha.subsets().collect();
        for outer in 0..pow(p, rest.len()) {
            digits.scatter(outer, rest, &mut w);
            let block = CMatrix::from_fn(dim, |row, c| {
                digits.scatter(row, alpha, &mut w);
                digits.scatter(c, alpha, &mut col);
                let i_rank = digits.full_rank(&w);
                let mut b = C64::new(0.0, 0.0);
                for &beta in &subsets {
                    let fixed = alpha.difference(beta);
                    if fixed.positions().any(|j| w[j] != col[j]) {
                        continue;
                    }
                    b += a.coefficient_by_rank(beta, i_rank, digits.rank_on(&col, beta));
                }
                b
            });
            blocks.push(block);
        }
    }
    Representation::new(n, p, blocks).expect("sigma produces a complete representation")
}

/// The inverse map `σ⁻¹`:
/// `a_α(i, m) = Σ_{β ⊆ α} (−1)^{|α∖β|} δ(i_{α∖β}, m_{α∖β}) b_β(i, m_β)`.
pub fn sigma_inverse(r: &Representation) -> StepOperator {
    let n = r.n_dims();
    let p = r.p();
    let digits = Digits::new(n, p);
    let mut op = StepOperator::zero(n, p).expect("representation sizes already guarded");
    let mut i_d = vec![0; n];
    let mut m_d = vec![0; n];

    for alpha in enumerate_subsets(n) {
        let width = pow(p, alpha.len());
        let subsets: Vec<DimSubset> = alpha.subsets().collect();
        let mut coeffs = vec![C64::new(0.0, 0.0); op.cells() * width];
        for i_rank in 0..op.cells() {
            digits.split(i_rank, &mut i_d);
            for m_rank in 0..width {
                digits.scatter(m_rank, alpha, &mut m_d);
                let mut acc = C64::new(0.0, 0.0);
                for &beta in &subsets {
                    let fixed = alpha.difference(beta);
                    if fixed.positions().any(|j| i_d[j] != m_d[j]) {
                        continue;
                    }
                    let block = r.block(beta, digits.rank_on(&i_d, beta.complement(n)));
                    let b = block[(digits.rank_on(&i_d, beta), digits.rank_on(&m_d, beta))];
                    if fixed.len() % 2 == 0 {
                        acc += b;
                    } else {
                        acc -= b;
                    }
                }
                coeffs[i_rank * width + m_rank] = acc;
            }
        }
        op.set_term(alpha, coeffs).expect("consistent length");
    }
    op
}

/// `A⁻¹ = σ⁻¹(blockwise inverse of σ(A))`.
pub fn operator_invert(a: &StepOperator) -> Result<StepOperator> {
    Ok(sigma_inverse(&sigma(a).inverse()?))
}

/// Solves `A u = f` for a step function `f` at its own refinement.
pub fn operator_solve(a: &StepOperator, f: &StepFunction) -> Result<StepFunction> {
    operator_invert(a)?.apply(f)
}

/// `e^A = σ⁻¹(blockwise expm of σ(A))`.
pub fn operator_exp(a: &StepOperator) -> Result<StepOperator> {
    Ok(sigma_inverse(&sigma(a).exp()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_integer_operator, random_operator};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn cv(xs: &[f64]) -> Vec<C64> {
        xs.iter().map(|&x| c(x)).collect()
    }

    /// `a·I + b∫dk₁ + c∫dk₂ + d∫∫dk₁dk₂` for N = 2, p = 1.
    fn p1_operator(a: f64, b: f64, cc: f64, d: f64) -> StepOperator {
        let s = |dims: &[usize]| DimSubset::from_dims(dims, 2).unwrap();
        StepOperator::from_terms(
            2,
            1,
            [
                (s(&[]), cv(&[a])),
                (s(&[1]), cv(&[b])),
                (s(&[2]), cv(&[cc])),
                (s(&[1, 2]), cv(&[d])),
            ],
        )
        .unwrap()
    }

    fn diag_example() -> StepOperator {
        // N = 1, p = 2, a_∅ = (2, 3), a_{1}(i, m) = δ(i, m)
        let eta = DimSubset::full(1).unwrap();
        StepOperator::from_terms(
            1,
            2,
            [
                (DimSubset::EMPTY, cv(&[2.0, 3.0])),
                (eta, cv(&[1.0, 0.0, 0.0, 1.0])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hand_evaluated_blocks() {
        let r = sigma(&diag_example());
        let eta = DimSubset::full(1).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r.block(DimSubset::EMPTY, 0), &CMatrix::diagonal(&[c(2.0)]));
        assert_eq!(r.block(DimSubset::EMPTY, 1), &CMatrix::diagonal(&[c(3.0)]));
        assert_eq!(r.block(eta, 0), &CMatrix::diagonal(&[c(3.0), c(4.0)]));
    }

    #[test]
    fn pure_integral_operator_is_its_matrix() {
        let eta = DimSubset::full(1).unwrap();
        let coeffs = cv(&[1.0, 2.0, 3.0, 4.0]);
        let a = StepOperator::from_terms(1, 2, [(eta, coeffs.clone())]).unwrap();
        let r = sigma(&a);
        assert_eq!(
            r.block(eta, 0),
            &CMatrix::from_row_major(2, coeffs).unwrap()
        );
        assert_eq!(r.block(DimSubset::EMPTY, 0), &CMatrix::zeros(1));
    }

    #[test]
    fn unit_maps_to_unit() {
        for (n, p) in [(1, 3), (2, 2), (3, 2)] {
            let r = sigma(&StepOperator::identity(n, p).unwrap());
            assert_eq!(r.len(), pow(p + 1, n));
            for (_, b) in r.blocks() {
                assert_eq!(b, &CMatrix::identity(b.dim()));
            }
            assert_eq!(sigma_inverse(&r), StepOperator::identity(n, p).unwrap());
            assert_eq!(r.inverse().unwrap(), r);
        }
    }

    #[test]
    fn p1_blocks_invert_to_coefficients() {
        let (a, b, cc, d) = (2.0, -1.0, 5.0, 3.0);
        let blocks = vec![
            CMatrix::diagonal(&[c(a)]),
            CMatrix::diagonal(&[c(a + b)]),
            CMatrix::diagonal(&[c(a + cc)]),
            CMatrix::diagonal(&[c(a + b + cc + d)]),
        ];
        let r = Representation::new(2, 1, blocks).unwrap();
        assert_eq!(sigma_inverse(&r), p1_operator(a, b, cc, d));
    }

    #[test]
    fn round_trip_exact_on_integers() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (n, p) in [(1, 2), (1, 3), (2, 2), (2, 3), (3, 2)] {
            for _ in 0..20 {
                let a = random_integer_operator(n, p, 5, &mut rng);
                let r = sigma(&a);
                assert_eq!(sigma_inverse(&r), a);
                assert_eq!(sigma(&sigma_inverse(&r)), r);
            }
        }
    }

    #[test]
    fn homomorphism_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for (n, p) in [(1, 2), (2, 2), (2, 3)] {
            for _ in 0..10 {
                let a = random_operator(n, p, &mut rng);
                let b = random_operator(n, p, &mut rng);
                let lhs = sigma(&a.compose(&b).unwrap());
                let rhs = sigma(&a).multiply(&sigma(&b)).unwrap();
                assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
                let lam = C64::new(0.5, 2.0);
                let lin = sigma(&a.scale(lam).add(&b).unwrap());
                let lin2 = sigma(&a).scale(lam).add(&sigma(&b)).unwrap();
                assert!(lin.max_abs_diff(&lin2).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn blockwise_product_not_commutative() {
        let eta = DimSubset::full(1).unwrap();
        let a = StepOperator::from_terms(1, 2, [(eta, cv(&[0.0, 1.0, 0.0, 0.0]))]).unwrap();
        let b = StepOperator::from_terms(1, 2, [(eta, cv(&[0.0, 0.0, 1.0, 0.0]))]).unwrap();
        let ab = sigma(&a).multiply(&sigma(&b)).unwrap();
        let ba = sigma(&b).multiply(&sigma(&a)).unwrap();
        assert!(ab.max_abs_diff(&ba).unwrap() > 0.5);
    }

    #[test]
    fn closed_form_inverses() {
        let inv = operator_invert(&p1_operator(1.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(inv.approx_eq(&p1_operator(1.0, -0.5, -0.5, 0.25), 1e-12));
        let inv = operator_invert(&p1_operator(2.0, 1.0, 3.0, 5.0)).unwrap();
        let want = p1_operator(0.5, -1.0 / 6.0, -3.0 / 10.0, 19.0 / 330.0);
        assert!(inv.approx_eq(&want, 1e-12));
    }

    #[test]
    fn singular_block_reported() {
        let eta = DimSubset::full(1).unwrap();
        let a = StepOperator::from_terms(1, 1, [(eta, cv(&[1.0]))]).unwrap();
        match operator_invert(&a) {
            Err(Error::SingularBlock { subset, index }) => {
                assert!(subset.is_empty());
                assert_eq!(index, vec![1]);
            }
            other => panic!("expected singular block, got {other:?}"),
        }
    }

    #[test]
    fn invert_and_solve_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for (n, p) in [(1, 3), (2, 2)] {
            for _ in 0..10 {
                let a = random_operator(n, p, &mut rng)
                    .add(&StepOperator::scalar(n, p, c(3.0)).unwrap())
                    .unwrap();
                let inv = operator_invert(&a).unwrap();
                let id = StepOperator::identity(n, p).unwrap();
                assert!(a.compose(&inv).unwrap().approx_eq(&id, 1e-9));
                let f = crate::random::random_function(n, p, 2, &mut rng);
                let u = operator_solve(&a, &f).unwrap();
                let back = a.apply(&u).unwrap();
                assert!(back.l2_distance(&f).unwrap() <= 1e-9 * f.l2_norm());
            }
        }
    }

    #[test]
    fn exp_of_scaled_integral() {
        let eta = DimSubset::full(1).unwrap();
        let lam = 0.7;
        let a = StepOperator::from_terms(1, 1, [(eta, cv(&[lam]))]).unwrap();
        let e = operator_exp(&a).unwrap();
        let want = StepOperator::from_terms(
            1,
            1,
            [
                (DimSubset::EMPTY, cv(&[1.0])),
                (eta, cv(&[lam.exp() - 1.0])),
            ],
        )
        .unwrap();
        assert!(e.approx_eq(&want, 1e-13));
        let zero = StepOperator::zero(2, 2).unwrap();
        assert!(operator_exp(&zero)
            .unwrap()
            .approx_eq(&StepOperator::identity(2, 2).unwrap(), 0.0));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            Representation::new(1, 2, vec![CMatrix::identity(1)]),
            Err(Error::Structure(_))
        ));
        assert!(matches!(
            Representation::new(1, 1, vec![CMatrix::identity(1), CMatrix::identity(2)]),
            Err(Error::ShapeMismatch(_))
        ));
        let keyed = [(
            BlockKey {
                subset: DimSubset::EMPTY,
                index: 0,
            },
            CMatrix::identity(1),
        )];
        assert!(matches!(
            Representation::from_keyed(1, 1, keyed),
            Err(Error::Structure(_))
        ));
    }
}
