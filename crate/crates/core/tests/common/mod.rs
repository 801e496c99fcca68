// Exhaustive structural checks shared by the lemma tests and the acceptance
// runner. Each returns a description of every failing case.

use pstep::indexing::{enumerate_indices, enumerate_subsets, DimSubset, MultiIndex};
use pstep::random::random_function;
use pstep::StepOperator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kind {
    Mult,
    Integ,
}

pub fn generator(kind: Kind, i: usize, j: usize, n: usize, p: usize) -> StepOperator {
    match kind {
        Kind::Mult => StepOperator::generator_multiplier(i, j, n, p).unwrap(),
        Kind::Integ => StepOperator::generator_integrator(i, j, n, p).unwrap(),
    }
}

fn generators(n: usize, p: usize) -> Vec<(Kind, usize, usize)> {
    let mut out = Vec::new();
    for kind in [Kind::Mult, Kind::Integ] {
        for j in 1..=n {
            for i in 1..=p {
                out.push((kind, i, j));
            }
        }
    }
    out
}

/// Products of generators, for `p ≤ 3`, `N ≤ 2`:
/// `A_ij A_rj = δ(i,r) A_ij`, `B_ij A_rj = δ(i,r) B_ij`, `B_ij B_rj = B_rj`,
/// commutation for different second indices, and agreement of every
/// composition with sequential application.
pub fn generator_relation_failures() -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut failures = Vec::new();
    for n in 1..=2 {
        for p in 1..=3 {
            let zero = StepOperator::zero(n, p).unwrap();
            let u = random_function(n, p, 2, &mut rng);
            for &(k1, i, j) in &generators(n, p) {
                for &(k2, r, l) in &generators(n, p) {
                    let label = format!("N={n} p={p}: {k1:?}_{i}{j} · {k2:?}_{r}{l}");
                    let x = generator(k1, i, j, n, p);
                    let y = generator(k2, r, l, n, p);
                    let xy = x.compose(&y).unwrap();
                    let seq = x.apply(&y.apply(&u).unwrap()).unwrap();
                    if xy.apply(&u).unwrap().max_abs_diff(&seq) > 1e-12 {
                        failures.push(format!("{label}: composition differs from application"));
                    }
                    let want = if j != l {
                        y.compose(&x).unwrap()
                    } else {
                        match (k1, k2) {
                            (Kind::Mult, Kind::Mult) | (Kind::Integ, Kind::Mult) => {
                                if i == r {
                                    x.clone()
                                } else {
                                    zero.clone()
                                }
                            }
                            (Kind::Integ, Kind::Integ) => y.clone(),
                            (Kind::Mult, Kind::Integ) => continue,
                        }
                    };
                    if xy != want {
                        failures.push(label);
                    }
                }
            }
        }
    }
    failures
}

/// `∏_j A_{i_j j} ∏_{j∈α} B_{m_j j}` built from generators.
pub fn c_from_generators(
    alpha: DimSubset,
    i: &MultiIndex,
    m: &MultiIndex,
    n: usize,
) -> StepOperator {
    let p = i.p();
    let mut op = StepOperator::identity(n, p).unwrap();
    for j in 1..=n {
        op = op
            .compose(&generator(Kind::Mult, i.get(j).unwrap(), j, n, p))
            .unwrap();
    }
    for j in alpha.dims() {
        op = op
            .compose(&generator(Kind::Integ, m.get(j).unwrap(), j, n, p))
            .unwrap();
    }
    op
}

/// `C_α(i, m) ∏_{j∉α} (1 − B_{i_j j})` built from generators.
pub fn d_from_generators(
    alpha: DimSubset,
    i: &MultiIndex,
    m: &MultiIndex,
    n: usize,
) -> StepOperator {
    let p = i.p();
    let id = StepOperator::identity(n, p).unwrap();
    let mut op = c_from_generators(alpha, i, m, n);
    for j in alpha.complement(n).dims() {
        let factor = id
            .sub(&generator(Kind::Integ, i.get(j).unwrap(), j, n, p))
            .unwrap();
        op = op.compose(&factor).unwrap();
    }
    op
}

/// Every `(α, i, m)` with `i` over all dimensions and `m` over `α`.
pub fn basis_labels(n: usize, p: usize) -> Vec<(DimSubset, MultiIndex, MultiIndex)> {
    let full = DimSubset::full(n).unwrap();
    let mut out = Vec::new();
    for alpha in enumerate_subsets(n) {
        for i in enumerate_indices(full, p) {
            for m in enumerate_indices(alpha, p) {
                out.push((alpha, i.clone(), m));
            }
        }
    }
    out
}

/// Both bases agree with their generator-product definitions, and every
/// `C_α(i, m)` equals `Σ_{γ ⊆ ᾱ} D_{α∪γ}(i, m ⋄ i_γ)`; `N ≤ 2`, `p ≤ 2`.
pub fn basis_change_failures() -> Vec<String> {
    let mut failures = Vec::new();
    for n in 1..=2 {
        for p in 1..=2 {
            for (alpha, i, m) in basis_labels(n, p) {
                let label = format!("N={n} p={p} α={alpha:?} i={i:?} m={m:?}");
                let c = StepOperator::c_basis(alpha, &i, &m, n).unwrap();
                if c != c_from_generators(alpha, &i, &m, n) {
                    failures.push(format!("{label}: C basis"));
                }
                if StepOperator::d_basis(alpha, &i, &m, n).unwrap()
                    != d_from_generators(alpha, &i, &m, n)
                {
                    failures.push(format!("{label}: D basis"));
                }
                let mut sum = StepOperator::zero(n, p).unwrap();
                for gamma in alpha.complement(n).subsets() {
                    let col = m.diamond(&i.restrict(gamma).unwrap()).unwrap();
                    let d = StepOperator::d_basis(alpha.union(gamma), &i, &col, n).unwrap();
                    sum = sum.add(&d).unwrap();
                }
                if sum != c {
                    failures.push(format!("{label}: C from D"));
                }
            }
        }
    }
    failures
}

/// `D_α(i,m) D_β(p,r)` is zero unless `α = β`, `i` and `p` agree off `α`
/// and `m = p_α`, in which case it is `D_α(i, r)`; `N ≤ 2`, `p ≤ 2`.
pub fn orthogonality_failures() -> Vec<String> {
    let mut failures = Vec::new();
    for n in 1..=2 {
        for p in 1..=2 {
            let labels = basis_labels(n, p);
            let zero = StepOperator::zero(n, p).unwrap();
            let d: Vec<StepOperator> = labels
                .iter()
                .map(|(a, i, m)| StepOperator::d_basis(*a, i, m, n).unwrap())
                .collect();
            for (x, (alpha, i, m)) in labels.iter().enumerate() {
                let rest = alpha.complement(n);
                for (y, (beta, pi, r)) in labels.iter().enumerate() {
                    let want = if alpha != beta
                        || i.restrict(rest).unwrap() != pi.restrict(rest).unwrap()
                        || *m != pi.restrict(*alpha).unwrap()
                    {
                        zero.clone()
                    } else {
                        StepOperator::d_basis(*alpha, i, r, n).unwrap()
                    };
                    if d[x].compose(&d[y]).unwrap() != want {
                        failures.push(format!(
                            "N={n} p={p}: D_{alpha:?}({i:?},{m:?}) D_{beta:?}({pi:?},{r:?})"
                        ));
                    }
                }
            }
        }
    }
    failures
}
