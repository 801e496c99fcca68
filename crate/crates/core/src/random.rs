//! Seeded random instances for property checks, demos and the CLI.

use rand::Rng;

use crate::indexing::enumerate_subsets;
use crate::linalg::C64;
use crate::operator::{StepFunction, StepOperator};

/// Operator with every subset present and integer coefficients in `-bound..=bound`.
pub fn random_integer_operator<R: Rng + ?Sized>(
    n_dims: usize,
    p: usize,
    bound: i64,
    rng: &mut R,
) -> StepOperator {
    random_with(n_dims, p, || {
        C64::new(rng.gen_range(-bound..=bound) as f64, 0.0)
    })
}

/// Operator with every subset present and complex coefficients uniform in
/// the unit square `[-1, 1] × [-1, 1]`.
pub fn random_operator<R: Rng + ?Sized>(n_dims: usize, p: usize, rng: &mut R) -> StepOperator {
    random_with(n_dims, p, || {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn random_with(n_dims: usize, p: usize, mut sample: impl FnMut() -> C64) -> StepOperator {
    let mut op = StepOperator::zero(n_dims, p).expect("valid sizes");
    for alpha in enumerate_subsets(n_dims) {
        let len = op.term_len(alpha);
        let coeffs = (0..len).map(|_| sample()).collect();
        op.set_term(alpha, coeffs).expect("consistent length");
    }
    op
}

pub fn random_function<R: Rng + ?Sized>(
    n_dims: usize,
    p: usize,
    q: usize,
    rng: &mut R,
) -> StepFunction {
    StepFunction::from_fn(n_dims, p, q, |_| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .expect("valid sizes")
}
