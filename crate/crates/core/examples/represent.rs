// Map an operator onto its block representation and check that composition
// becomes blockwise matrix multiplication.
//
// cargo run --example represent

use pstep::indexing::DimSubset;
use pstep::{sigma, sigma_inverse, StepOperator, C64};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // N = 1, p = 2: (Au)(k) = a(k)u(k) + ∫ A(k, x) u(x) dx
    let eta = DimSubset::full(1)?;
    let a = StepOperator::from_terms(
        1,
        2,
        [
            (
                DimSubset::EMPTY,
                vec![C64::new(3.0, 0.0), C64::new(4.0, 0.0)],
            ),
            (eta, [1.0, 2.0, 0.0, 1.0].map(|x| C64::new(x, 0.0)).to_vec()),
        ],
    )?;
    let r = sigma(&a);
    for (key, block) in r.blocks() {
        let idx = key.multi_index(1, 2);
        let entries: Vec<String> = block.as_slice().iter().map(|z| z.to_string()).collect();
        println!(
            "B_{:?}({:?}) = [{}]",
            key.subset,
            idx.entries(),
            entries.join(", ")
        );
    }

    // p ∫ χ₂(x) · dx
    let b = StepOperator::generator_integrator(2, 1, 1, 2)?;
    let lhs = sigma(&a.compose(&b)?);
    let rhs = r.multiply(&sigma(&b))?;
    println!("max |σ(AB) − σ(A)σ(B)| = {:e}", lhs.max_abs_diff(&rhs)?);

    let back = sigma_inverse(&r);
    println!("σ⁻¹(σ(A)) == A: {}", back == a);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
