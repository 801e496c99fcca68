// Second-kind Fredholm equation `u(k) − ∫₀¹ k x u(x) dx = k` solved on
// refining p-step grids. The exact solution is `u(k) = 3k/2`.
//
// cargo run --example fredholm

use pstep::approx::{fredholm_solve, SampledFunction, SampledKernel};
use pstep::indexing::DimSubset;
use pstep::C64;

/// L² errors for each `p`, sampling kernel and right-hand side `4p` per axis.
fn errors(ps: &[usize]) -> Result<Vec<f64>, pstep::Error> {
    let exact = |k: &[f64]| C64::new(1.5 * k[0], 0.0);
    ps.iter()
        .map(|&p| {
            let res = 4 * p;
            let mut kernel = SampledKernel::new(1, res)?;
            kernel.sample_term(DimSubset::full(1)?, |k, x| C64::new(k[0] * x[0], 0.0))?;
            let rhs = SampledFunction::from_fn(1, res, |k| C64::new(k[0], 0.0))?;
            let sol = fredholm_solve(&kernel, &rhs, C64::new(-1.0, 0.0), p, Some(&exact))?;
            Ok(sol.error.expect("exact solution supplied"))
        })
        .collect()
}

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let ps = [2, 4, 8, 16, 32];
    let errs = errors(&ps)?;
    let mut prev: Option<f64> = None;
    for (p, e) in ps.iter().zip(&errs) {
        match prev {
            Some(q) => println!("p = {p:>2}  L² error {e:.3e}  ratio {:.3}", e / q),
            None => println!("p = {p:>2}  L² error {e:.3e}"),
        }
        prev = Some(*e);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
