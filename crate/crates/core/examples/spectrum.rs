// Spectrum of an operator with block provenance, and the invertibility
// verdict that goes with it.
//
// cargo run --example spectrum

use pstep::indexing::DimSubset;
use pstep::spectral::{is_invertible, spectrum, Invertibility};
use pstep::{StepOperator, C64};

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // (Au)(k) = 2u(k) − 3∫u: essential value 2, discrete eigenvalue −1
    let eta = DimSubset::full(1)?;
    let a = StepOperator::from_terms(
        1,
        1,
        [
            (DimSubset::EMPTY, vec![C64::new(2.0, 0.0)]),
            (eta, vec![C64::new(-3.0, 0.0)]),
        ],
    )?;
    let report = spectrum(&a)?;
    for e in report.entries() {
        println!(
            "{:>9} {} from B_{:?}",
            e.label.as_str(),
            e.value,
            e.source.subset
        );
    }

    let shifted = a.add(&StepOperator::scalar(1, 1, C64::new(1.0, 0.0))?)?;
    match is_invertible(&shifted) {
        Invertibility::Invertible => println!("A + I is invertible"),
        Invertibility::Singular { block, index, .. } => {
            println!("A + I is singular at B_{:?}({index:?})", block.subset)
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
