// Invert `A = a + b∫dx₁ + c∫dx₂ + d∫∫dx₁dx₂` blockwise and compare with
// the closed form, then the all-ones operator in 1, 2 and 3 dimensions.
//
// cargo run --example invert

use pstep::indexing::{enumerate_subsets, DimSubset};
use pstep::representation::operator_invert;
use pstep::{StepOperator, C64};

fn constant_terms(coeffs: [f64; 4]) -> Result<StepOperator, pstep::Error> {
    let subsets = enumerate_subsets(2);
    StepOperator::from_terms(
        2,
        1,
        subsets
            .into_iter()
            .zip(coeffs)
            .map(|(s, c)| (s, vec![C64::new(c, 0.0)])),
    )
}

/// Inverse coefficients of the constant-kernel operator in two dimensions.
fn closed_form([a, b, c, d]: [f64; 4]) -> [f64; 4] {
    let s = a + b + c + d;
    [
        1.0 / a,
        -b / (a * (a + b)),
        -c / (a * (a + c)),
        ((2.0 * a + b + c + d) * b * c - a * a * d) / (a * (a + b) * (a + c) * s),
    ]
}

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for coeffs in [[1.0, 1.0, 1.0, 1.0], [2.0, 1.0, 3.0, 5.0]] {
        let inv = operator_invert(&constant_terms(coeffs)?)?;
        let got: Vec<f64> = enumerate_subsets(2)
            .into_iter()
            .map(|s| inv.term(s).map_or(0.0, |t| t[0].re))
            .collect();
        println!(
            "{coeffs:?} -> {got:?} (closed form {:?})",
            closed_form(coeffs)
        );
    }

    for n in 1..=3 {
        let ones = StepOperator::from_terms(
            n,
            1,
            enumerate_subsets(n)
                .into_iter()
                .map(|s| (s, vec![C64::new(1.0, 0.0)])),
        )?;
        let inv = operator_invert(&ones)?;
        let worst = enumerate_subsets(n)
            .into_iter()
            .map(|s: DimSubset| {
                let want = (-0.5f64).powi(s.len() as i32);
                (inv.term(s).map_or(C64::new(0.0, 0.0), |t| t[0]) - want).norm()
            })
            .fold(0.0, f64::max);
        println!("N = {n}: all-ones inverse deviates from (−1/2)^|α| by {worst:e}");
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
