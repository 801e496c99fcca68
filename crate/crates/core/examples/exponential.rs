// Operator exponential through the blocks, checked against a truncated
// power series applied to a function.
//
// cargo run --example exponential

use pstep::random::{random_function, random_operator};
use pstep::representation::operator_exp;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_operator(2, 2, &mut rng).scale(pstep::C64::new(0.5, 0.0));
    let u = random_function(2, 2, 3, &mut rng);

    let via_blocks = operator_exp(&a)?.apply(&u)?;

    // Σ A^k u / k!
    let mut term = u.clone();
    let mut series = u.clone();
    for k in 1..40 {
        term = a.apply(&term)?.scale(pstep::C64::new(1.0 / k as f64, 0.0));
        series = series.add(&term)?;
    }
    println!(
        "‖e^A u − Σ A^k u / k!‖ = {:e}",
        via_blocks.l2_distance(&series)?
    );
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
