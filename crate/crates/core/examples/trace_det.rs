// Trace and determinant tuples: multiplicativity of the determinant and
// `π(e^A) = e^{τ(A)}` on a random operator.
//
// cargo run --example trace_det

use pstep::random::random_operator;
use pstep::representation::operator_exp;
use pstep::spectral::{det_tuple, trace_tuple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let a = random_operator(2, 2, &mut rng);
    let b = random_operator(2, 2, &mut rng);

    let tau = trace_tuple(&a);
    for (key, t) in tau.iter() {
        println!("τ_{:?}[{}] = {t:.6}", key.subset, key.index);
    }

    let pi_ab = det_tuple(&a.compose(&b)?);
    let (pa, pb) = (det_tuple(&a), det_tuple(&b));
    let worst = pi_ab
        .components()
        .iter()
        .zip(pa.components().iter().zip(pb.components()))
        .map(|(ab, (x, y))| (ab - x * y).norm())
        .fold(0.0, f64::max);
    println!("max |π(AB) − π(A)π(B)| = {worst:e}");

    let pi_exp = det_tuple(&operator_exp(&a)?);
    let worst = pi_exp
        .components()
        .iter()
        .zip(tau.components())
        .map(|(d, t)| (d - t.exp()).norm())
        .fold(0.0, f64::max);
    println!("max |π(e^A) − e^τ(A)| = {worst:e}");
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
