// Compare block spectra with the eigenvalues of the dense matrix the
// operator induces on a refined grid, and the three invertibility tests.
//
// cargo run --example oracle

use pstep::oracle::{oracle_invertibility_check, oracle_spectrum_check, MATCH_TOLERANCE};
use pstep::random::random_operator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (n, p) in [(1, 3), (2, 2)] {
        let a = random_operator(n, p, &mut rng);
        for q in 1..=3 {
            let check = oracle_spectrum_check(&a, q, MATCH_TOLERANCE)?;
            println!(
                "N={n} p={p} q={q}: {} dense eigenvalues, matched: {}, worst pair {:.1e}",
                check.oracle.len(),
                check.passed(),
                check.matching.max_distance
            );
        }
        let inv = oracle_invertibility_check(&a)?;
        println!(
            "  invertible by blocks/determinants/dense: {}/{}/{}",
            inv.blocks, inv.determinants, inv.dense
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
