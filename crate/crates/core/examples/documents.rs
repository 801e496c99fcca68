// Write an operator and its representation as JSON documents and read them
// back.
//
// cargo run --example documents

use pstep::io::{parse, render, OperatorDocument, RepresentationDocument};
use pstep::random::random_integer_operator;
use pstep::sigma;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_integer_operator(1, 2, 3, &mut rng);

    let text = render(&OperatorDocument::from_operator(&a));
    print!("{text}");
    let back = parse::<OperatorDocument>(&text)?.to_operator()?;
    assert_eq!(back, a);

    let rep = render(&RepresentationDocument::from_representation(&sigma(&a)));
    let reread = parse::<RepresentationDocument>(&rep)?.to_representation()?;
    println!("representation round trip exact: {}", reread == sigma(&a));
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
