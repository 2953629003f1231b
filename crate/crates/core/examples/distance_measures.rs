//! Statistical difference, disjointness and entropy of two circuits.

use zkhelp::dist::{disjointness, mut_disjointness, shannon_entropy, statistical_difference};
use zkhelp::{enumerate, Budget, Circuit, CircuitBuilder};

fn main() -> zkhelp::Result<()> {
    let budget = Budget::from_env();
    let x = Circuit::identity(2);
    let mut b = CircuitBuilder::new(2);
    let (r0, r1) = (b.input(0), b.input(1));
    let o = b.and(r0, r1);
    let y = b.finish(vec![r0, o]);

    let (dx, dy) = (enumerate(&x, &budget)?, enumerate(&y, &budget)?);
    println!("SD(X, Y)       = {}", statistical_difference(&dx, &dy)?);
    println!("Disj(X, Y)     = {}", disjointness(&dx, &dy)?);
    println!("Disj(Y, X)     = {}", disjointness(&dy, &dx)?);
    println!("mut-Disj(X, Y) = {}", mut_disjointness(&dx, &dy)?);
    println!(
        "H(X) = {:.4}, H(Y) = {:.4}",
        shannon_entropy(&dx),
        shannon_entropy(&dy)
    );
    Ok(())
}
