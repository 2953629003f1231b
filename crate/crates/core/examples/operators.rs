//! The XOR pair, tensor powers and the T operator on a pair at SD 1/4.

use zkhelp::dist::{disjointness, statistical_difference};
use zkhelp::ops::{power, t_operator, xor_pair};
use zkhelp::{enumerate, Budget, Circuit, CircuitBuilder, Prob};

fn sd(x: &Circuit, y: &Circuit, b: &Budget) -> zkhelp::Result<Prob> {
    statistical_difference(&enumerate(x, b)?, &enumerate(y, b)?)
}

fn main() -> zkhelp::Result<()> {
    let budget = Budget::from_env();
    let x = Circuit::identity(2);
    let mut b = CircuitBuilder::new(2);
    let (r0, r1) = (b.input(0), b.input(1));
    let o = b.or(r0, r1);
    let y = b.finish(vec![r0, o]);

    println!("SD(X, Y) = {}", sd(&x, &y, &budget)?);
    let p = xor_pair(&x, &y, &budget)?;
    println!(
        "XOR pair: SD = {} on {} inputs",
        sd(&p.a, &p.b, &budget)?,
        p.a.n_inputs()
    );
    let p = t_operator(&x, &y, &budget)?;
    println!(
        "T pair:   SD = {} on {} inputs",
        sd(&p.a, &p.b, &budget)?,
        p.a.n_inputs()
    );

    for k in 1..=3 {
        let (xk, yk) = (power(&x, k, &budget)?, power(&y, k, &budget)?);
        let d = disjointness(&enumerate(&xk, &budget)?, &enumerate(&yk, &budget)?)?;
        println!("Disj(X^{k}, Y^{k}) = {d}");
    }
    Ok(())
}
