//! Build a small circuit, round-trip it through the text format and list
//! its exact output distribution.

use zkhelp::circuit::bits_to_string;
use zkhelp::prob::to_f64;
use zkhelp::{enumerate, Budget, Circuit, CircuitBuilder};

fn main() -> zkhelp::Result<()> {
    // Two outputs: (r0 AND r1, r0 XOR r2).
    let mut b = CircuitBuilder::new(3);
    let (r0, r1, r2) = (b.input(0), b.input(1), b.input(2));
    let and = b.and(r0, r1);
    let xor = b.xor(r0, r2);
    let c = b.finish(vec![and, xor]);

    let text = c.serialize();
    println!("{text}");
    let c = Circuit::parse(&text)?;

    let d = enumerate(&c, &Budget::from_env())?;
    for (v, p) in d.iter() {
        println!("{}  {p}  ({:.4})", bits_to_string(v, d.width()), to_f64(&p));
    }
    Ok(())
}
