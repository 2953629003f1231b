//! Seeded, certified instances for each regime.

use zkhelp::generate::{ea_instance, no_iid, random_instance, yes_iid};
use zkhelp::prob::ratio;
use zkhelp::reductions::Regime;
use zkhelp::Budget;

fn main() -> zkhelp::Result<()> {
    let budget = Budget::from_env();
    let gens = [
        yes_iid(4, &ratio(1, 4), 1, &budget)?,
        no_iid(4, &ratio(1, 2), 1, &budget)?,
        ea_instance(3, 1, Regime::Yes, 1, &budget)?,
        ea_instance(3, 1, Regime::No, 1, &budget)?,
        random_instance(4, 12, 2, 1, &budget)?,
    ];
    for g in &gens {
        println!("{}", serde_json::to_string(&g.certificate)?);
    }
    Ok(())
}
