//! Entropy against trace distance to the maximally mixed state.

use zkhelp::generate::rng_for;
use zkhelp::quantum::{
    fact_check_entropy_bounds, fact_check_sweep, qscu_to_qea_map, DensityMatrix,
};

fn main() -> zkhelp::Result<()> {
    let mut rng = rng_for(2024);
    for n in 1..=4 {
        let s = fact_check_sweep(n, 500, &mut rng);
        println!(
            "n = {n}: {} states, lower bound violated {} times (min margin {:.3e}), upper bound violated {} times",
            s.states, s.lower_counterexamples, s.min_lower_margin, s.upper_counterexamples
        );
    }
    let rho = DensityMatrix::diagonal(1, &[0.9, 0.1])?;
    let c = fact_check_entropy_bounds(&rho);
    println!(
        "diag(0.9, 0.1): distance {:.3}, entropy {:.3}, upper bound {:.3}",
        c.distance, c.entropy, c.upper_bound
    );
    println!("{:?}", qscu_to_qea_map(&DensityMatrix::maximally_mixed(3)));
    Ok(())
}
