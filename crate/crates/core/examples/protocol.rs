//! The image-intersection protocol: exact measurement, sampled runs and
//! compilation back to a pair of probabilistic circuits.

use zkhelp::dist::{disjointness_prob, statistical_difference};
use zkhelp::generate::{no_iid, rng_for, yes_iid};
use zkhelp::prob::ratio;
use zkhelp::protocol::{build_iid_protocol, measure, run};
use zkhelp::reductions::protocol_to_iid;
use zkhelp::Budget;

fn main() -> zkhelp::Result<()> {
    let budget = Budget::from_env();
    let yes = yes_iid(3, &ratio(1, 4), 11, &budget)?;
    let no = no_iid(3, &ratio(3, 4), 12, &budget)?;
    for (name, g) in [("yes", yes), ("no", no)] {
        let spec = build_iid_protocol(&g.x, g.y.as_ref().unwrap(), &budget)?;
        let r = measure(&spec, &budget)?;
        println!(
            "{name}: completeness {}, soundness {}, deviation {}, abort {}",
            r.completeness, r.soundness, r.deviation, r.abort_mass
        );
        let mut rng = rng_for(7);
        let accepted = (0..32)
            .map(|_| run(&spec, &mut rng, &budget).map(|s| s.accept))
            .collect::<zkhelp::Result<Vec<_>>>()?
            .into_iter()
            .filter(|&a| a)
            .count();
        println!("  sampled: {accepted}/32 accepted");
        let p = protocol_to_iid(&spec, 3, &budget)?;
        println!(
            "  compiled: SD(D0, D1) = {}, Disj(D0, D1) = {}",
            statistical_difference(&p.d0.distribution(), &p.d1.distribution())?,
            disjointness_prob(&p.d0, &p.d1)?
        );
    }
    Ok(())
}
