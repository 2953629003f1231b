//! Entropy-threshold instances through the EA-complement and mut-IID
//! reductions.

use zkhelp::generate::ea_instance;
use zkhelp::ops::HashFamily;
use zkhelp::prob::to_f64;
use zkhelp::reductions::{ea_bar_to_iid, iid_to_mut_iid, measure_pair, EaBarParams, Regime};
use zkhelp::Budget;

fn main() -> zkhelp::Result<()> {
    let budget = Budget::from_env();
    let params = EaBarParams {
        t: 1,
        s: 1,
        k: 1,
        family: HashFamily::Full,
    };
    for regime in [Regime::Yes, Regime::No] {
        let g = ea_instance(2, 1, regime, 3, &budget)?;
        let (pair, trace) = ea_bar_to_iid(&g.x, &params, &budget)?;
        let st = measure_pair(&pair.x, &pair.y, &budget)?;
        println!(
            "{regime:?}: H = {}, {} -> {} inputs, SD {:.4}, Disj(Z, Z') {:.4}",
            g.certificate.value,
            g.x.n_inputs(),
            pair.input_bits(),
            to_f64(&st.sd),
            to_f64(&st.disj_xy)
        );
        let (m, _) = iid_to_mut_iid(&pair.x, &pair.y, &budget)?;
        let sm = measure_pair(&m.x, &m.y, &budget)?;
        println!(
            "  mut-IID: SD {:.4}, mut-Disj {:.4}  [{}]",
            to_f64(&sm.sd),
            to_f64(&sm.mut_disj),
            trace.output_id
        );
    }
    Ok(())
}
