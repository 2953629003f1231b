//! Plan and run the mut-IID polarization pipeline within the input budget.

use zkhelp::generate::{no_iid, yes_iid};
use zkhelp::polarize::{plan, polarize_best_effort, solve_u0};
use zkhelp::prob::{ratio, to_f64};
use zkhelp::Budget;

fn main() -> zkhelp::Result<()> {
    let budget = Budget::from_env();
    let (a, b) = (ratio(1, 4), ratio(1, 2));
    let s = solve_u0(&a, &b, 16)?;
    println!(
        "u0 = {} ({:?}), residual {:.2e}",
        s.u0, s.tag_choice, s.root_residual
    );

    let p = plan(&a, &b, 4, 2, &budget)?;
    let (yes, no) = p.predicted_gap();
    println!(
        "plan: {} coin bits, {} T-iterations, input bits per stage {:?}; predicted SD <= {yes:.4}, mut-Disj >= {no:.4}",
        p.coin_bits, p.t_iterations, p.input_bits
    );

    for (name, g) in [
        ("yes", yes_iid(2, &a, 1, &budget)?),
        ("no", no_iid(2, &b, 2, &budget)?),
    ] {
        let run = polarize_best_effort(&g.x, g.y.as_ref().unwrap(), &a, &b, 4, &budget)?;
        println!("{name} instance:");
        for st in &run.steps {
            println!(
                "  {:<14} {:>2} bits  SD {:.4}  mut-Disj {:.4}  ok {}",
                st.stage,
                st.input_bits,
                to_f64(&st.sd),
                to_f64(&st.mut_disj),
                st.respects_recurrence
            );
        }
    }
    Ok(())
}
