//! Affine GF(2) hashing: pairwise independence and the leftover hash trend.

use zkhelp::ops::{leftover_hash_sd, pair_collision_probability, AffineHash, HashFamily};
use zkhelp::prob::to_f64;
use zkhelp::Budget;

fn main() -> zkhelp::Result<()> {
    let budget = Budget::from_env();
    for family in [HashFamily::Full, HashFamily::Toeplitz] {
        let h = AffineHash::new(4, 2, family);
        println!(
            "{family:?}: {} description bits, Pr[h(3)=1, h(9)=2] = {}",
            h.description_bits(),
            pair_collision_probability(&h, 3, 9, 1, 2)
        );
        for size in [4u128, 8, 12, 16] {
            let set: Vec<u128> = (0..size).collect();
            let sd = leftover_hash_sd(&h, &set, &budget)?;
            println!(
                "  |S| = {size:>2}: SD((h, h(x)), uniform) = {sd} ({:.4})",
                to_f64(&sd)
            );
        }
    }
    Ok(())
}
