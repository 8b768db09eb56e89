//! Decompose a random qubit-environment state into its Schmidt form, list
//! the pieces, rebuild the state from them, and measure the roundtrip gap.
//!
//! ```bash
//! cargo run -p catbound --example schmidt_roundtrip
//! ```

use catbound::catmodel::construct_optimal_seeded;
use catbound::quantum::{ray_distance, schmidt};

fn main() -> catbound::Result<()> {
    let triple = construct_optimal_seeded(5, 20_260_816)?;
    let ket = &triple.superposition;
    println!("state: seeded extremal superposition, env_dim = {}", ket.env_dim());
    println!();

    let form = schmidt(ket)?;
    println!("schmidt coefficient (alive) = {:.15}", form.coeff_alive);
    println!("schmidt coefficient (dead)  = {:.15}", form.coeff_dead);
    println!(
        "weights sum                 = {:.15}",
        form.coeff_alive.powi(2) + form.coeff_dead.powi(2)
    );
    println!("rank one                    = {}", form.rank_one);
    println!();

    for (label, vec) in [("alive", &form.qubit_vecs[0]), ("dead", &form.qubit_vecs[1])] {
        let amp: Vec<String> = vec
            .as_slice()
            .iter()
            .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
            .collect();
        println!("qubit vector ({label:<5}) = [{}]", amp.join(", "));
    }
    println!();

    let rebuilt = form.reconstruct()?;
    println!("roundtrip ray distance      = {:.3e}", ray_distance(ket, &rebuilt)?);
    Ok(())
}
