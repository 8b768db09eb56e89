//! Show the Bloch geometry of the extremal family on the qubit side alone:
//! the two branch states sit at antipodal points, and the superposition
//! state lands perpendicular to their axis.
//!
//! ```bash
//! cargo run -p catbound --example qubit_triplet
//! ```

use catbound::catmodel::qubit_triplet;
use catbound::quantum::BlochVector;

fn print_vector(label: &str, v: &BlochVector) {
    println!(
        "{label:<14} ({:+.12}, {:+.12}, {:+.12})   |r| = {:.12}",
        v.x,
        v.y,
        v.z,
        v.length()
    );
}

fn main() -> catbound::Result<()> {
    let triplet = qubit_triplet()?;
    let [alive, dead, superposition] = triplet.bloch_vectors()?;

    print_vector("alive", &alive);
    print_vector("dead", &dead);
    print_vector("superposition", &superposition);
    println!();

    let antipodal = alive.add(&dead);
    println!(
        "alive + dead            = ({:+.3e}, {:+.3e}, {:+.3e})  (antipodal pair)",
        antipodal.x, antipodal.y, antipodal.z
    );
    println!(
        "superposition . alive   = {:+.3e}  (perpendicular)",
        superposition.dot(&alive)
    );
    println!(
        "superposition . dead    = {:+.3e}  (perpendicular)",
        superposition.dot(&dead)
    );
    Ok(())
}
