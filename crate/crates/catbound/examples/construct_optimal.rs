//! Build the extremal cat state and inspect everything about it: the
//! superposition, its two branches, their reduced states, Bloch vectors,
//! and the feasibility report that certifies the construction.
//!
//! ```bash
//! cargo run -p catbound --example construct_optimal
//! ```

use catbound::catmodel::{
    check_constraints, construct_optimal_canonical, optimal_alive_probability,
    ConstraintTolerances,
};
use catbound::quantum::{bloch, p_alive, partial_trace_env, trace_distance};

fn main() -> catbound::Result<()> {
    let dim = 4;
    let triple = construct_optimal_canonical(dim)?;

    println!("extremal cat over a {dim}-dimensional environment");
    println!("closed-form alive probability: {:.16}", optimal_alive_probability());
    println!();

    for (name, ket) in [
        ("superposition", &triple.superposition),
        ("alive branch ", &triple.alive_branch),
        ("dead branch  ", &triple.dead_branch),
    ] {
        let rho = partial_trace_env(ket);
        let p = bloch(&rho);
        println!(
            "{name}: p_alive = {:.12}, bloch = ({:+.6}, {:+.6}, {:+.6})",
            p_alive(&rho),
            p.x,
            p.y,
            p.z
        );
    }

    let rho_sup = partial_trace_env(&triple.superposition);
    let rho_alive = partial_trace_env(&triple.alive_branch);
    println!();
    println!(
        "trace distance between superposition and alive-branch reduced states: {:.3e}",
        trace_distance(&rho_sup, &rho_alive)
    );

    let report = check_constraints(
        &triple.alive_branch,
        &triple.dead_branch,
        &ConstraintTolerances::strict(),
    )?;
    println!("feasibility report: {report:#?}");
    Ok(())
}
