//! Trace the closed-form Schmidt-coefficient curve across the full range of
//! branch overlaps, and watch the alive probability fall from its extremal
//! value to the mirror weight.
//!
//! ```bash
//! cargo run -p catbound --example overlap_sweep
//! ```

use catbound::optimizer::overlap_sweep;

fn main() -> catbound::Result<()> {
    let rows = overlap_sweep(17)?;

    println!("{:>8}  {:>12}  {:>12}  {:>10}", "overlap", "lambda", "lambda^2", "defect");
    for row in &rows {
        println!(
            "{:>8.3}  {:>12.9}  {:>12.9}  {:>10.2e}",
            row.a, row.lambda, row.lambda_sq, row.residual
        );
    }

    let span = rows[0].lambda_sq - rows[rows.len() - 1].lambda_sq;
    println!();
    println!("weight span from one extreme to the other: {span:.16}");
    println!("(equals sqrt(2)/2 = {:.16})", std::f64::consts::FRAC_1_SQRT_2);
    Ok(())
}
