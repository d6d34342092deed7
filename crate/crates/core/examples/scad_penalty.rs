//! Tabulate the SCAD penalty, its derivative and the thresholding rule.

use sparse_risk::penalties::{scad_derivative, scad_penalty, scad_univariate_min, ScadParams};

fn main() -> sparse_risk::Result<()> {
    let p = ScadParams::with_lambda(1.0)?;
    println!("{:>6} {:>10} {:>10} {:>10}", "t", "p(t)", "p'(t)", "argmin");
    for i in 0..=24 {
        let t = 0.25 * i as f64;
        println!(
            "{t:>6.2} {:>10.5} {:>10.5} {:>10.5}",
            scad_penalty(t, &p)?,
            scad_derivative(t, &p)?,
            scad_univariate_min(t, &p)?
        );
    }
    Ok(())
}
