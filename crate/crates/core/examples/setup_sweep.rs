//! A reduced Setup I sweep: worst-case median relative model error grows with n.
//!
//! `cargo run --release --example setup_sweep -- 200` sets the replication count.

use sparse_risk::experiments::{run_setup, worst_case_curve, SetupId, SetupOverrides};
use sparse_risk::risk::FigureMeasure;

fn main() -> sparse_risk::Result<()> {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let overrides = SetupOverrides {
        n_list: Some(vec![60, 240, 960]),
        replications: Some(reps),
        gamma_points: Some(21),
        ..SetupOverrides::default()
    };
    let report = run_setup(SetupId::I, &overrides)?;
    for wc in worst_case_curve(&report, "scad-lqa", FigureMeasure::RelMedianMe)? {
        println!("n = {:>4}  max {:.3} (se {:.3}) at gamma {:.2}", wc.n, wc.max, wc.se, wc.argmax_gamma);
    }
    Ok(())
}
