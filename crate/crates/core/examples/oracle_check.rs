//! Brute-force checks of the thresholding rule and both SCAD solvers.

use sparse_risk::estimators::ScadSolver;
use sparse_risk::oracle::{closed_form_vs_grid, solver_vs_closed_form};

fn main() -> sparse_risk::Result<()> {
    println!("closed form vs grid:  {:.2e}", closed_form_vs_grid(1000, 1)?);
    for solver in [ScadSolver::Lqa, ScadSolver::CoordinateDescent] {
        println!("{solver:?} vs closed form: {:.2e}", solver_vs_closed_form(solver, 500, 1)?);
    }
    Ok(())
}
