// Finite and infinite critical points of the Lotka-Volterra system,
// with the launch direction and the limit slopes at the interior point.

use hessian_lv::phase::{self, AsymptoticSlopes};
use hessian_lv::{Params, Result};

fn describe(p: &Params) -> Result<()> {
    println!("n = {}, k = {}, sigma = {}, q = {}", p.n(), p.k(), p.sigma(), p.q());
    for c in phase::finite_critical_points(p) {
        let [l1, l2] = c.eigenvalues;
        println!(
            "  ({:.6}, {:.6})  {:?}  index {:+}  eigenvalues {:.4} / {:.4}",
            c.location.x, c.location.y, c.kind, c.poincare_index, l1, l2
        );
    }
    for inf in phase::infinity_points(p) {
        let chart = if inf.rotated_chart { "z=1/y, w=x/y" } else { "z=1/x, u=y/x" };
        println!(
            "  infinity u = {:.4} [{chart}]  {:?}  ({:.4}, {:.4})",
            inf.u, inf.kind, inf.lambda_z, inf.lambda_u
        );
    }
    println!(
        "  launch eigenvalue {:.4}, slope {:.6}",
        phase::launch_eigenvalue(p),
        phase::launch_slope(p)
    );
    match phase::asymptotic_slopes(p)? {
        AsymptoticSlopes::Real { gamma_plus, gamma_minus } => {
            println!("  node slopes {gamma_plus:.6}, {gamma_minus:.6}")
        }
        AsymptoticSlopes::ComplexCase => println!("  orbit spirals into the interior point"),
    }
    Ok(())
}

pub fn run_example() -> Result<()> {
    describe(&Params::new(5, 1, 0.0, 3.0)?)?;
    describe(&Params::new(12, 1, 0.0, 5.0)?)?;
    describe(&Params::new(5, 1, 0.0, 10.0)?.at_q_star())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
