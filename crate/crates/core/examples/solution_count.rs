// Counts and reconstructs the radial solutions for a given `lambda`: a
// single one in the node regime, several near `lambda~` in the spiral
// regime.

use hessian_lv::integrator::level_crossings;
use hessian_lv::solutions::{self, count_solutions, reconstruct_solution};
use hessian_lv::{exponents, integrate_orbit, IntegratorConfig, Params, Result};

fn report(p: &Params, lambda: f64) -> Result<()> {
    let orbit = integrate_orbit(p, &IntegratorConfig::for_params(p))?;
    let c = count_solutions(&orbit, lambda);
    println!(
        "n = {} q = {} ({}), lambda = {lambda}: {} solution(s), saturated = {}",
        p.n(),
        p.q(),
        exponents::regime(p),
        c.count,
        c.saturated
    );
    for t0 in level_crossings(&orbit, lambda).into_iter().take(4) {
        let sol = reconstruct_solution(&orbit, t0)?;
        println!(
            "  t0 = {t0:>9.5}  u(0) = {:>14.6}  u(1) = {:.1e}  residual {:.1e}",
            sol.u0,
            sol.boundary_value(),
            solutions::khessian_residual(&sol, p)
        );
    }
    Ok(())
}

pub fn run_example() -> Result<()> {
    let b = Params::new(12, 1, 0.0, 5.0)?;
    report(&b, 2.0)?;
    report(&b, 5.75)?;
    let a = Params::new(5, 1, 0.0, 3.0)?;
    report(&a, 1.998)?;
    report(&a, exponents::lambda_tilde(&a))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
