// Samples the branch `t0 -> (Lambda(t0), u(0))` and writes it as CSV.

use std::io::Write;

use hessian_lv::solutions::{bifurcation_diagram, lambda_star_lower_bound, orbit_grid};
use hessian_lv::{exponents, integrate_orbit, IntegratorConfig, Params, Result};

fn branch(p: &Params, out: &mut dyn Write) -> Result<()> {
    let orbit = integrate_orbit(p, &IntegratorConfig::for_params(p))?;
    let rows = bifurcation_diagram(&orbit, &orbit_grid(&orbit, 200))?;
    writeln!(out, "# n = {}, k = {}, sigma = {}, q = {}", p.n(), p.k(), p.sigma(), p.q())?;
    writeln!(out, "t0,lambda,A")?;
    for r in rows.iter().step_by(20) {
        writeln!(out, "{:.6},{:.9},{:.9e}", r.t0, r.lambda, r.a)?;
    }
    let turns = rows
        .windows(3)
        .filter(|w| (w[1].lambda - w[0].lambda) * (w[2].lambda - w[1].lambda) < 0.0)
        .count();
    println!(
        "{}: {turns} turning point(s), lambda* >= {:.6}, lambda~ = {:.6}",
        exponents::regime(p),
        lambda_star_lower_bound(&orbit),
        exponents::lambda_tilde(p)
    );
    Ok(())
}

pub fn run_example() -> Result<()> {
    let mut out = std::io::stdout().lock();
    branch(&Params::new(12, 1, 0.0, 5.0)?, &mut out)?;
    branch(&Params::new(5, 1, 0.0, 3.0)?, &mut out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
