// Integrates the orbit leaving the saddle `(n + sigma, 0)` and watches
// `Lambda(t) = c_{n,k} x y^k` approach its limit.

use hessian_lv::exponents;
use hessian_lv::integrator::{self, integrate_orbit, IntegratorConfig};
use hessian_lv::{Params, Result};

pub fn run_example() -> Result<()> {
    for p in [Params::new(5, 1, 0.0, 3.0)?, Params::new(12, 1, 0.0, 5.0)?] {
        let orbit = integrate_orbit(&p, &IntegratorConfig::for_params(&p))?;
        let end = orbit.last_point();
        println!(
            "n = {} q = {}: {:?} at t = {:.3} after {} steps, end ({:.9}, {:.9})",
            p.n(),
            p.q(),
            orbit.terminated(),
            orbit.t_end(),
            orbit.len(),
            end.x,
            end.y
        );
        let profile = integrator::lambda_profile(&orbit);
        println!(
            "  Lambda(t_end) = {:.9}, lambda~ = {:.9}, sup Lambda = {:.6}",
            profile.eval(orbit.t_end()),
            exponents::lambda_tilde(&p),
            profile.sup()
        );
        for t in [0.0f64, 2.0, 4.0, 8.0, 16.0] {
            let t = t.min(orbit.t_end());
            let pt = orbit.eval(t);
            println!("  t = {t:>7.3}: x = {:.6}, y = {:.6}, Lambda = {:.6}", pt.x, pt.y, orbit.lambda_at(t));
        }
    }

    // at q = q* the orbit is the straight line to (0, (n-2k)/k)
    let p = Params::new(5, 1, 0.0, 10.0)?.at_q_star();
    let orbit = integrate_orbit(&p, &IntegratorConfig::for_params(&p))?;
    println!("q = q*: {:?}, end {:?}", orbit.terminated(), orbit.last_point());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
