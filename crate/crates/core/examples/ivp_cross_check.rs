// Solves the rescaled initial value problem directly and compares its phase
// image with the Lotka-Volterra orbit once the time gauge is matched.

use hessian_lv::ivp;
use hessian_lv::{integrate_orbit, IntegratorConfig, Params, Result};

pub fn run_example() -> Result<()> {
    for p in [Params::new(5, 1, 0.0, 3.0)?, Params::new(12, 1, 0.0, 5.0)?] {
        let cfg = IntegratorConfig::for_params(&p);
        let orbit = integrate_orbit(&p, &cfg)?;
        let g = orbit.gauge().expect("saddle launch carries a gauge");
        let s_max = (orbit.t_end() + g).exp();
        let profile = ivp::solve_ivp(&p, s_max, &cfg)?;
        let gap = ivp::orbit_gap(&profile, &orbit)?.unwrap_or(f64::NAN);
        println!(
            "n = {} q = {}: gauge g = {g:.6}, {} IVP samples up to s = {s_max:.3e}, sup gap {gap:.3e}",
            p.n(),
            p.q(),
            profile.len()
        );
        let worst = ivp::ivp_residual_terms(&profile)
            .into_iter()
            .map(|(_, r, src)| r / src.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        println!("  relative residual of the flux equation {worst:.3e}");
    }

    // the profile at q = q* is the Bliss function -(1 + kappa s^beta)^{-m}
    let p = Params::new(5, 1, 0.0, 10.0)?.at_q_star();
    let profile = ivp::solve_ivp(&p, 50.0, &IntegratorConfig::for_params(&p))?;
    let &(s, v, _) = profile.samples().last().unwrap();
    println!("q = q*: v({s}) = {v:.12}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
