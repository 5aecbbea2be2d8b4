// The closed forms at `q = q*`: the logistic orbit on the invariant line,
// the roots `d` that select Bliss profiles, `u*` at `mu*`, and the singular
// solution at `lambda~`.

use hessian_lv::phase;
use hessian_lv::solutions::{self, d_roots, khessian_residual};
use hessian_lv::{exponents, Params, Result};

pub fn run_example() -> Result<()> {
    let p = Params::new(5, 1, 0.0, 10.0)?.at_q_star();
    let mu = exponents::mu_star(&p);
    println!("q* = {}, mu* = {mu}, lambda~ = {}", p.q(), exponents::lambda_tilde(&p));

    let orbit = solutions::critical_orbit(1.0, &p)?;
    for t in [-4.0, 0.0, 4.0] {
        let pt = orbit(t);
        let (fx, fy) = phase::vector_field(pt, &p);
        println!(
            "  t = {t:>4}: ({:.6}, {:.6}) field ({fx:.4}, {fy:.4}) off-line {:.1e}",
            pt.x,
            pt.y,
            phase::invariant_line_residual(pt, &p)
        );
    }

    for lambda in [0.5 * mu, mu, 2.0 * mu] {
        let roots = d_roots(lambda, &p)?;
        print!("lambda = {lambda:.4}: d = {roots:?}");
        match solutions::critical_solutions(lambda, &p) {
            Ok(sols) => {
                println!();
                for s in sols {
                    println!("  {:?}: u(0) = {:.9}, residual {:.1e}", s.source, s.u0, khessian_residual(&s, &p));
                }
            }
            Err(e) => println!(" ({e})"),
        }
    }

    let u_star = solutions::u_star(&p);
    println!("u*(0) = {:.12}, u*(1) = {:.1e}", u_star(0.0).0, u_star(1.0).0);

    let radii: Vec<f64> = (0..1000).map(|i| 0.1 + 0.9 * i as f64 / 999.0).collect();
    let singular = solutions::singular_profile(&p, &radii)?;
    println!("singular solution residual on [0.1, 1]: {:.1e}", khessian_residual(&singular, &p));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
