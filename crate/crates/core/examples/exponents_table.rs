// Critical exponents and the regime of the interior point for a few
// parameter sets.
//
// Run with `cargo run --example exponents_table`.

use hessian_lv::exponents::{self, Params};
use hessian_lv::Result;

pub fn run_example() -> Result<()> {
    let sets = [(5, 1, 0.0, 3.0), (12, 1, 0.0, 5.0), (12, 1, 0.0, 3.5), (6, 2, 0.0, 9.0), (20, 3, 2.0, 5.0)];
    println!("{:>3} {:>2} {:>5} {:>6} {:>10} {:>10} {:>12} {:>12}  regime", "n", "k", "sigma", "q", "q*", "q_JL", "lambda~", "mu*");
    for (n, k, sigma, q) in sets {
        let p = Params::new(n, k, sigma, q)?;
        let r = exponents::exponent_report(&p);
        println!(
            "{n:>3} {k:>2} {sigma:>5} {q:>6} {:>10.6} {:>10.6} {:>12.6} {:>12.6}  {}",
            r.q_star, r.q_jl, r.lambda_tilde, r.mu_star, r.regime
        );
    }

    // f(q_JL) = n - 2k is the defining identity of q_JL
    let p = Params::new(12, 1, 0.0, 5.0)?;
    let qjl = exponents::q_jl(&p);
    println!("f(q_JL) - (n - 2k) = {:.3e}", exponents::f_ksigma(qjl, &p) - 10.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
