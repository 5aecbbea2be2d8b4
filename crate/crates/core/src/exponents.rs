//! Admissible parameters and the constants derived from them.
//!
//! Everything here is a closed-form expression in `(n, k, sigma, q)`. The
//! only iterative step is a Newton polish of the Joseph-Lundgren type
//! exponent, which is the root of `f_{k,sigma}(q) = n - 2k`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance used to decide that `q` sits on `q*` or `q_JL`.
pub const REGIME_TOL: f64 = 1e-12;

/// Problem parameters `(n, k, sigma, q)` and an optional `lambda`.
///
/// Construct through [`Params::new`] (or [`validate_params`]) so that
/// `n > 2k`, `k >= 1`, `q > k`, `sigma >= 0` and `lambda > 0` hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    n: u32,
    k: u32,
    sigma: f64,
    q: f64,
    lambda: Option<f64>,
}

/// Stability regime of the interior critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    /// `q = q*`: purely imaginary eigenvalues, closed orbits.
    Center,
    /// `q* < q < q_JL`: stable focus.
    Spiral,
    /// `q >= q_JL`: stable node.
    StableNode,
    /// `k < q < q*`: unstable interior point, not treated.
    UnstableExcluded,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Center => "Center",
            Regime::Spiral => "Spiral",
            Regime::StableNode => "StableNode",
            Regime::UnstableExcluded => "UnstableExcluded",
        };
        f.write_str(s)
    }
}

/// All derived constants for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentReport {
    pub c_nk: f64,
    pub tau_sigma: f64,
    pub a_sigma: f64,
    pub q_star: f64,
    /// `+inf` when `n <= 2k + 8 + 4 sigma / k`.
    pub q_jl: f64,
    pub lambda_tilde: f64,
    pub mu_star: f64,
    pub trace_j: f64,
    pub det_j: f64,
    pub discriminant: f64,
    pub regime: Regime,
}

/// Checks the admissibility inequalities and builds [`Params`].
pub fn validate_params(n: i64, k: i64, sigma: f64, q: f64, lambda: Option<f64>) -> Result<Params> {
    if k < 1 {
        return Err(Error::Domain(format!("k < 1 (k = {k})")));
    }
    if n <= 2 * k {
        return Err(Error::Domain(format!("n ≤ 2k (n = {n}, k = {k})")));
    }
    if n > u32::MAX as i64 {
        return Err(Error::Domain(format!("n = {n} is too large")));
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Domain(format!("σ < 0 (σ = {sigma})")));
    }
    if !q.is_finite() || q <= k as f64 {
        return Err(Error::Domain(format!("q ≤ k (q = {q}, k = {k})")));
    }
    if let Some(l) = lambda {
        if !l.is_finite() || l <= 0.0 {
            return Err(Error::Domain(format!("λ ≤ 0 (λ = {l})")));
        }
    }
    Ok(Params { n: n as u32, k: k as u32, sigma, q, lambda })
}

impl Params {
    pub fn new(n: u32, k: u32, sigma: f64, q: f64) -> Result<Self> {
        validate_params(n as i64, k as i64, sigma, q, None)
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        validate_params(self.n as i64, self.k as i64, self.sigma, self.q, Some(lambda))
    }

    /// Same `(n, k, sigma)` with a different source exponent.
    pub fn with_q(self, q: f64) -> Result<Self> {
        validate_params(self.n as i64, self.k as i64, self.sigma, q, self.lambda)
    }

    /// Same `(n, k, sigma)` at the critical exponent `q*`.
    pub fn at_q_star(self) -> Self {
        let q = q_star(&self);
        Params { q, ..self }
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn k(&self) -> u32 {
        self.k
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn nf(&self) -> f64 {
        self.n as f64
    }
    pub fn kf(&self) -> f64 {
        self.k as f64
    }

    /// `2k + sigma`.
    pub fn two_k_sigma(&self) -> f64 {
        2.0 * self.kf() + self.sigma
    }

    /// `(n - 2k) / k`, the height of the critical point on the y-axis.
    pub fn y_axis_height(&self) -> f64 {
        (self.nf() - 2.0 * self.kf()) / self.kf()
    }

    /// `(n + sigma) k / (n - 2k)`: above this the interior point is in the open quadrant.
    pub fn interior_threshold(&self) -> f64 {
        (self.nf() + self.sigma) * self.kf() / (self.nf() - 2.0 * self.kf())
    }
}

/// `binom(n, k)` as a floating-point product.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// `c_{n,k} = binom(n, k) / n`.
pub fn c_nk(p: &Params) -> f64 {
    binomial(p.n, p.k) / p.nf()
}

/// `tau_sigma = (2k + sigma) / (q - k)`.
pub fn tau_sigma(p: &Params) -> f64 {
    p.two_k_sigma() / (p.q - p.kf())
}

/// `a_sigma = q (n - 2k) - (n + sigma) k`.
pub fn a_sigma(p: &Params) -> f64 {
    p.q * (p.nf() - 2.0 * p.kf()) - (p.nf() + p.sigma) * p.kf()
}

pub fn q_star(p: &Params) -> f64 {
    let (n, k, s) = (p.nf(), p.kf(), p.sigma);
    ((n + 2.0) * k + s * (k + 1.0)) / (n - 2.0 * k)
}

/// Whether `n > 2k + 8 + 4 sigma / k`, i.e. whether `q_JL` is finite.
pub fn q_jl_is_finite(p: &Params) -> bool {
    let (n, k, s) = (p.nf(), p.kf(), p.sigma);
    n > 2.0 * k + 8.0 + 4.0 * s / k
}

fn q_jl_closed_form(p: &Params) -> f64 {
    let (n, k, s) = (p.nf(), p.kf(), p.sigma);
    let root = (k * (2.0 * k + s) * ((k + 1.0) * n - k * (2.0 - s))).sqrt();
    let num = k * (k + 1.0) * n - k * k * (2.0 - s) + 2.0 * k + s - 2.0 * root;
    let den = k * (k + 1.0) * n - 2.0 * k * k * (k + 3.0) - 2.0 * k * s - 2.0 * root;
    k * num / den
}

/// Joseph-Lundgren type exponent; `+inf` below the dimension threshold.
pub fn q_jl(p: &Params) -> f64 {
    if !q_jl_is_finite(p) {
        return f64::INFINITY;
    }
    let target = p.nf() - 2.0 * p.kf();
    let mut q = q_jl_closed_form(p);
    if !(q.is_finite() && q > p.kf()) {
        return q;
    }
    // Newton polish of f(q) = n - 2k; f is strictly decreasing on (k, inf).
    let mut g = f_ksigma(q, p) - target;
    for _ in 0..20 {
        let d = f_ksigma_derivative(q, p);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = q - g / d;
        if !(next > p.kf()) || !next.is_finite() {
            break;
        }
        let g_next = f_ksigma(next, p) - target;
        if g_next.abs() >= g.abs() {
            break;
        }
        q = next;
        g = g_next;
        if g == 0.0 {
            break;
        }
    }
    q
}

/// `f_{k,sigma}(q)`; the finite `q_JL` solves `f_{k,sigma}(q) = n - 2k`.
pub fn f_ksigma(q: f64, p: &Params) -> f64 {
    let (k, s) = (p.kf(), p.sigma);
    let b = 2.0 * k + s;
    2.0 * q * b / (k * (q - k)) + 2.0 * b / k * (q / (q - k)).sqrt() + b * (k - 1.0) / (q - k)
}

fn f_ksigma_derivative(q: f64, p: &Params) -> f64 {
    let (k, s) = (p.kf(), p.sigma);
    let b = 2.0 * k + s;
    let d2 = (q - k) * (q - k);
    let ratio = q / (q - k);
    -2.0 * b / d2 - b / k * k / (d2 * ratio.sqrt()) - b * (k - 1.0) / d2
}

/// `lambda~ = c_{n,k} tau^k (n - 2k - k tau)`.
pub fn lambda_tilde(p: &Params) -> f64 {
    let tau = tau_sigma(p);
    c_nk(p) * tau.powi(p.k as i32) * (p.nf() - 2.0 * p.kf() - p.kf() * tau)
}

/// `mu* = binom(n, k) (n + sigma)/n (n - 2k)^k / (k + 1)^(k + 1)`.
pub fn mu_star(p: &Params) -> f64 {
    let (n, k) = (p.nf(), p.kf());
    binomial(p.n, p.k) * (n + p.sigma) / n * (n - 2.0 * k).powi(p.k as i32)
        / (k + 1.0).powi(p.k as i32 + 1)
}

/// `Delta(a_sigma)`, the discriminant of the interior Jacobian.
pub fn discriminant(p: &Params) -> f64 {
    let b = p.two_k_sigma();
    let a = a_sigma(p);
    let qk = p.q - p.kf();
    ((b - a).powi(2) - 4.0 * b * qk / p.kf() * a) / (qk * qk)
}

/// Whether `q` equals `q*` up to [`REGIME_TOL`].
pub fn is_center(p: &Params) -> bool {
    (p.q - q_star(p)).abs() < REGIME_TOL * p.q.max(1.0)
}

pub fn regime(p: &Params) -> Regime {
    let qs = q_star(p);
    if is_center(p) {
        Regime::Center
    } else if p.q < qs {
        Regime::UnstableExcluded
    } else {
        let qj = q_jl(p);
        if qj.is_finite() && p.q >= qj * (1.0 - REGIME_TOL) {
            Regime::StableNode
        } else {
            Regime::Spiral
        }
    }
}

pub fn exponent_report(p: &Params) -> ExponentReport {
    let b = p.two_k_sigma();
    let a = a_sigma(p);
    let qk = p.q - p.kf();
    ExponentReport {
        c_nk: c_nk(p),
        tau_sigma: tau_sigma(p),
        a_sigma: a,
        q_star: q_star(p),
        q_jl: q_jl(p),
        lambda_tilde: lambda_tilde(p),
        mu_star: mu_star(p),
        trace_j: (b - a) / qk,
        det_j: b * a / (p.kf() * qk),
        discriminant: discriminant(p),
        regime: regime(p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, k: u32, s: f64, q: f64) -> Params {
        Params::new(n, k, s, q).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn validation() {
        assert!(validate_params(5, 1, 0.0, 3.0, None).is_ok());
        assert!(validate_params(12, 1, 0.0, 5.0, Some(2.0)).is_ok());
        let e = validate_params(4, 2, 0.0, 3.0, None).unwrap_err();
        assert!(e.to_string().contains("n ≤ 2k"), "{e}");
        let e = validate_params(5, 1, 0.0, 1.0, None).unwrap_err();
        assert!(e.to_string().contains("q ≤ k"));
        let e = validate_params(5, 1, -0.5, 3.0, None).unwrap_err();
        assert!(e.to_string().contains("σ < 0"));
        assert!(validate_params(5, 1, 0.0, 3.0, Some(0.0)).is_err());
        assert!(validate_params(5, 0, 0.0, 3.0, None).is_err());
        assert!(validate_params(5, 1, f64::NAN, 3.0, None).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 1), 5.0);
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(12, 3), 220.0);
        assert!(close(binomial(1000, 3), 166_167_000.0, 1e-6));
    }

    #[test]
    fn q_star_values() {
        assert!(close(q_star(&p(5, 1, 0.0, 3.0)), 7.0 / 3.0, 1e-15));
        assert!(close(q_star(&p(6, 1, 0.0, 3.0)), 2.0, 1e-15));
        assert!(close(q_star(&p(12, 2, 1.0, 5.0)), 3.875, 1e-15));
    }

    #[test]
    fn q_jl_values() {
        let expected = (12.0 - 2.0 * 11f64.sqrt()) / (8.0 - 2.0 * 11f64.sqrt());
        let got = q_jl(&p(12, 1, 0.0, 5.0));
        assert!(close(got, expected, 1e-12), "{got} vs {expected}");
        assert!(close(got, 3.926650, 1e-6));
        assert!(q_jl(&p(10, 1, 0.0, 3.0)).is_infinite());
        assert!(q_jl(&p(5, 1, 0.0, 3.0)).is_infinite());
    }

    #[test]
    fn f_ksigma_values() {
        let b = p(12, 1, 0.0, 5.0);
        assert!(close(f_ksigma(q_jl(&b), &b), 10.0, 1e-9));
        assert!(close(f_ksigma(2.0, &b), 8.0 + 4.0 * 2f64.sqrt(), 1e-12));
        assert!(close(f_ksigma(1e6, &b), 8.0, 1e-4));
    }

    #[test]
    fn f_derivative_matches_finite_difference() {
        let b = p(20, 2, 1.5, 5.0);
        for q in [2.5, 4.0, 9.0, 30.0] {
            let h = 1e-6 * q;
            let fd = (f_ksigma(q + h, &b) - f_ksigma(q - h, &b)) / (2.0 * h);
            let an = f_ksigma_derivative(q, &b);
            assert!((fd - an).abs() < 1e-6 * an.abs().max(1.0), "{q}: {fd} {an}");
        }
    }

    #[test]
    fn lambda_tilde_values() {
        assert!(close(lambda_tilde(&p(5, 1, 0.0, 3.0)), 2.0, 1e-12));
        assert!(close(lambda_tilde(&p(12, 1, 0.0, 5.0)), 4.75, 1e-12));
        assert!(close(lambda_tilde(&p(6, 2, 0.0, 8.0)), 2.5 * 4.0 / 9.0 * 2.0 / 3.0, 1e-12));
    }

    #[test]
    fn mu_star_values() {
        assert!(close(mu_star(&p(5, 1, 0.0, 3.0)), 3.75, 1e-12));
        assert!(close(mu_star(&p(6, 2, 0.0, 8.0)), 60.0 / 27.0, 1e-12));
        assert!(close(mu_star(&p(5, 1, 2.0, 5.0)), 5.25, 1e-12));
    }

    #[test]
    fn report_examples() {
        let r = exponent_report(&p(5, 1, 0.0, 3.0));
        assert!(close(r.a_sigma, 4.0, 1e-15));
        assert!(close(r.trace_j, -1.0, 1e-15));
        assert!(close(r.det_j, 4.0, 1e-15));
        assert!(close(r.discriminant, -15.0, 1e-12));
        assert_eq!(r.regime, Regime::Spiral);

        let r = exponent_report(&p(12, 1, 0.0, 5.0));
        assert!(close(r.a_sigma, 38.0, 1e-15));
        assert!(close(r.discriminant, 5.0, 1e-12));
        assert_eq!(r.regime, Regime::StableNode);

        let c = p(5, 1, 0.0, 7.0 / 3.0);
        let r = exponent_report(&c);
        assert!(close(c.two_k_sigma() - r.a_sigma, 0.0, 1e-14));
        assert_eq!(r.regime, Regime::Center);

        assert_eq!(regime(&p(5, 1, 0.0, 2.0)), Regime::UnstableExcluded);
    }

    #[test]
    fn node_boundary_is_inclusive() {
        let b = p(12, 1, 0.0, 5.0);
        let at = b.with_q(q_jl(&b)).unwrap();
        assert_eq!(regime(&at), Regime::StableNode);
        let below = b.with_q(q_jl(&b) - 1e-6).unwrap();
        assert_eq!(regime(&below), Regime::Spiral);
    }
}
