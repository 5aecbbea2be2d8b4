//! Radial solutions of `(P_lambda)`: reconstruction from an orbit, counting,
//! bifurcation branches and the closed forms available at `q = q*` and for
//! the singular solution.
//!
//! An orbit launched from the saddle determines the normalized profile `v`
//! of the rescaled problem through
//!
//! ```text
//! v(s) = -[s^{2k+sigma} lambda_bar]^{-1/(q-k)} (x y^k)^{1/(q-k)},   ln s = t + g,
//! ```
//!
//! and each time `t0` yields the solution `u(r) = 1 + (1 - A) v(s0 r)` with
//! `s0 = e^{t0+g}`, `v(s0) = -1/(1 - A)` and `lambda = c_{n,k} x(t0) y(t0)^k`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{self, Params, Regime};
use crate::integrator::{self, Orbit, Termination};
use crate::ivp;
use crate::numerics;
use crate::phase::{self, PhasePoint};

/// Number of grid points used by reconstruction and the closed forms.
pub const DEFAULT_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolutionSource {
    /// Built from an orbit of the Lotka-Volterra system.
    Reconstructed,
    /// Closed form from the smaller root `d-` at `q = q*`.
    ClosedFormMinus,
    /// Closed form from the larger root `d+` at `q = q*`.
    ClosedFormPlus,
    /// Closed form at `lambda = mu*`, `q = q*`.
    ClosedFormExtremal,
    /// `1 - r^{-(2k+sigma)/(q-k)}`, unbounded at the origin.
    Singular,
}

/// Samples `(r, u, u')` of a radial solution.
#[derive(Debug, Clone, Serialize)]
pub struct RadialSolution {
    pub lambda: f64,
    /// `u(0)`; `-inf` for the singular solution.
    pub u0: f64,
    pub samples: Vec<(f64, f64, f64)>,
    pub source: SolutionSource,
}

impl RadialSolution {
    /// Samples with derivatives filled in by finite differences.
    pub fn from_values(lambda: f64, r: &[f64], u: &[f64], source: SolutionSource) -> Result<Self> {
        if r.len() != u.len() || r.is_empty() {
            return Err(Error::DegenerateInput("r and u must be nonempty and of equal length".into()));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DegenerateInput("r must increase strictly".into()));
        }
        let du = numerics::derivative(r, u, numerics::STENCIL);
        let samples = r.iter().zip(u).zip(du).map(|((&r, &u), d)| (r, u, d)).collect();
        let u0 = if r[0] == 0.0 { u[0] } else { f64::NEG_INFINITY };
        Ok(RadialSolution { lambda, u0, samples, source })
    }

    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    /// `u` at the last sample, which is `r = 1` for complete profiles.
    pub fn boundary_value(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.1)
    }

    /// Difference quotient between the first two samples.
    pub fn origin_slope(&self) -> f64 {
        let (a, b) = (self.samples[0], self.samples[1]);
        (b.1 - a.1) / (b.0 - a.0)
    }
}

/// One point `(t0, Lambda(t0), A(t0))` of the solution branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationSample {
    pub t0: f64,
    pub lambda: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

/// `count` crossings in the computed window. `saturated` marks counts that
/// are only a lower bound because the orbit still oscillates across the
/// level when the window ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolutionCount {
    pub count: usize,
    pub saturated: bool,
}

fn gauge(orbit: &Orbit) -> Result<f64> {
    orbit.gauge().ok_or_else(|| Error::DegenerateInput("orbit was not launched from the saddle".into()))
}

/// `v(s)` and `v'(s)` from the orbit. Close to the origin `v + 1` is below
/// the resolution of the orbit and the two-term series takes over.
fn v_of(orbit: &Orbit, g: f64, s: f64) -> (f64, f64) {
    let p = orbit.params();
    let t = s.ln() - g;
    if t < orbit.t_start() || s <= ivp::series_two_term_limit(p) {
        let (v, dv, _) = ivp::series_two_term(s, p);
        return (v, dv);
    }
    let pt = orbit.eval(t);
    let v = v_from_point(pt, s, p);
    (v, pt.y * -v / s)
}

fn v_from_point(pt: PhasePoint, s: f64, p: &Params) -> f64 {
    let e = 1.0 / (p.q() - p.kf());
    let lb = ivp::lambda_bar(p);
    -(s.powf(p.two_k_sigma()) * lb).powf(-e) * (pt.x * pt.y.powi(p.k() as i32)).powf(e)
}

fn check_t0(orbit: &Orbit, t0: f64) -> Result<()> {
    if !(t0 >= orbit.t_start() && t0 <= orbit.t_end()) {
        return Err(Error::Domain(format!(
            "t0 = {t0} outside the orbit range [{}, {}]",
            orbit.t_start(),
            orbit.t_end()
        )));
    }
    Ok(())
}

/// `A(t0) = 1 + 1/v(s0)`.
pub fn initial_value(orbit: &Orbit, t0: f64) -> Result<f64> {
    check_t0(orbit, t0)?;
    let g = gauge(orbit)?;
    let s0 = (t0 + g).exp();
    Ok(1.0 + 1.0 / v_from_point(orbit.eval(t0), s0, orbit.params()))
}

/// `r = 0` followed by a geometric grid from `r_min` to 1.
pub fn geometric_grid(r_min: f64, points: usize) -> Vec<f64> {
    let m = points.max(3) - 1;
    let ratio = (1.0 / r_min).ln() / (m - 1) as f64;
    let mut r = vec![0.0];
    r.extend((0..m).map(|i| if i + 1 == m { 1.0 } else { r_min * (ratio * i as f64).exp() }));
    r
}

/// `points` equally spaced radii on `[0, 1]`.
pub fn uniform_grid(points: usize) -> Vec<f64> {
    let m = points.max(2) - 1;
    (0..=m).map(|i| i as f64 / m as f64).collect()
}

/// Radius below which the profile is flat to `1e-6` in slope. Near the origin
/// `u - u(0)` is about `(1 - A) a1 (s0 r)^beta`.
fn flat_radius(p: &Params, s0: f64, one_minus_a: f64) -> f64 {
    let beta = p.two_k_sigma() / p.kf();
    let (_, _, a1) = ivp::series_two_term(1.0, p);
    (1e-6 / (one_minus_a * a1 * s0.powf(beta))).powf(1.0 / (beta - 1.0)).max(1e-300)
}

/// The solution of `(P_lambda)` with `lambda = Lambda(t0)` attached to `t0`.
pub fn reconstruct_solution(orbit: &Orbit, t0: f64) -> Result<RadialSolution> {
    check_t0(orbit, t0)?;
    let g = gauge(orbit)?;
    let lambda = integrator::lambda_of(orbit.eval(t0), orbit.params());
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("Lambda(t0) = {lambda} is not positive")));
    }
    let s0 = (t0 + g).exp();
    let (v0, _) = v_of(orbit, g, s0);
    let one_minus_a = -1.0 / v0;
    let a = 1.0 - one_minus_a;
    let body = (1e-6 / s0).min(1e-3);
    let flat = flat_radius(orbit.params(), s0, one_minus_a);
    let grid = if flat < body {
        let mut g = geometric_grid(body, DEFAULT_POINTS - 1);
        g.insert(1, flat);
        g
    } else {
        geometric_grid(body, DEFAULT_POINTS)
    };
    let samples = grid
        .iter()
        .map(|&r| {
            if r == 0.0 {
                return (0.0, a, 0.0);
            }
            if r == 1.0 {
                return (1.0, 0.0, one_minus_a * s0 * v_of(orbit, g, s0).1);
            }
            let (v, dv) = v_of(orbit, g, s0 * r);
            (r, 1.0 + one_minus_a * v, one_minus_a * s0 * dv)
        })
        .collect();
    Ok(RadialSolution { lambda, u0: a, samples, source: SolutionSource::Reconstructed })
}

fn final_revolution_amplitude(orbit: &Orbit) -> Option<f64> {
    let p = orbit.params();
    let cp = phase::interior_jacobian(p).ok()?;
    let omega = cp.eigenvalues[0].im.abs();
    if omega == 0.0 {
        return None;
    }
    let from = orbit.t_end() - 2.0 * std::f64::consts::PI / omega;
    let lt = exponents::lambda_tilde(p);
    Some(
        integrator::lambda_profile(orbit)
            .samples()
            .iter()
            .filter(|s| s.0 >= from)
            .map(|s| (s.1 - lt).abs())
            .fold(0.0, f64::max),
    )
}

/// Solutions of `(P_lambda)` visible in the orbit window.
pub fn count_solutions(orbit: &Orbit, lambda: f64) -> SolutionCount {
    let crossings = integrator::level_crossings(orbit, lambda);
    let count = crossings.len();
    let p = orbit.params();
    let oscillating = matches!(exponents::regime(p), Regime::Spiral | Regime::Center);
    let saturated = count > 0
        && oscillating
        && match orbit.terminated() {
            Termination::TimeLimit => true,
            _ => final_revolution_amplitude(orbit)
                .is_some_and(|amp| (lambda - exponents::lambda_tilde(p)).abs() <= amp),
        };
    SolutionCount { count, saturated }
}

/// `(t0, Lambda(t0), A(t0))` over `t_grid`, evaluated in parallel.
pub fn bifurcation_diagram(orbit: &Orbit, t_grid: &[f64]) -> Result<Vec<BifurcationSample>> {
    gauge(orbit)?;
    t_grid
        .par_iter()
        .map(|&t0| {
            let a = initial_value(orbit, t0)?;
            Ok(BifurcationSample { t0, lambda: orbit.lambda_at(t0), a })
        })
        .collect()
}

/// `points` equally spaced times covering the orbit.
pub fn orbit_grid(orbit: &Orbit, points: usize) -> Vec<f64> {
    let (a, b) = (orbit.t_start(), orbit.t_end());
    let m = points.max(2) - 1;
    (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
}

/// Largest `Lambda` seen along the orbit. A lower bound for the extremal
/// parameter; it is not identified with it.
pub fn lambda_star_lower_bound(orbit: &Orbit) -> f64 {
    integrator::lambda_profile(orbit).sup()
}

/// The singular solution `u = 1 - r^{-delta}`, `delta = (2k+sigma)/(q-k)`,
/// paired with `lambda = lambda~`. Returns `(u, u')`.
pub fn singular_solution(params: &Params) -> impl Fn(f64) -> (f64, f64) {
    let d = exponents::tau_sigma(params);
    move |r: f64| (1.0 - r.powf(-d), d * r.powf(-d - 1.0))
}

/// The singular solution sampled at `radii` (all positive).
pub fn singular_profile(params: &Params, radii: &[f64]) -> Result<RadialSolution> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Domain("the singular solution needs r > 0".into()));
    }
    let f = singular_solution(params);
    let samples = radii.iter().map(|&r| {
        let (u, du) = f(r);
        (r, u, du)
    });
    Ok(RadialSolution {
        lambda: exponents::lambda_tilde(params),
        u0: f64::NEG_INFINITY,
        samples: samples.collect(),
        source: SolutionSource::Singular,
    })
}

/// Image of `(r, u, u')` under `x = r^k h (1-u)^q / (u')^k`, `y = r u'/(1-u)`,
/// `h = lambda r^sigma / c_{n,k}`.
pub fn phase_image(r: f64, u: f64, du: f64, lambda: f64, params: &Params) -> PhasePoint {
    let (k, sigma, q) = (params.kf(), params.sigma(), params.q());
    let h = lambda * r.powf(sigma) / exponents::c_nk(params);
    PhasePoint::new(r.powf(k) * h * (1.0 - u).powf(q) / du.powf(k), r * du / (1.0 - u))
}

fn require_center(params: &Params) -> Result<()> {
    if exponents::is_center(params) {
        Ok(())
    } else {
        Err(Error::Regime(format!("q = {} is not q* = {}", params.q(), exponents::q_star(params))))
    }
}

/// Explicit orbit on the invariant segment at `q = q*`:
///
/// ```text
/// x(t) = (n+sigma) c / (c + e^{beta t}),  y(t) = ((n-2k)/k) e^{beta t} / (c + e^{beta t})
/// ```
///
/// with logistic rate `beta = (2k+sigma)/k`.
pub fn critical_orbit(c: f64, params: &Params) -> Result<impl Fn(f64) -> PhasePoint> {
    require_center(params)?;
    if !(c > 0.0) {
        return Err(Error::Domain(format!("c must be positive, got {c}")));
    }
    let ns = params.nf() + params.sigma();
    let m = params.y_axis_height();
    let beta = params.two_k_sigma() / params.kf();
    Ok(move |t: f64| {
        // e^{beta t} / (c + e^{beta t}) written to stay finite for large |t|
        let w = 1.0 / (1.0 + c * (-beta * t).exp());
        PhasePoint::new(ns * (1.0 - w), m * w)
    })
}

/// `binom(n,k) ((n-2k)/k)^k (n+sigma)/n`.
fn root_constant(params: &Params) -> f64 {
    let (n, k) = (params.nf(), params.kf());
    exponents::binomial(params.n(), params.k()) * ((n - 2.0 * k) / k).powi(params.k() as i32) * (n + params.sigma()) / n
}

/// `lambda (d+1)^{k+1} - B d^k`, whose positive roots select the closed forms.
pub fn d_polynomial(d: f64, lambda: f64, params: &Params) -> f64 {
    let k = params.k() as i32;
    lambda * (d + 1.0).powi(k + 1) - root_constant(params) * d.powi(k)
}

/// Positive roots of [`d_polynomial`], ascending.
pub fn d_roots(lambda: f64, params: &Params) -> Result<Vec<f64>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("λ ≤ 0 (λ = {lambda})")));
    }
    let k = params.kf();
    let f = |d: f64| d_polynomial(d, lambda, params);
    let scale = lambda * (k + 1.0).powi(params.k() as i32 + 1);
    let fk = f(k);
    if fk.abs() < 1e-10 * scale {
        return Ok(vec![k]);
    }
    if fk > 0.0 {
        return Ok(Vec::new());
    }
    let lower = numerics::bisect(f, 0.0, k, 0.0).expect("f(0) > 0 > f(k)");
    let mut hi = k * 1e6;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let upper = numerics::bisect(f, k, hi, 0.0).expect("f(k) < 0 < f(hi)");
    Ok(vec![lower, upper])
}

/// `w_c(r) = -K (c + r^beta)^{-m}` and its derivative, a Bliss-type profile
/// solving `S_k(D^2 w) = lambda |x|^sigma (-w)^{q*}` in all of space.
#[derive(Debug, Clone, Copy)]
pub struct BlissProfile {
    c: f64,
    coefficient: f64,
    m: f64,
    beta: f64,
}

impl BlissProfile {
    pub fn new(c: f64, lambda: f64, params: &Params) -> Result<Self> {
        require_center(params)?;
        if !(c > 0.0) || !(lambda > 0.0) {
            return Err(Error::Domain(format!("c = {c} and λ = {lambda} must be positive")));
        }
        let (n, k, b) = (params.nf(), params.kf(), params.two_k_sigma());
        let e = (n - 2.0 * k) / (b * (k + 1.0));
        Ok(BlissProfile {
            c,
            coefficient: lambda.powf(-e) * (c * root_constant(params)).powf(e),
            m: (n - 2.0 * k) / b,
            beta: b / k,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `(w(r), w'(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let base = self.c + r.powf(self.beta);
        let w = -self.coefficient * base.powf(-self.m);
        let dw = self.coefficient * self.m * base.powf(-self.m - 1.0) * self.beta * r.powf(self.beta - 1.0);
        (w, dw)
    }

    /// `u = 1 + w` sampled at `radii`.
    pub fn sample(&self, lambda: f64, radii: &[f64], source: SolutionSource) -> RadialSolution {
        let samples: Vec<_> = radii
            .iter()
            .map(|&r| {
                let (w, dw) = self.eval(r);
                (r, 1.0 + w, dw)
            })
            .collect();
        RadialSolution { lambda, u0: 1.0 + self.eval(0.0).0, samples, source }
    }
}

/// `u*(r) = 1 - ((1+k)/(1+k r^{(2k+sigma)/k}))^{(n-2k)/(2k+sigma)}` and `u*'(r)`.
pub fn u_star(params: &Params) -> impl Fn(f64) -> (f64, f64) {
    let (n, k, b) = (params.nf(), params.kf(), params.two_k_sigma());
    let m = (n - 2.0 * k) / b;
    let beta = b / k;
    move |r: f64| {
        let base = 1.0 + k * r.powf(beta);
        let u = 1.0 - ((1.0 + k) / base).powf(m);
        let du = m * (1.0 + k).powf(m) * base.powf(-m - 1.0) * k * beta * r.powf(beta - 1.0);
        (u, du)
    }
}

/// Closed-form solutions at `q = q*` on the geometric grid used for
/// reconstruction, refined towards `r = 0`.
pub fn critical_solutions(lambda: f64, params: &Params) -> Result<Vec<RadialSolution>> {
    critical_solutions_on(lambda, params, &geometric_grid(1e-3, DEFAULT_POINTS))
}

/// Closed-form solutions at `q = q*` sampled at `radii`.
pub fn critical_solutions_on(lambda: f64, params: &Params, radii: &[f64]) -> Result<Vec<RadialSolution>> {
    require_center(params)?;
    let mu = exponents::mu_star(params);
    if lambda > mu * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("λ = {lambda} exceeds μ* = {mu}: no solution")));
    }
    let roots = d_roots(lambda, params)?;
    let sources: &[SolutionSource] = match roots.len() {
        1 => &[SolutionSource::ClosedFormExtremal],
        2 => &[SolutionSource::ClosedFormMinus, SolutionSource::ClosedFormPlus],
        _ => return Ok(Vec::new()),
    };
    roots
        .iter()
        .zip(sources)
        .map(|(&d, &src)| Ok(BlissProfile::new(1.0 / d, lambda, params)?.sample(lambda, radii, src)))
        .collect()
}

/// Per-sample `(r, |residual|, |source|)` of
/// `c_{n,k} r^{1-n} (r^{n-k} (u')^k)' - lambda r^sigma (1-u)^q`.
///
/// Profiles that start at `r = 0` are regular there; for them the flux is
/// differenced as `G = (u'/r)^k` through `r^{1-n} (r^n G)' = n G + r G'`, so
/// the `r^{1-n}` factor does not amplify stencil errors near the origin.
/// Profiles on an annulus difference `F = r^{n-k} (u')^k` directly. Only
/// samples with `r > 0` and a full centered stencil are used.
pub fn khessian_residual_terms(solution: &RadialSolution, params: &Params) -> Vec<(f64, f64, f64)> {
    let (n, k, sigma, q) = (params.nf(), params.kf(), params.sigma(), params.q());
    let ki = params.k() as i32;
    let c = exponents::c_nk(params);
    let regular = solution.samples.first().is_some_and(|s| s.0 == 0.0);
    let pts: Vec<(f64, f64, f64)> = solution.samples.iter().copied().filter(|s| s.0 > 0.0).collect();
    let r: Vec<f64> = pts.iter().map(|s| s.0).collect();
    let flux: Vec<f64> = if regular {
        pts.iter().map(|&(r, _, du)| (du / r).powi(ki)).collect()
    } else {
        pts.iter().map(|&(r, _, du)| r.powf(n - k) * du.powi(ki)).collect()
    };
    let half = numerics::STENCIL / 2;
    if r.len() < numerics::STENCIL {
        return Vec::new();
    }
    (half..r.len() - half)
        .map(|i| {
            let d = numerics::derivative_at(&r, &flux, i, numerics::STENCIL);
            let (ri, u, _) = pts[i];
            let lhs = if regular { c * (n * flux[i] + ri * d) } else { c * ri.powf(1.0 - n) * d };
            let source = solution.lambda * ri.powf(sigma) * (1.0 - u).powf(q);
            (ri, (lhs - source).abs(), source.abs())
        })
        .collect()
}

/// Largest residual of the radial equation, each sample measured relative to
/// `max(1, |lambda r^sigma (1-u)^q|)`.
pub fn khessian_residual(solution: &RadialSolution, params: &Params) -> f64 {
    khessian_residual_terms(solution, params)
        .into_iter()
        .map(|(_, res, src)| res / src.max(1.0))
        .fold(0.0, f64::max)
}

/// Largest absolute residual of the radial equation.
pub fn khessian_residual_abs(solution: &RadialSolution, params: &Params) -> f64 {
    khessian_residual_terms(solution, params).into_iter().map(|t| t.1).fold(0.0, f64::max)
}
