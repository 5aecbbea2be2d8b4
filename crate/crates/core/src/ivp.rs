//! Direct solver for the rescaled initial value problem
//!
//! ```text
//! (s^{n-k} (v')^k)' = lambda_bar s^{n-1+sigma} (-v)^q,   v(0) = -1,  v'(0) = 0,
//! ```
//!
//! with `lambda_bar = lambda~ / c_{n,k}`. It shares no code with the
//! Lotka-Volterra pipeline beyond the stepper and serves as its oracle.
//!
//! The flux `F = s^{n-k} (v')^k` is carried as `G = F / s^{n+sigma}` in the
//! variable `t = ln s`, which keeps both unknowns of order one near the origin:
//!
//! ```text
//! dv/dt = G^{1/k} s^{(2k+sigma)/k}
//! dG/dt = lambda_bar (-v)^q - (n + sigma) G
//! ```

use crate::error::{Error, Result};
use crate::exponents::{self, Params, Regime};
use crate::integrator::dopri5::{self, Tolerances};
use crate::integrator::{IntegratorConfig, Orbit};
use crate::numerics;
use crate::phase::PhasePoint;

/// Largest step in `ln s`. The samples double as the grid of [`ivp_residual`].
pub const MAX_LOG_STEP: f64 = 0.01;

/// Samples `(s, v, v')` of the solution, starting with `(0, -1, 0)`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    params: Params,
    lambda_bar: f64,
    samples: Vec<(f64, f64, f64)>,
}

impl RadialProfile {
    /// Wraps externally computed samples, e.g. a closed form or a control.
    pub fn from_samples(params: &Params, samples: Vec<(f64, f64, f64)>) -> Result<Self> {
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::DegenerateInput("sample abscissae must increase strictly".into()));
        }
        Ok(RadialProfile { params: *params, lambda_bar: lambda_bar(params), samples })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn lambda_bar(&self) -> f64 {
        self.lambda_bar
    }

    pub fn samples(&self) -> &[(f64, f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The profile `a^delta v(a s)` sampled at `s / a`, `delta = (2k+sigma)/(q-k)`.
    pub fn rescaled(&self, a: f64) -> Self {
        let delta = exponents::tau_sigma(&self.params);
        let samples = self
            .samples
            .iter()
            .map(|&(s, v, dv)| (s / a, a.powf(delta) * v, a.powf(delta + 1.0) * dv))
            .collect();
        RadialProfile { samples, ..self.clone() }
    }
}

/// `lambda~ / c_{n,k}`.
pub fn lambda_bar(params: &Params) -> f64 {
    exponents::lambda_tilde(params) / exponents::c_nk(params)
}

/// Hand-off point between the series and the integrator.
pub fn series_cutoff(params: &Params, abs_tol: f64) -> f64 {
    1e-3f64.min(abs_tol.powf(params.kf() / (2.0 * params.two_k_sigma())))
}

/// Leading term of `v` near the origin: `-1 + (k/(2k+sigma)) C s^beta`,
/// `C = (lambda_bar/(n+sigma))^{1/k}`, `beta = (2k+sigma)/k`.
pub fn series(s: f64, params: &Params) -> (f64, f64) {
    let (k, b) = (params.kf(), params.two_k_sigma());
    let c = (lambda_bar(params) / (params.nf() + params.sigma())).powf(1.0 / k);
    let beta = b / k;
    (-1.0 + k / b * c * s.powf(beta), c * s.powf(beta - 1.0))
}

/// Two-term expansion `v = -1 + a1 e + a2 e^2`, `e = s^beta`, with
/// `a1 = g0^{1/k}/beta`, `a2 = g0^{1/k-1} g1/(2 k beta)`, `g0 = lambda_bar/(n+sigma)`
/// and `g1 = -lambda_bar q a1/(n+sigma+beta)`. Returns `(v, v', a1 e)`.
pub fn series_two_term(s: f64, params: &Params) -> (f64, f64, f64) {
    let (k, b, q) = (params.kf(), params.two_k_sigma(), params.q());
    let ns = params.nf() + params.sigma();
    let lb = lambda_bar(params);
    let beta = b / k;
    let g0 = lb / ns;
    let a1 = g0.powf(1.0 / k) / beta;
    let g1 = -lb * q * a1 / (ns + beta);
    let a2 = g0.powf(1.0 / k - 1.0) * g1 / (2.0 * k * beta);
    let e = s.powf(beta);
    let de = beta * s.powf(beta - 1.0);
    (-1.0 + a1 * e + a2 * e * e, (a1 + 2.0 * a2 * e) * de, a1 * e)
}

/// Largest `s` at which the neglected third-order term of
/// [`series_two_term`] is of order `1e-15`.
pub fn series_two_term_limit(params: &Params) -> f64 {
    let (_, _, a1e_at_one) = series_two_term(1.0, params);
    (1e-5 / a1e_at_one).powf(params.kf() / params.two_k_sigma())
}

/// Solves the initial value problem on `[0, s_max]`.
///
/// `cfg.abs_tol` fixes the series hand-off. Past it the stepper runs with
/// pure relative error control since `v` tends to `0-` and `G` decays over
/// many decades.
pub fn solve_ivp(params: &Params, s_max: f64, cfg: &IntegratorConfig) -> Result<RadialProfile> {
    if exponents::regime(params) == Regime::UnstableExcluded {
        return Err(Error::Regime(format!(
            "q = {} < q* = {}: no global solution is guaranteed",
            params.q(),
            exponents::q_star(params)
        )));
    }
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Err(Error::Domain(format!("s_max must be positive and finite, got {s_max}")));
    }
    cfg.validate(params)?;

    let lb = lambda_bar(params);
    let (k, b) = (params.kf(), params.two_k_sigma());
    let ns = params.nf() + params.sigma();
    let q = params.q();
    let beta = b / k;
    let s0 = series_cutoff(params, cfg.abs_tol);
    let mut samples = vec![(0.0, -1.0, 0.0)];

    if s_max <= s0 {
        for i in 1..=50 {
            let s = s_max * (i as f64 / 50.0);
            let (v, dv) = series(s, params);
            samples.push((s, v, dv));
        }
        return Ok(RadialProfile { params: *params, lambda_bar: lb, samples });
    }

    let c = (lb / ns).powf(1.0 / k);
    let (v0, _) = series(s0, params);
    let g0 = lb / ns - lb * q * (k / b) * c * s0.powf(beta) / (ns + beta);
    let field = move |t: f64, y: &[f64; 2]| {
        let g = y[1].max(0.0);
        [g.powf(1.0 / k) * (beta * t).exp(), lb * (-y[0]).max(0.0).powf(q) - ns * y[1]]
    };
    let tol = Tolerances { rtol: cfg.rel_tol, atol: 0.0, max_steps: cfg.max_steps, max_step: MAX_LOG_STEP };
    let mut bad = None;
    let (nodes, _) = dopri5::integrate(field, s0.ln(), [v0, g0], s_max.ln(), &tol, |n, _| {
        if !(n.y[1] > 0.0) || !(n.y[0] < 0.0) {
            bad = Some(n.t.exp());
            return true;
        }
        false
    })?;
    if let Some(s) = bad {
        return Err(Error::NonConvergence(format!("flux or sign lost at s = {s}")));
    }
    let vprime_exp = (k + params.sigma()) / k;
    samples.extend(nodes.iter().map(|n| {
        let s = n.t.exp();
        (s, n.y[0], n.y[1].powf(1.0 / k) * s.powf(vprime_exp))
    }));
    Ok(RadialProfile { params: *params, lambda_bar: lb, samples })
}

/// Maps samples with `s > 0` to `(ln s, (x, y))`.
pub fn to_phase(profile: &RadialProfile) -> Result<Vec<(f64, PhasePoint)>> {
    let p = &profile.params;
    let (k, sigma, q) = (p.kf(), p.sigma(), p.q());
    profile
        .samples
        .iter()
        .filter(|s| s.0 > 0.0)
        .map(|&(s, v, dv)| {
            if dv <= 0.0 {
                return Err(Error::DegenerateInput(format!("v'(s) = {dv} at s = {s}")));
            }
            let x = s.powf(k + sigma) * profile.lambda_bar * (-v).powf(q) / dv.powf(k);
            let y = s * dv / -v;
            Ok((s.ln(), PhasePoint::new(x, y)))
        })
        .collect()
}

/// Sup-norm distance between the phase image of `profile` and `orbit`, over
/// the samples whose time `ln s - g` falls inside the orbit. `None` when the
/// orbit has no gauge or the windows do not overlap.
pub fn orbit_gap(profile: &RadialProfile, orbit: &Orbit) -> Result<Option<f64>> {
    let Some(g) = orbit.gauge() else { return Ok(None) };
    let mut worst: Option<f64> = None;
    for (ln_s, pt) in to_phase(profile)? {
        let t = ln_s - g;
        if t < orbit.t_start() || t > orbit.t_end() {
            continue;
        }
        let d = pt.dist(&orbit.eval(t));
        worst = Some(worst.map_or(d, |w| w.max(d)));
    }
    Ok(worst)
}

/// Largest `|F' - lambda_bar s^{n-1+sigma} (-v)^q|` over samples that carry a
/// full centered stencil, with `F = s^{n-k} (v')^k`.
pub fn ivp_residual(profile: &RadialProfile) -> f64 {
    ivp_residual_terms(profile).into_iter().map(|(_, r, _)| r).fold(0.0, f64::max)
}

/// Per-sample `(s, |residual|, |source term|)` behind [`ivp_residual`].
pub fn ivp_residual_terms(profile: &RadialProfile) -> Vec<(f64, f64, f64)> {
    let p = &profile.params;
    let (n, k, sigma, q) = (p.nf(), p.kf(), p.sigma(), p.q());
    let s: Vec<f64> = profile.samples.iter().map(|x| x.0).collect();
    let flux: Vec<f64> = profile.samples.iter().map(|&(s, _, dv)| s.powf(n - k) * dv.powf(k)).collect();
    let half = numerics::STENCIL / 2;
    if s.len() < numerics::STENCIL {
        return Vec::new();
    }
    (half..s.len() - half)
        .map(|i| {
            let d = numerics::derivative_at(&s, &flux, i, numerics::STENCIL);
            let (si, v, _) = profile.samples[i];
            let rhs = profile.lambda_bar * si.powf(n - 1.0 + sigma) * (-v).powf(q);
            (si, (d - rhs).abs(), rhs.abs())
        })
        .collect()
}
